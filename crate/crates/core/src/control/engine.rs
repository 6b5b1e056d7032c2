use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use super::keys::{key_to_action, KeyCode};
use super::script::{parse_script, ScriptInput};
use super::snapshot::{Diagnostics, StateSnapshot};
use super::EngineError;
use crate::config::EngineConfig;
use crate::dsp::{render_timeline, wav};
use crate::gesture::{GestureEvent, HandInput, HandTrackState};
use crate::ingest::IngestEvent;
use crate::mapping::{map_scene, SynthParams};
use crate::protocol::Side;
use crate::wand::{apply_action, gesture_to_action, SceneState, WandAction};

/// Single-threaded owner of all instrument state.
#[derive(Debug, Clone)]
pub struct Controller {
    cfg: EngineConfig,
    scene: SceneState,
    hands: [HandTrackState; 2],
    params: SynthParams,
    seq: u64,
    ignored_keys: u64,
    gesture_errors: u64,
    scratch: Vec<GestureEvent>,
}

impl Controller {
    pub fn new(cfg: &EngineConfig) -> Self {
        let scene = SceneState::new(&cfg.wand);
        Self {
            cfg: cfg.clone(),
            scene,
            hands: [HandTrackState::new(Side::Left), HandTrackState::new(Side::Right)],
            params: map_scene(&scene, &cfg.mapping),
            seq: 0,
            ignored_keys: 0,
            gesture_errors: 0,
            scratch: Vec::new(),
        }
    }

    pub fn config(&self) -> &EngineConfig {
        &self.cfg
    }

    pub fn scene(&self) -> &SceneState {
        &self.scene
    }

    pub fn params(&self) -> &SynthParams {
        &self.params
    }

    pub fn hand(&self, side: Side) -> &HandTrackState {
        &self.hands[side.index()]
    }

    pub fn apply(&mut self, action: &WandAction) {
        self.scene = apply_action(&self.scene, action, &self.cfg.wand);
        self.params = map_scene(&self.scene, &self.cfg.mapping);
    }

    pub fn key(&mut self, key: KeyCode) {
        let action = key_to_action(key, &self.cfg.wand);
        self.apply(&action);
    }

    /// Handles a key by name; unmapped names are counted and ignored.
    pub fn key_named(&mut self, name: &str) -> Option<KeyCode> {
        match KeyCode::parse(name) {
            Some(key) => {
                self.key(key);
                Some(key)
            }
            None => {
                self.ignored_keys += 1;
                None
            }
        }
    }

    pub fn gesture(&mut self, event: &GestureEvent) {
        let action = gesture_to_action(event, &self.cfg.wand);
        self.apply(&action);
    }

    /// Classifies one ingest event received at `at` and applies the
    /// resulting gestures. Returns how many gestures fired.
    pub fn ingest(&mut self, at: Duration, event: &IngestEvent) -> usize {
        let side = event.side();
        let input = match event {
            IngestEvent::Frame(f) => HandInput::Frame(f),
            IngestEvent::HandLost(_) => HandInput::Lost,
        };
        let mut events = std::mem::take(&mut self.scratch);
        events.clear();
        let hand = &mut self.hands[side.index()];
        // a late-queued frame may carry an older arrival time than the last one
        let at = hand.prev_time.map_or(at, |prev| at.max(prev));
        if let Err(e) = hand.step(input, at, &self.cfg.gesture, &mut events) {
            log::debug!("gesture step failed: {e}");
            self.gesture_errors += 1;
        }
        for ev in &events {
            self.gesture(ev);
        }
        let n = events.len();
        self.scratch = events;
        n
    }

    /// Publishes the current state with the next sequence number.
    pub fn snapshot(&mut self, time: Duration, mut diag: Diagnostics) -> StateSnapshot {
        self.seq += 1;
        diag.ignored_keys += self.ignored_keys;
        diag.gesture_errors += self.gesture_errors;
        StateSnapshot {
            seq: self.seq,
            time,
            scene: self.scene,
            params: self.params,
            diag,
        }
    }
}

/// Result of a scripted offline run.
#[derive(Debug, Clone)]
pub struct ScriptOutcome {
    /// Interleaved stereo.
    pub samples: Vec<f32>,
    pub final_state: StateSnapshot,
    pub sample_rate: u32,
}

impl ScriptOutcome {
    pub fn wav_bytes(&self) -> Vec<u8> {
        wav::wav_bytes(&self.samples, self.sample_rate, 2)
    }

    pub fn report(&self) -> String {
        self.final_state.report()
    }
}

/// Replays a script against a virtual clock and renders it offline.
///
/// Without an explicit duration the render runs one second past the last
/// event.
pub fn run_script(
    cfg: &EngineConfig,
    script: &str,
    duration: Option<Duration>,
) -> Result<ScriptOutcome, EngineError> {
    cfg.validate()?;
    let events = parse_script(script)?;
    let mut ctl = Controller::new(cfg);
    let mut timeline = vec![(Duration::ZERO, *ctl.params())];
    for ev in &events {
        match ev.input {
            ScriptInput::Key(key) => ctl.key(key),
            ScriptInput::Gesture { side, kind } => ctl.gesture(&GestureEvent {
                side,
                kind,
                magnitude: 0.0,
                time: ev.time,
            }),
        }
        let params = *ctl.params();
        match timeline.last_mut() {
            Some(last) if last.0 == ev.time => last.1 = params,
            _ => timeline.push((ev.time, params)),
        }
    }
    let duration = duration.unwrap_or_else(|| {
        events.last().map_or(Duration::ZERO, |e| e.time) + Duration::from_secs(1)
    });
    let (samples, dsp_diag) = render_timeline(&timeline, duration, &cfg.dsp)?;
    let diag = Diagnostics {
        nan_resets: dsp_diag.nan_resets,
        freq_clamps: dsp_diag.freq_clamps,
        cutoff_clamps: dsp_diag.cutoff_clamps,
        ..Default::default()
    };
    let final_state = ctl.snapshot(duration, diag);
    Ok(ScriptOutcome {
        samples,
        final_state,
        sample_rate: cfg.dsp.sample_rate,
    })
}

/// Where the final-state report for a WAV output goes.
pub fn report_path(wav_path: &Path) -> PathBuf {
    wav_path.with_extension("state.txt")
}

/// File-level script rendering: reads the script, writes the WAV and its report.
pub fn render_script_file(
    cfg: &EngineConfig,
    script_path: &Path,
    out: &Path,
    duration: Option<Duration>,
) -> Result<ScriptOutcome, EngineError> {
    let script = fs::read_to_string(script_path).map_err(|source| EngineError::Io {
        path: script_path.display().to_string(),
        source,
    })?;
    let outcome = run_script(cfg, &script, duration)?;
    fs::write(out, outcome.wav_bytes()).map_err(|source| EngineError::Io {
        path: out.display().to_string(),
        source,
    })?;
    let report = report_path(out);
    fs::write(&report, outcome.report()).map_err(|source| EngineError::Io {
        path: report.display().to_string(),
        source,
    })?;
    Ok(outcome)
}
