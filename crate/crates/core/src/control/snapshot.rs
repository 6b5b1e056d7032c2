//! Engine state as published to the audio path and to UI clients.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::mapping::SynthParams;
use crate::wand::SceneState;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Diagnostics {
    pub nan_resets: u64,
    pub dropped_frames: u64,
    pub ignored_keys: u64,
    pub gesture_errors: u64,
    pub freq_clamps: u64,
    pub cutoff_clamps: u64,
    pub underruns: u64,
}

/// Immutable, internally consistent engine state: `params == map_scene(scene)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateSnapshot {
    pub seq: u64,
    pub time: Duration,
    pub scene: SceneState,
    pub params: SynthParams,
    pub diag: Diagnostics,
}

#[derive(Serialize)]
struct WandMessage {
    side: &'static str,
    x: f64,
    y: f64,
    z: f64,
    active: bool,
    radius: f64,
    freq_hz: f64,
    amp: f64,
    cutoff_hz: f64,
    rt60_s: f64,
}

#[derive(Serialize)]
struct DiagMessage {
    nan_resets: u64,
    dropped_frames: u64,
}

#[derive(Serialize)]
struct StateMessage {
    #[serde(rename = "type")]
    kind: &'static str,
    seq: u64,
    t_us: u64,
    wands: [WandMessage; 2],
    overlap: f64,
    diag: DiagMessage,
}

impl StateSnapshot {
    /// The `{"type":"state",…}` broadcast document.
    pub fn to_json(&self) -> String {
        let wand = |w: &crate::wand::WandState| {
            let p = self.params.voice(w.side);
            WandMessage {
                side: w.side.as_str(),
                x: w.x,
                y: w.y,
                z: w.z,
                active: w.active,
                radius: w.radius,
                freq_hz: p.freq,
                amp: p.amp,
                cutoff_hz: p.cutoff,
                rt60_s: p.rt60,
            }
        };
        let msg = StateMessage {
            kind: "state",
            seq: self.seq,
            t_us: self.time.as_micros() as u64,
            wands: [wand(&self.scene.left), wand(&self.scene.right)],
            overlap: self.scene.overlap,
            diag: DiagMessage {
                nan_resets: self.diag.nan_resets,
                dropped_frames: self.diag.dropped_frames,
            },
        };
        serde_json::to_string(&msg).expect("state message serializes")
    }

    /// `key=value` lines, one per field, in a fixed order.
    pub fn report(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            out.push_str(k);
            out.push('=');
            out.push_str(&v);
            out.push('\n');
        };
        put("seq", self.seq.to_string());
        put("t_us", (self.time.as_micros() as u64).to_string());
        for w in [&self.scene.left, &self.scene.right] {
            let p = self.params.voice(w.side);
            let name = match w.side {
                crate::protocol::Side::Left => "left",
                crate::protocol::Side::Right => "right",
            };
            put(&format!("{name}.x"), w.x.to_string());
            put(&format!("{name}.y"), w.y.to_string());
            put(&format!("{name}.z"), w.z.to_string());
            put(&format!("{name}.active"), w.active.to_string());
            put(&format!("{name}.radius"), w.radius.to_string());
            put(&format!("{name}.freq_hz"), p.freq.to_string());
            put(&format!("{name}.amp"), p.amp.to_string());
            put(&format!("{name}.cutoff_hz"), p.cutoff.to_string());
            put(&format!("{name}.rt60_s"), p.rt60.to_string());
        }
        put("overlap", self.scene.overlap.to_string());
        put("xmod", self.params.xmod.to_string());
        let d = &self.diag;
        put("diag.nan_resets", d.nan_resets.to_string());
        put("diag.dropped_frames", d.dropped_frames.to_string());
        put("diag.ignored_keys", d.ignored_keys.to_string());
        put("diag.gesture_errors", d.gesture_errors.to_string());
        put("diag.freq_clamps", d.freq_clamps.to_string());
        put("diag.cutoff_clamps", d.cutoff_clamps.to_string());
        put("diag.underruns", d.underruns.to_string());
        out
    }
}

/// Messages UI clients may send.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ClientMessage {
    Key { code: String },
    Hello { client: String },
}
