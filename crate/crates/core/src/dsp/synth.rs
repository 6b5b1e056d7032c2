use std::time::Duration;

use serde::Serialize;

use super::{
    cutoff_bounds, svf_coefficient, DspConfig, DspError, Reverb, SawOscillator,
    StateVariableFilter, CHANNELS,
};
use crate::mapping::SynthParams;

/// Knee of the output soft clipper; samples below it pass unchanged.
const CLIP_KNEE: f64 = 0.8;

/// Identity up to the knee, then a tanh shoulder that never reaches ±1.
#[inline]
pub fn soft_clip(x: f64) -> f64 {
    let a = x.abs();
    if a <= CLIP_KNEE {
        x
    } else {
        let head = 1.0 - CLIP_KNEE;
        (CLIP_KNEE + head * ((a - CLIP_KNEE) / head).tanh()).copysign(x)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct DspDiagnostics {
    pub nan_resets: u64,
    pub freq_clamps: u64,
    pub cutoff_clamps: u64,
}

#[derive(Debug, Clone, Copy)]
struct Smoothed {
    value: f64,
    target: f64,
    primed: bool,
}

impl Smoothed {
    fn new(value: f64, primed: bool) -> Self {
        Self {
            value,
            target: value,
            primed,
        }
    }

    /// The first target of a smoother that starts unprimed is taken as-is.
    fn set(&mut self, target: f64) {
        self.target = target;
        if !self.primed {
            self.value = target;
            self.primed = true;
        }
    }

    #[inline]
    fn next(&mut self, keep: f64) -> f64 {
        self.value = self.target + keep * (self.value - self.target);
        self.value
    }
}

/// One oscillator chain: saw → low-pass → gain.
#[derive(Debug, Clone)]
pub struct Voice {
    osc: SawOscillator,
    filter: StateVariableFilter,
    freq: Smoothed,
    cutoff: Smoothed,
    amp: Smoothed,
    /// Previous post-filter sample, before gain.
    last: f64,
}

impl Voice {
    fn new(naive: bool) -> Self {
        Self {
            osc: SawOscillator::new(naive),
            filter: StateVariableFilter::default(),
            freq: Smoothed::new(0.0, false),
            cutoff: Smoothed::new(0.0, false),
            amp: Smoothed::new(0.0, true),
            last: 0.0,
        }
    }

    pub fn phase(&self) -> f64 {
        self.osc.phase()
    }

    pub fn filter(&self) -> &StateVariableFilter {
        &self.filter
    }

    pub fn gain(&self) -> f64 {
        self.amp.value
    }
}

/// Real-time renderer. Allocates only in [`Synth::new`].
#[derive(Debug, Clone)]
pub struct Synth {
    cfg: DspConfig,
    rate: f64,
    keep: f64,
    damping: f64,
    cutoff_range: (f64, f64),
    voices: [Voice; 2],
    reverb: Reverb,
    params: Option<SynthParams>,
    diag: DspDiagnostics,
    fade: Option<(f64, f64)>,
}

impl Synth {
    pub fn new(cfg: &DspConfig) -> Self {
        let rate = cfg.rate();
        let tau = cfg.smoothing_ms * 1e-3;
        Self {
            cfg: cfg.clone(),
            rate,
            keep: (-1.0 / (tau * rate)).exp(),
            damping: 1.0 / cfg.svf_q,
            cutoff_range: cutoff_bounds(rate),
            voices: [Voice::new(cfg.naive_saw), Voice::new(cfg.naive_saw)],
            reverb: Reverb::new(rate, 1.0, cfg.max_comb_feedback),
            params: None,
            diag: DspDiagnostics::default(),
            fade: None,
        }
    }

    pub fn config(&self) -> &DspConfig {
        &self.cfg
    }

    pub fn diagnostics(&self) -> DspDiagnostics {
        self.diag
    }

    pub fn voices(&self) -> &[Voice; 2] {
        &self.voices
    }

    pub fn reverb(&self) -> &Reverb {
        &self.reverb
    }

    /// New targets, taking effect from the next rendered sample.
    pub fn set_params(&mut self, params: &SynthParams) {
        for (voice, p) in self.voices.iter_mut().zip(&params.voices) {
            voice.freq.set(p.freq);
            voice.cutoff.set(p.cutoff);
            voice.amp.set(p.amp);
        }
        self.reverb
            .set_decay(params.voices[0].rt60.max(params.voices[1].rt60));
        self.params = Some(*params);
    }

    /// Starts a linear fade of the whole output to silence.
    pub fn begin_fade_out(&mut self) {
        if self.fade.is_none() {
            let step = 1.0 / (self.cfg.fade_out_ms * 1e-3 * self.rate).max(1.0);
            self.fade = Some((1.0, step));
        }
    }

    pub fn faded_out(&self) -> bool {
        matches!(self.fade, Some((g, _)) if g <= 0.0)
    }

    /// Fills `out` with interleaved stereo frames.
    pub fn render_block(&mut self, out: &mut [f32]) {
        debug_assert_eq!(out.len() % CHANNELS, 0);
        let Some(params) = self.params else {
            for frame in out.chunks_exact_mut(CHANNELS) {
                let wet = self.reverb.process(0.0) * self.cfg.reverb_mix;
                let s = self.finish(wet) as f32;
                frame[0] = s;
                frame[1] = s;
            }
            return;
        };
        let xmod = if self.cfg.xmod_enabled { params.xmod } else { 0.0 };
        let depth = xmod * self.cfg.xmod_depth;
        let nyquist_guard = self.rate / 2.0 - 1.0;
        let pan = self.cfg.pan;

        for frame in out.chunks_exact_mut(CHANNELS) {
            let prev = [self.voices[0].last, self.voices[1].last];
            let mut dry = [0.0; 2];
            for i in 0..2 {
                let v = &mut self.voices[i];
                let base = v.freq.next(self.keep);
                let mut f = if depth != 0.0 {
                    base * (1.0 + depth * prev[1 - i])
                } else {
                    base
                };
                if !(20.0..=nyquist_guard).contains(&f) {
                    f = if f.is_nan() { 20.0 } else { f.clamp(20.0, nyquist_guard) };
                    self.diag.freq_clamps += 1;
                }
                let saw = v.osc.tick(f, self.rate);

                let mut fc = v.cutoff.next(self.keep);
                if !(self.cutoff_range.0..=self.cutoff_range.1).contains(&fc) {
                    fc = if fc.is_nan() {
                        self.cutoff_range.0
                    } else {
                        fc.clamp(self.cutoff_range.0, self.cutoff_range.1)
                    };
                    self.diag.cutoff_clamps += 1;
                }
                let mut y = v
                    .filter
                    .process(saw, svf_coefficient(fc, self.rate), self.damping);
                if !v.filter.is_finite() || !y.is_finite() {
                    v.filter.reset();
                    y = 0.0;
                    self.diag.nan_resets += 1;
                }
                v.last = y;
                dry[i] = y * v.amp.next(self.keep);
            }
            let left = pan * dry[0] + (1.0 - pan) * dry[1];
            let right = (1.0 - pan) * dry[0] + pan * dry[1];
            let wet = self.reverb.process(dry[0] + dry[1]) * self.cfg.reverb_mix;
            let gain = self.fade_gain();
            frame[0] = (self.clip(left + wet) * gain) as f32;
            frame[1] = (self.clip(right + wet) * gain) as f32;
        }
    }

    fn fade_gain(&mut self) -> f64 {
        match &mut self.fade {
            None => 1.0,
            Some((g, step)) => {
                let current = *g;
                *g -= *step;
                if *g < 0.5 * *step {
                    *g = 0.0;
                }
                current
            }
        }
    }

    fn finish(&mut self, x: f64) -> f64 {
        let g = self.fade_gain();
        self.clip(x) * g
    }

    fn clip(&mut self, x: f64) -> f64 {
        if x.is_finite() {
            soft_clip(x)
        } else {
            self.reverb.clear();
            self.diag.nan_resets += 1;
            0.0
        }
    }
}

/// Deterministic offline render of a parameter timeline.
///
/// Entries apply at the first block boundary at or after their time; when
/// several fall before the same boundary the last one wins. Returns
/// interleaved stereo samples.
pub fn render_offline(
    timeline: &[(Duration, SynthParams)],
    duration: Duration,
    cfg: &DspConfig,
) -> Result<Vec<f32>, DspError> {
    render_timeline(timeline, duration, cfg).map(|(samples, _)| samples)
}

/// [`render_offline`] that also returns the renderer's diagnostics.
pub fn render_timeline(
    timeline: &[(Duration, SynthParams)],
    duration: Duration,
    cfg: &DspConfig,
) -> Result<(Vec<f32>, DspDiagnostics), DspError> {
    if let Some(index) = timeline.windows(2).position(|w| w[1].0 < w[0].0) {
        return Err(DspError::UnsortedTimeline { index: index + 1 });
    }
    let rate = cfg.rate();
    let frames = (duration.as_secs_f64() * rate).round() as usize;
    let mut out = vec![0.0f32; frames * CHANNELS];
    let mut synth = Synth::new(cfg);
    let mut next = 0;
    for (b, block) in out.chunks_mut(cfg.block_size * CHANNELS).enumerate() {
        let start = Duration::from_secs_f64((b * cfg.block_size) as f64 / rate);
        while next < timeline.len() && timeline[next].0 <= start {
            next += 1;
        }
        if next > 0 {
            let latest = &timeline[next - 1].1;
            if synth.params.as_ref() != Some(latest) {
                synth.set_params(latest);
            }
        }
        synth.render_block(block);
    }
    Ok((out, synth.diagnostics()))
}
