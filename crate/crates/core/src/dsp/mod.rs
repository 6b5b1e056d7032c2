//! Audio rendering: two saw voices through low-pass SVFs, cross-modulation,
//! smoothed gains, fixed panning and a shared reverb.

mod oscillator;
mod reverb;
mod svf;
mod synth;
pub mod wav;

pub use oscillator::{poly_blep, SawOscillator};
pub use reverb::{comb_feedback, Reverb, ALLPASS_DELAYS_48K, ALLPASS_GAIN, COMB_DELAYS_48K};
pub use svf::{cutoff_bounds, svf_coefficient, StateVariableFilter};
pub use synth::{render_offline, render_timeline, soft_clip, DspDiagnostics, Synth, Voice};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const CHANNELS: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DspConfig {
    pub sample_rate: u32,
    /// Frames per block; parameter targets change only at block boundaries.
    pub block_size: usize,
    pub svf_q: f64,
    /// One-pole time constant for frequency, cutoff and gain.
    pub smoothing_ms: f64,
    /// Depth `m` of the overlap-driven frequency modulation.
    pub xmod_depth: f64,
    /// Removes the cross-modulation path entirely when false.
    pub xmod_enabled: bool,
    pub reverb_mix: f64,
    pub max_comb_feedback: f64,
    /// Uncorrected saw, for A/B comparisons.
    pub naive_saw: bool,
    /// Share of a voice sent to its own side; the rest goes to the other side.
    pub pan: f64,
    pub fade_out_ms: f64,
}

impl Default for DspConfig {
    fn default() -> Self {
        Self {
            sample_rate: 48_000,
            block_size: 256,
            svf_q: 0.707,
            smoothing_ms: 10.0,
            xmod_depth: 0.5,
            xmod_enabled: true,
            reverb_mix: 0.3,
            max_comb_feedback: 0.97,
            naive_saw: false,
            pan: 0.7,
            fade_out_ms: 50.0,
        }
    }
}

impl DspConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(8_000..=384_000).contains(&self.sample_rate) {
            return Err("dsp.sample_rate must be within 8000..=384000".into());
        }
        if self.block_size == 0 || self.block_size > 8192 {
            return Err("dsp.block_size must be within 1..=8192".into());
        }
        if !(self.svf_q > 0.5) {
            return Err("dsp.svf_q must exceed 0.5".into());
        }
        if !(self.smoothing_ms > 0.0) || !(self.fade_out_ms > 0.0) {
            return Err("dsp.smoothing_ms and dsp.fade_out_ms must be positive".into());
        }
        if !(0.0..1.0).contains(&self.xmod_depth) {
            return Err("dsp.xmod_depth must be in [0, 1)".into());
        }
        if !(0.0..=1.0).contains(&self.reverb_mix) || !(0.0..=1.0).contains(&self.pan) {
            return Err("dsp.reverb_mix and dsp.pan must be in [0, 1]".into());
        }
        if !(self.max_comb_feedback > 0.0 && self.max_comb_feedback < 1.0) {
            return Err("dsp.max_comb_feedback must be in (0, 1)".into());
        }
        Ok(())
    }

    pub fn rate(&self) -> f64 {
        self.sample_rate as f64
    }
}

#[derive(Debug, Error)]
pub enum DspError {
    #[error("timeline not sorted: entry {index} precedes entry {}", index - 1)]
    UnsortedTimeline { index: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
