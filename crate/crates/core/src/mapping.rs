//! Scene → synthesis parameters.
//!
//! Y sets pitch and X sets low-pass cutoff, both exponentially. Z sets loudness
//! (closer is louder) and reverb decay (farther is longer). Sphere overlap sets
//! the cross-modulation depth.

use serde::{Deserialize, Serialize};

use crate::protocol::Side;
use crate::wand::{SceneState, WandState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MapConfig {
    pub f_min: f64,
    pub f_max: f64,
    pub c_min: f64,
    pub c_max: f64,
    pub rt_min: f64,
    pub rt_max: f64,
    /// Gain of an active wand at the far wall.
    pub amp_floor: f64,
    /// Shape applied to the overlap fraction before it becomes xmod depth.
    pub xmod_exponent: f64,
}

impl Default for MapConfig {
    fn default() -> Self {
        Self {
            f_min: 110.0,
            f_max: 1760.0,
            c_min: 200.0,
            c_max: 6000.0,
            rt_min: 0.3,
            rt_max: 3.0,
            amp_floor: 0.1,
            xmod_exponent: 1.0,
        }
    }
}

impl MapConfig {
    pub fn validate(&self, sample_rate: f64) -> Result<(), String> {
        for (name, lo, hi) in [
            ("f", self.f_min, self.f_max),
            ("c", self.c_min, self.c_max),
            ("rt", self.rt_min, self.rt_max),
        ] {
            if !(lo > 0.0 && lo < hi && hi.is_finite()) {
                return Err(format!("mapping.{name}_min must be positive and below {name}_max"));
            }
        }
        if self.c_max >= sample_rate / 6.0 {
            return Err(format!(
                "mapping.c_max {} must be below sample_rate/6 = {}",
                self.c_max,
                sample_rate / 6.0
            ));
        }
        if self.f_max >= sample_rate / 2.0 {
            return Err("mapping.f_max must be below Nyquist".into());
        }
        if !(0.0..1.0).contains(&self.amp_floor) {
            return Err("mapping.amp_floor must be in [0, 1)".into());
        }
        if !(self.xmod_exponent > 0.0 && self.xmod_exponent.is_finite()) {
            return Err("mapping.xmod_exponent must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct VoiceParams {
    pub freq: f64,
    pub amp: f64,
    pub cutoff: f64,
    pub rt60: f64,
    pub active: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct SynthParams {
    /// Indexed by [`Side::index`].
    pub voices: [VoiceParams; 2],
    pub xmod: f64,
}

impl SynthParams {
    pub fn voice(&self, side: Side) -> &VoiceParams {
        &self.voices[side.index()]
    }
}

pub fn map_pitch(y: f64, cfg: &MapConfig) -> f64 {
    cfg.f_min * (cfg.f_max / cfg.f_min).powf(y)
}

pub fn map_cutoff(x: f64, cfg: &MapConfig) -> f64 {
    cfg.c_min * (cfg.c_max / cfg.c_min).powf(x)
}

pub fn map_reverb(z: f64, cfg: &MapConfig) -> f64 {
    cfg.rt_min + (1.0 - z) * (cfg.rt_max - cfg.rt_min)
}

pub fn map_amp(wand: &WandState, cfg: &MapConfig) -> f64 {
    if wand.active {
        cfg.amp_floor + (1.0 - cfg.amp_floor) * wand.z
    } else {
        0.0
    }
}

pub fn map_voice(wand: &WandState, cfg: &MapConfig) -> VoiceParams {
    VoiceParams {
        freq: map_pitch(wand.y, cfg),
        amp: map_amp(wand, cfg),
        cutoff: map_cutoff(wand.x, cfg),
        rt60: map_reverb(wand.z, cfg),
        active: wand.active,
    }
}

pub fn map_scene(scene: &SceneState, cfg: &MapConfig) -> SynthParams {
    let xmod = if cfg.xmod_exponent == 1.0 {
        scene.overlap
    } else {
        scene.overlap.powf(cfg.xmod_exponent)
    };
    SynthParams {
        voices: [map_voice(&scene.left, cfg), map_voice(&scene.right, cfg)],
        xmod,
    }
}
