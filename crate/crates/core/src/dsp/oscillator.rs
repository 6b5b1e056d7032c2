//! Band-limited sawtooth.

/// Two-segment polynomial residual of a band-limited unit step, centered on
/// the phase wrap. `t` is the phase in [0, 1), `dt` the phase increment.
#[inline]
pub fn poly_blep(t: f64, dt: f64) -> f64 {
    if t < dt {
        let x = t / dt;
        x + x - x * x - 1.0
    } else if t > 1.0 - dt {
        let x = (t - 1.0) / dt;
        x * x + x + x + 1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Default)]
pub struct SawOscillator {
    phase: f64,
    naive: bool,
}

impl SawOscillator {
    pub fn new(naive: bool) -> Self {
        Self { phase: 0.0, naive }
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn reset(&mut self) {
        self.phase = 0.0;
    }

    /// Emits one sample in [-1, 1] and advances the phase by `freq / sample_rate`.
    /// `freq` must already be inside (0, sample_rate / 2).
    #[inline]
    pub fn tick(&mut self, freq: f64, sample_rate: f64) -> f64 {
        let dt = freq / sample_rate;
        let t = self.phase;
        let mut y = 2.0 * t - 1.0;
        if !self.naive {
            y -= poly_blep(t, dt);
        }
        self.phase += dt;
        if self.phase >= 1.0 {
            self.phase -= 1.0;
        }
        y
    }
}
