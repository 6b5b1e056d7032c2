//! Chamberlin state-variable filter, low-pass output.

use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StateVariableFilter {
    pub low: f64,
    pub band: f64,
}

/// Frequency coefficient `2 sin(pi fc / fs)`.
#[inline]
pub fn svf_coefficient(cutoff: f64, sample_rate: f64) -> f64 {
    2.0 * (PI * cutoff / sample_rate).sin()
}

/// Usable cutoff range at a sample rate.
pub fn cutoff_bounds(sample_rate: f64) -> (f64, f64) {
    (50.0, sample_rate / 6.5)
}

impl StateVariableFilter {
    /// One update; returns the low-pass output. `damping` is 1/Q.
    #[inline]
    pub fn process(&mut self, input: f64, coeff: f64, damping: f64) -> f64 {
        self.low += coeff * self.band;
        let high = input - self.low - damping * self.band;
        self.band += coeff * high;
        self.low
    }

    pub fn is_finite(&self) -> bool {
        self.low.is_finite() && self.band.is_finite()
    }

    pub fn reset(&mut self) {
        *self = Self::default();
    }
}
