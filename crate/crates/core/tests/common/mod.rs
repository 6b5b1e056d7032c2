#![allow(dead_code)]

pub mod hands;

use std::f64::consts::PI;
use std::time::Duration;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use wandsynth_core::dsp::{render_offline, DspConfig};
use wandsynth_core::{SynthParams, VoiceParams};

pub const SR: f64 = 48_000.0;

pub fn voice(freq: f64, amp: f64, cutoff: f64, rt60: f64) -> VoiceParams {
    VoiceParams {
        freq,
        amp,
        cutoff,
        rt60,
        active: amp > 0.0,
    }
}

pub fn silent() -> VoiceParams {
    VoiceParams {
        freq: 440.0,
        amp: 0.0,
        cutoff: 1000.0,
        rt60: 1.0,
        active: false,
    }
}

/// Renders constant params and returns the mono mix.
pub fn render_constant(params: SynthParams, seconds: f64, cfg: &DspConfig) -> Vec<f64> {
    let stereo = render_offline(&[(Duration::ZERO, params)], Duration::from_secs_f64(seconds), cfg)
        .expect("render");
    mono(&stereo)
}

pub fn mono(stereo: &[f32]) -> Vec<f64> {
    stereo
        .chunks_exact(2)
        .map(|f| 0.5 * (f[0] as f64 + f[1] as f64))
        .collect()
}

pub fn rms(x: &[f64]) -> f64 {
    (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
}

/// Hann-windowed, zero-padded magnitude spectrum. Returns (bin width Hz, |X|).
pub fn spectrum(x: &[f64], sr: f64, pad: usize) -> (f64, Vec<f64>) {
    let n = (x.len() * pad).next_power_of_two();
    let len = x.len() as f64;
    let mut buf: Vec<Complex<f64>> = x
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let w = 0.5 - 0.5 * (2.0 * PI * i as f64 / (len - 1.0)).cos();
            Complex::new(v * w, 0.0)
        })
        .collect();
    buf.resize(n, Complex::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let mags = buf[..n / 2].iter().map(|c| c.norm()).collect();
    (sr / n as f64, mags)
}

/// Strongest spectral peak above `min_hz`, refined by parabolic
/// interpolation on log magnitude.
pub fn peak_frequency(x: &[f64], sr: f64, min_hz: f64) -> f64 {
    let (df, mags) = spectrum(x, sr, 4);
    let start = (min_hz / df).ceil() as usize;
    let (k, _) = mags
        .iter()
        .enumerate()
        .skip(start.max(1))
        .take(mags.len() - start.max(1) - 1)
        .fold((0, 0.0), |best, (i, &m)| if m > best.1 { (i, m) } else { best });
    let (a, b, c) = (mags[k - 1].ln(), mags[k].ln(), mags[k + 1].ln());
    let offset = 0.5 * (a - c) / (a - 2.0 * b + c);
    (k as f64 + offset) * df
}

pub fn spectral_centroid(x: &[f64], sr: f64) -> f64 {
    let (df, mags) = spectrum(x, sr, 1);
    let num: f64 = mags.iter().enumerate().map(|(i, m)| i as f64 * df * m).sum();
    num / mags.iter().sum::<f64>()
}

/// Fraction of spectral power below `band_hz` farther than `tol_hz` from
/// every harmonic of every frequency in `fundamentals`.
pub fn inharmonic_fraction(x: &[f64], sr: f64, fundamentals: &[f64], tol_hz: f64, band_hz: f64) -> f64 {
    let (df, mags) = spectrum(x, sr, 1);
    let mut total = 0.0;
    let mut outside = 0.0;
    for (i, m) in mags.iter().enumerate().skip(1) {
        let f = i as f64 * df;
        if f > band_hz {
            break;
        }
        let p = m * m;
        total += p;
        let near = fundamentals.iter().any(|&f0| {
            let h = (f / f0).round().max(1.0);
            (f - h * f0).abs() <= tol_hz
        });
        if !near {
            outside += p;
        }
    }
    outside / total
}

/// RT60 from Schroeder backward integration, fitted over -5..-25 dB of the
/// energy decay curve and extrapolated to -60 dB.
pub fn schroeder_rt60(ir: &[f64], sr: f64) -> f64 {
    let mut edc = vec![0.0; ir.len()];
    let mut acc = 0.0;
    for i in (0..ir.len()).rev() {
        acc += ir[i] * ir[i];
        edc[i] = acc;
    }
    let total = edc[0];
    let db: Vec<f64> = edc.iter().map(|e| 10.0 * (e / total).log10()).collect();
    let start = db.iter().position(|&d| d <= -5.0).expect("decays 5 dB");
    let end = db.iter().position(|&d| d <= -25.0).expect("decays 25 dB");
    // least-squares slope in dB per second
    let pts: Vec<(f64, f64)> = (start..=end).map(|i| (i as f64 / sr, db[i])).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    -60.0 / (sxy / sxx)
}

/// Gain in dB of `signal` relative to `reference` by RMS.
pub fn gain_db(signal: &[f64], reference: &[f64]) -> f64 {
    20.0 * (rms(signal) / rms(reference)).log10()
}

pub fn sine(freq: f64, sr: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| (2.0 * PI * freq * i as f64 / sr).sin()).collect()
}

