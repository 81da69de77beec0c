//! Amplitude and shape statistics of a single-channel window.
//!
//! Moments use population (biased) estimators.

use crate::error::{Error, Result};

/// Hudgins' four time-domain primitives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hudgins {
    /// Mean absolute value.
    pub mav: f64,
    /// Waveform length.
    pub wl: f64,
    /// Zero crossings.
    pub zc: u32,
    /// Slope sign changes.
    pub ssc: u32,
}

pub(crate) fn require_len(x: &[f64], min: usize) -> Result<()> {
    if x.len() < min {
        return Err(Error::param(format!(
            "window of {} samples is too short (need at least {min})",
            x.len()
        )));
    }
    Ok(())
}

/// `threshold` is the dead zone applied to zero crossings (amplitude jump)
/// and slope sign changes (product of the two slopes).
pub fn hudgins_primitives(x: &[f64], threshold: f64) -> Result<Hudgins> {
    require_len(x, 3)?;
    if !(threshold >= 0.0) {
        return Err(Error::param(format!("threshold must be non-negative, got {threshold}")));
    }
    let mav = mean_abs(x);
    let wl = waveform_length(x);
    let zc = x
        .windows(2)
        .filter(|p| p[0] * p[1] < 0.0 && (p[0] - p[1]).abs() >= threshold)
        .count() as u32;
    let ssc = x
        .windows(3)
        .filter(|p| (p[1] - p[0]) * (p[1] - p[2]) >= threshold)
        .count() as u32;
    Ok(Hudgins { mav, wl, zc, ssc })
}

pub fn mean_abs(x: &[f64]) -> f64 {
    iav(x) / x.len() as f64
}

/// Integrated absolute value.
pub fn iav(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

pub fn waveform_length(x: &[f64]) -> f64 {
    x.windows(2).map(|p| (p[1] - p[0]).abs()).sum()
}

pub fn rms(x: &[f64]) -> f64 {
    (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / x.len() as f64
}

fn diff(x: &[f64]) -> Vec<f64> {
    x.windows(2).map(|p| p[1] - p[0]).collect()
}

/// `m3 / m2^(3/2)`; zero for a constant window.
pub fn skewness(x: &[f64]) -> f64 {
    let m = mean(x);
    let n = x.len() as f64;
    let m2 = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n;
    if m2 == 0.0 {
        return 0.0;
    }
    let m3 = x.iter().map(|v| (v - m).powi(3)).sum::<f64>() / n;
    m3 / m2.powf(1.5)
}

/// `sqrt(var(dx) / var(x))`; zero when `var(x) = 0`.
pub fn hjorth_mobility(x: &[f64]) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    let vx = variance(x);
    if vx == 0.0 {
        return 0.0;
    }
    (variance(&diff(x)) / vx).sqrt()
}

/// `mobility(dx) / mobility(x)`; zero when `mobility(x) = 0`.
pub fn hjorth_complexity(x: &[f64]) -> f64 {
    let mx = hjorth_mobility(x);
    if mx == 0.0 {
        return 0.0;
    }
    hjorth_mobility(&diff(x)) / mx
}
