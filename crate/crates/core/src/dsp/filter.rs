//! Butterworth IIR design by bilinear transform, realised as cascaded
//! second-order sections.
//!
//! The band-stop design places its null exactly on the (prewarped) centre of
//! the requested band: the analog centre is `prewarp((f_low + f_high) / 2)`
//! and the analog bandwidth is `prewarp(f_high) - prewarp(f_low)`. The analog
//! band edges are then geometrically symmetric about the centre.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::SignalMatrix;

/// Coefficients of one normalised biquad (`a0 = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub a1: f64,
    pub a2: f64,
}

impl Biquad {
    /// Transfer function evaluated at `z = e^{j omega}`.
    pub fn response(&self, omega: f64) -> Complex64 {
        let z1 = Complex64::from_polar(1.0, -omega);
        let z2 = z1 * z1;
        (self.b0 + self.b1 * z1 + self.b2 * z2) / (1.0 + self.a1 * z1 + self.a2 * z2)
    }

    /// Roots of `z^2 + a1 z + a2`.
    pub fn poles(&self) -> [Complex64; 2] {
        let disc = Complex64::new(self.a1 * self.a1 - 4.0 * self.a2, 0.0).sqrt();
        [(-self.a1 + disc) / 2.0, (-self.a1 - disc) / 2.0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FilterKind {
    BandStop { f_low: f64, f_high: f64 },
    LowPass { cutoff: f64 },
    HighPass { cutoff: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiquadCascade {
    pub sections: Vec<Biquad>,
    pub fs: f64,
    pub kind: FilterKind,
    pub order: usize,
}

impl BiquadCascade {
    /// Complex frequency response at `freq_hz`.
    pub fn response(&self, freq_hz: f64) -> Complex64 {
        let omega = 2.0 * PI * freq_hz / self.fs;
        self.sections
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, s| acc * s.response(omega))
    }

    pub fn magnitude(&self, freq_hz: f64) -> f64 {
        self.response(freq_hz).norm()
    }

    pub fn poles(&self) -> Vec<Complex64> {
        self.sections.iter().flat_map(|s| s.poles()).collect()
    }

    pub fn is_stable(&self) -> bool {
        self.poles().iter().all(|p| p.norm() < 1.0)
    }

    /// Causal direct-form II transposed filtering from zero initial state.
    pub fn apply(&self, input: &[f64]) -> Vec<f64> {
        let mut out = input.to_vec();
        self.apply_in_place(&mut out);
        out
    }

    pub fn apply_in_place(&self, signal: &mut [f64]) {
        for s in &self.sections {
            let (mut z1, mut z2) = (0.0, 0.0);
            for x in signal.iter_mut() {
                let input = *x;
                let y = s.b0 * input + z1;
                z1 = s.b1 * input - s.a1 * y + z2;
                z2 = s.b2 * input - s.a2 * y;
                *x = y;
            }
        }
    }

    /// Filters every channel of `samples` independently.
    pub fn apply_matrix(&self, samples: &SignalMatrix) -> SignalMatrix {
        let mut out = samples.clone();
        for ch in 0..out.channels() {
            self.apply_in_place(out.channel_mut(ch));
        }
        out
    }
}

fn prewarp(f: f64, fs: f64) -> f64 {
    2.0 * fs * (PI * f / fs).tan()
}

fn bilinear(s: Complex64, fs: f64) -> Complex64 {
    let k = 2.0 * fs;
    (k + s) / (k - s)
}

/// Butterworth band-stop of total order `order` (even; `order / 2` biquads).
pub fn design_bandstop(fs: f64, f_low: f64, f_high: f64, order: usize) -> Result<BiquadCascade> {
    if !(fs.is_finite() && fs > 0.0) {
        return Err(Error::param(format!("sampling rate must be positive, got {fs}")));
    }
    if !(f_low > 0.0 && f_low < f_high && f_high < fs / 2.0) {
        return Err(Error::param(format!(
            "band-stop edges must satisfy 0 < f_low < f_high < fs/2, got {f_low}..{f_high} at fs={fs}"
        )));
    }
    if order < 2 || order % 2 != 0 {
        return Err(Error::param(format!("band-stop order must be even and >= 2, got {order}")));
    }
    let n = order / 2;
    let centre_hz = 0.5 * (f_low + f_high);
    let w0 = prewarp(centre_hz, fs);
    let bw = prewarp(f_high, fs) - prewarp(f_low, fs);

    // Each prototype pole p maps to the two roots of s^2 - (bw/p) s + w0^2.
    let mut poles = Vec::with_capacity(2 * n);
    for k in 0..n {
        let theta = PI * (2 * k + n + 1) as f64 / (2 * n) as f64;
        let p = Complex64::from_polar(1.0, theta);
        let half = bw / p / 2.0;
        let disc = (half * half - w0 * w0).sqrt();
        poles.push(bilinear(half + disc, fs));
        poles.push(bilinear(half - disc, fs));
    }

    let notch = 2.0 * PI * centre_hz / fs;
    let num = [1.0, -2.0 * notch.cos(), 1.0];
    let sections = pair_conjugates(poles)
        .into_iter()
        .map(|(a1, a2)| {
            // Unity gain at DC for every section.
            let gain = (1.0 + a1 + a2) / (num[0] + num[1] + num[2]);
            Biquad {
                b0: gain * num[0],
                b1: gain * num[1],
                b2: gain * num[2],
                a1,
                a2,
            }
        })
        .collect();
    Ok(BiquadCascade {
        sections,
        fs,
        kind: FilterKind::BandStop { f_low, f_high },
        order,
    })
}

/// Groups digital poles into real second-order denominators `(a1, a2)`.
fn pair_conjugates(mut poles: Vec<Complex64>) -> Vec<(f64, f64)> {
    const IMAG_EPS: f64 = 1e-12;
    let mut out = Vec::with_capacity(poles.len() / 2);
    let mut reals = Vec::new();
    poles.sort_by(|a, b| b.im.total_cmp(&a.im));
    for p in &poles {
        if p.im > IMAG_EPS {
            out.push((-2.0 * p.re, p.norm_sqr()));
        } else if p.im.abs() <= IMAG_EPS {
            reals.push(p.re);
        }
    }
    reals.sort_by(f64::total_cmp);
    for pair in reals.chunks(2) {
        match pair {
            [a, b] => out.push((-(a + b), a * b)),
            [a] => out.push((-a, 0.0)),
            _ => unreachable!(),
        }
    }
    out
}

/// Second-order Butterworth low-pass.
pub fn design_lowpass(fs: f64, cutoff: f64) -> Result<BiquadCascade> {
    let (k, norm) = second_order_terms(fs, cutoff)?;
    let b0 = k * k * norm;
    Ok(BiquadCascade {
        sections: vec![Biquad {
            b0,
            b1: 2.0 * b0,
            b2: b0,
            a1: 2.0 * (k * k - 1.0) * norm,
            a2: (1.0 - std::f64::consts::SQRT_2 * k + k * k) * norm,
        }],
        fs,
        kind: FilterKind::LowPass { cutoff },
        order: 2,
    })
}

/// Second-order Butterworth high-pass.
pub fn design_highpass(fs: f64, cutoff: f64) -> Result<BiquadCascade> {
    let (k, norm) = second_order_terms(fs, cutoff)?;
    Ok(BiquadCascade {
        sections: vec![Biquad {
            b0: norm,
            b1: -2.0 * norm,
            b2: norm,
            a1: 2.0 * (k * k - 1.0) * norm,
            a2: (1.0 - std::f64::consts::SQRT_2 * k + k * k) * norm,
        }],
        fs,
        kind: FilterKind::HighPass { cutoff },
        order: 2,
    })
}

fn second_order_terms(fs: f64, cutoff: f64) -> Result<(f64, f64)> {
    if !(fs > 0.0 && cutoff > 0.0 && cutoff < fs / 2.0) {
        return Err(Error::param(format!(
            "cutoff must satisfy 0 < f < fs/2, got {cutoff} at fs={fs}"
        )));
    }
    let k = (PI * cutoff / fs).tan();
    Ok((k, 1.0 / (1.0 + std::f64::consts::SQRT_2 * k + k * k)))
}
