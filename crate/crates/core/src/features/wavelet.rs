//! Multilevel Daubechies-7 decomposition and its marginals (mDWT).
//!
//! Decimation follows the common convention: with half-sample symmetric
//! extension, a level maps `n` samples to `floor((n + F - 1) / 2)`
//! coefficients, `out[o] = sum_j h[j] * x[2o + 1 - j]`.

use crate::error::{Error, Result};

/// db7 decomposition low-pass filter.
pub const DB7_DEC_LO: [f64; 14] = [
    0.000_353_713_799_974_520_24,
    -0.001_801_640_704_047_490_8,
    0.000_429_577_972_921_366_5,
    0.012_550_998_556_099_84,
    -0.016_574_541_630_666_88,
    -0.038_029_936_935_014_41,
    0.080_612_609_151_083_08,
    0.071_309_219_266_830_26,
    -0.224_036_184_993_874_98,
    -0.143_906_003_928_564_98,
    0.469_782_287_405_193_1,
    0.729_132_090_846_235_1,
    0.396_539_319_481_917_3,
    0.077_852_054_085_009_18,
];

/// Quadrature-mirror high-pass: `g[k] = (-1)^(k+1) h[F-1-k]`.
pub fn db7_dec_hi() -> [f64; 14] {
    let mut g = [0.0; 14];
    for (k, v) in g.iter_mut().enumerate() {
        let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
        *v = sign * DB7_DEC_LO[13 - k];
    }
    g
}

fn symmetric_index(i: isize, n: usize) -> usize {
    let period = 2 * n as isize;
    let k = i.rem_euclid(period) as usize;
    if k < n {
        k
    } else {
        2 * n - 1 - k
    }
}

/// One analysis step: `(detail, approximation)` of `x`.
fn analysis_step(x: &[f64], lo: &[f64; 14], hi: &[f64; 14]) -> (Vec<f64>, Vec<f64>) {
    const F: usize = 14;
    let n = x.len();
    let out_len = (n + F - 1) / 2;
    // ext[k] = x[k - (F - 1)] under symmetric extension.
    let ext: Vec<f64> = (0..n + 2 * (F - 1))
        .map(|k| x[symmetric_index(k as isize - (F as isize - 1), n)])
        .collect();
    let mut detail = Vec::with_capacity(out_len);
    let mut approx = Vec::with_capacity(out_len);
    for o in 0..out_len {
        // sum_j h[j] x[2o + 1 - j] == sum_k h[F - 1 - k] ext[2o + 1 + k]
        let span = &ext[2 * o + 1..2 * o + 1 + F];
        let (mut d, mut a) = (0.0, 0.0);
        for k in 0..F {
            d += hi[F - 1 - k] * span[k];
            a += lo[F - 1 - k] * span[k];
        }
        detail.push(d);
        approx.push(a);
    }
    (detail, approx)
}

/// Returns `(details, approximation)` with `details[0]` the finest level.
pub fn wavedec(x: &[f64], levels: usize) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    if x.len() < DB7_DEC_LO.len() {
        return Err(Error::param(format!(
            "window of {} samples is shorter than the {}-tap wavelet",
            x.len(),
            DB7_DEC_LO.len()
        )));
    }
    if levels == 0 {
        return Err(Error::param("at least one decomposition level is required"));
    }
    let hi = db7_dec_hi();
    let mut approx = x.to_vec();
    let mut details = Vec::with_capacity(levels);
    for _ in 0..levels {
        let (d, a) = analysis_step(&approx, &DB7_DEC_LO, &hi);
        details.push(d);
        approx = a;
    }
    Ok((details, approx))
}

/// `[m_1, ..., m_L, m_A]`: summed absolute coefficients per detail level,
/// then of the deepest approximation.
pub fn mdwt_marginals(x: &[f64], levels: usize) -> Result<Vec<f64>> {
    let (details, approx) = wavedec(x, levels)?;
    let abs_sum = |c: &Vec<f64>| c.iter().map(|v| v.abs()).sum::<f64>();
    let mut out: Vec<f64> = details.iter().map(abs_sum).collect();
    out.push(abs_sum(&approx));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filter_is_orthonormal() {
        let h = DB7_DEC_LO;
        let g = db7_dec_hi();
        assert!((h.iter().sum::<f64>() - std::f64::consts::SQRT_2).abs() < 1e-12);
        assert!((h.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(g.iter().sum::<f64>().abs() < 1e-12);
        for shift in (2..14).step_by(2) {
            let dot: f64 = (0..14 - shift).map(|k| h[k] * h[k + shift]).sum();
            assert!(dot.abs() < 1e-12, "shift {shift}");
        }
    }

    #[test]
    fn coefficient_lengths() {
        let (d, a) = wavedec(&[0.0; 256], 3).unwrap();
        let lens: Vec<usize> = d.iter().map(Vec::len).collect();
        assert_eq!(lens, vec![134, 73, 43]);
        assert_eq!(a.len(), 43);
    }

    #[test]
    fn constants_have_no_detail() {
        let m = mdwt_marginals(&[3.5; 64], 3).unwrap();
        for v in &m[..3] {
            assert!(v.abs() < 1e-9, "{m:?}");
        }
        assert!(m[3] > 0.0);
    }

    #[test]
    fn marginals_scale_linearly() {
        let x: Vec<f64> = (0..100).map(|t| (t as f64 * 0.37).sin() + 0.01 * t as f64).collect();
        let doubled: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let (m1, m2) = (mdwt_marginals(&x, 3).unwrap(), mdwt_marginals(&doubled, 3).unwrap());
        for (a, b) in m1.iter().zip(&m2) {
            assert!((2.0 * a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn too_short_window() {
        assert!(mdwt_marginals(&[1.0; 13], 3).is_err());
    }

    #[test]
    fn symmetric_extension_indexing() {
        assert_eq!(symmetric_index(-1, 5), 0);
        assert_eq!(symmetric_index(-2, 5), 1);
        assert_eq!(symmetric_index(5, 5), 4);
        assert_eq!(symmetric_index(6, 5), 3);
        assert_eq!(symmetric_index(2, 5), 2);
    }
}
