//! Sample entropy.
//!
//! `B` counts template pairs `i < j` of length `m` whose Chebyshev distance is
//! within `r`, `A` the same pairs extended to length `m + 1`; both use the
//! first `N - m` start positions. `SampEn = -ln(A / B)`, capped at
//! `-ln(2 / ((N - m)(N - m - 1)))` when either count is zero.
//!
//! Counting walks templates sorted by their first sample, so only pairs whose
//! leading samples are already within `r` are compared further.

use crate::error::{Error, Result};

/// Pair counts `(A, B)` for template length `m` and absolute tolerance `r`.
pub fn match_counts(x: &[f64], m: usize, r: f64) -> Result<(u64, u64)> {
    if m == 0 || x.len() <= m + 1 {
        return Err(Error::param(format!(
            "sample entropy needs m >= 1 and more than m + 1 = {} samples, got {}",
            m + 1,
            x.len()
        )));
    }
    let templates = x.len() - m;
    // Integer keys in total order; ties may land in any order.
    let mut order: Vec<u128> = (0..templates).map(|i| (u128::from(ordered_bits(x[i])) << 32) | i as u128).collect();
    order.sort_unstable();
    // Template `i` extended by its next sample, laid out in sorted order.
    let w = m + 1;
    let mut rows = Vec::with_capacity(templates * w);
    for &k in &order {
        let i = (k as u32) as usize;
        rows.extend_from_slice(&x[i..i + w]);
    }
    Ok(if m == 2 {
        let fixed: Vec<[f64; 3]> = rows.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
        count_pairs_m2(&fixed, r)
    } else {
        count_pairs(&rows, w, r)
    })
}

fn ordered_bits(v: f64) -> u64 {
    let b = v.to_bits();
    if b >> 63 == 1 {
        !b
    } else {
        b | (1 << 63)
    }
}

fn count_pairs_m2(rows: &[[f64; 3]], r: f64) -> (u64, u64) {
    let (mut a, mut b) = (0u64, 0u64);
    for (p, u) in rows.iter().enumerate() {
        for v in &rows[p + 1..] {
            if v[0] - u[0] > r {
                break;
            }
            let within = (u[1] - v[1]).abs() <= r;
            let extended = within & ((u[2] - v[2]).abs() <= r);
            b += u64::from(within);
            a += u64::from(extended);
        }
    }
    (a, b)
}

fn count_pairs(rows: &[f64], w: usize, r: f64) -> (u64, u64) {
    let m = w - 1;
    let (mut a, mut b) = (0u64, 0u64);
    let n = rows.len() / w;
    for p in 0..n {
        let u = &rows[p * w..(p + 1) * w];
        for q in p + 1..n {
            let v = &rows[q * w..(q + 1) * w];
            if v[0] - u[0] > r {
                break;
            }
            let within = (1..m).all(|k| (u[k] - v[k]).abs() <= r);
            b += u64::from(within);
            a += u64::from(within && (u[m] - v[m]).abs() <= r);
        }
    }
    (a, b)
}

/// Sample entropy with tolerance `r_factor * std(x)` (population std).
pub fn sample_entropy(x: &[f64], m: usize, r_factor: f64) -> Result<f64> {
    if !(r_factor >= 0.0) {
        return Err(Error::param("r_factor must be non-negative"));
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let sd = (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    let (a, b) = match_counts(x, m, r_factor * sd)?;
    Ok(entropy_from_counts(a, b, x.len(), m))
}

pub fn entropy_from_counts(a: u64, b: u64, len: usize, m: usize) -> f64 {
    if a == 0 || b == 0 {
        let t = (len - m) as f64;
        return (t * (t - 1.0) / 2.0).ln();
    }
    -(a as f64 / b as f64).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_signal_has_zero_entropy() {
        assert_eq!(sample_entropy(&[2.0; 50], 2, 0.2).unwrap(), 0.0);
        assert_eq!(sample_entropy(&[0.0; 50], 2, 0.2).unwrap(), 0.0);
    }

    #[test]
    fn no_matches_gives_cap() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        // std = sqrt(2); r = 0.5 * sqrt(2) < 1
        let (a, b) = match_counts(&x, 2, 0.5 * 2f64.sqrt()).unwrap();
        assert_eq!((a, b), (0, 0));
        let s = sample_entropy(&x, 2, 0.5).unwrap();
        assert!((s - 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn too_short() {
        assert!(sample_entropy(&[1.0, 2.0, 3.0], 2, 0.2).is_err());
        assert!(sample_entropy(&[1.0, 2.0, 3.0, 4.0], 0, 0.2).is_err());
    }

    fn brute_counts(x: &[f64], m: usize, r: f64) -> (u64, u64) {
        let n = x.len() - m;
        let (mut a, mut b) = (0, 0);
        for i in 0..n {
            for j in i + 1..n {
                if (0..m).all(|k| (x[i + k] - x[j + k]).abs() <= r) {
                    b += 1;
                    if (x[i + m] - x[j + m]).abs() <= r {
                        a += 1;
                    }
                }
            }
        }
        (a, b)
    }

    #[test]
    fn sorted_counting_matches_all_pairs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for m in 1..=3 {
            for _ in 0..20 {
                // Coarse quantisation forces plenty of exact ties.
                let x: Vec<f64> = (0..120).map(|_| (rng.random_range(-1.0..1.0f64) * 8.0).round() / 8.0).collect();
                for r in [0.0, 0.1, 0.25, 0.5] {
                    assert_eq!(match_counts(&x, m, r).unwrap(), brute_counts(&x, m, r), "m={m} r={r}");
                }
            }
        }
    }

    #[test]
    fn periodic_signal_counts() {
        // Period-3 sequence: templates repeat exactly every 3 samples.
        let x: Vec<f64> = (0..12).map(|t| (t % 3) as f64).collect();
        let (a, b) = match_counts(&x, 2, 0.1).unwrap();
        // 10 templates in 3 phase classes of sizes 4,3,3 -> C(4,2)+2*C(3,2) = 12.
        assert_eq!((a, b), (12, 12));
    }
}
