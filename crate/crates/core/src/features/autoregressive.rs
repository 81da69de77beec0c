//! Autoregressive model fitting and the derived cepstral coefficients.

use crate::error::{Error, Result};

/// AR coefficients `a_1..a_p` under the convention
/// `x_t + sum_i a_i x_{t-i} = e_t`, by Levinson-Durbin recursion on the biased
/// autocorrelation. An all-zero window yields zero coefficients; if the
/// prediction error vanishes early the remaining coefficients stay zero.
pub fn ar_levinson(x: &[f64], order: usize) -> Result<Vec<f64>> {
    if order == 0 {
        return Err(Error::param("AR order must be at least 1"));
    }
    if x.len() <= order {
        return Err(Error::param(format!(
            "window of {} samples is too short for AR order {order}",
            x.len()
        )));
    }
    let n = x.len() as f64;
    let r: Vec<f64> = (0..=order)
        .map(|k| x[k..].iter().zip(x).map(|(a, b)| a * b).sum::<f64>() / n)
        .collect();
    let mut a = vec![0.0; order];
    if r[0] == 0.0 {
        return Ok(a);
    }
    let mut err = r[0];
    let mut prev = vec![0.0; order];
    for i in 0..order {
        let acc = r[i + 1] + (0..i).map(|j| a[j] * r[i - j]).sum::<f64>();
        let k = -acc / err;
        prev[..i].copy_from_slice(&a[..i]);
        a[i] = k;
        for j in 0..i {
            a[j] = prev[j] + k * prev[i - 1 - j];
        }
        err *= 1.0 - k * k;
        if err <= 0.0 {
            break;
        }
    }
    Ok(a)
}

/// Cepstral coefficients of the AR model:
/// `c_1 = -a_1`, `c_p = -a_p - sum_{l=1}^{p-1} (1 - l/p) a_l c_{p-l}`.
pub fn cepstral_from_ar(a: &[f64]) -> Vec<f64> {
    let mut c = Vec::with_capacity(a.len());
    for p in 1..=a.len() {
        let pf = p as f64;
        let tail: f64 = (1..p)
            .map(|l| (1.0 - l as f64 / pf) * a[l - 1] * c[p - l - 1])
            .sum();
        c.push(-a[p - 1] - tail);
    }
    c
}
