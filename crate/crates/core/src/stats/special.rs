//! Special functions behind the p-value engine.

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Gamma(x)` for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection keeps the approximation in its accurate range.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;
const MAX_ITER: usize = 10_000;

/// Modified Lentz evaluation of the incomplete-beta continued fraction.
fn beta_fraction(x: f64, a: f64, b: f64) -> f64 {
    let (qab, qap, qam) = (a + b, a + 1.0, a - 1.0);
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularised incomplete beta `I_x(a, b)`.
pub fn reg_incomplete_beta(x: f64, a: f64, b: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) || !(a > 0.0) || !(b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::param(format!("incomplete beta undefined at x={x}, a={a}, b={b}")));
    }
    if x == 0.0 || x == 1.0 {
        return Ok(x);
    }
    let front = (a * x.ln() + b * (1.0 - x).ln() - ln_beta(a, b)).exp();
    let value = if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_fraction(x, a, b) / a
    } else {
        1.0 - front * beta_fraction(1.0 - x, b, a) / b
    };
    Ok(value.clamp(0.0, 1.0))
}

/// Upper regularised incomplete gamma `Q(a, x)`.
pub fn reg_upper_gamma(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let log_front = a * x.ln() - x - ln_gamma(a);
    if x < a + 1.0 {
        // Series for P(a, x).
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut ap = a;
        for _ in 0..MAX_ITER {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * EPS {
                break;
            }
        }
        (1.0 - sum * log_front.exp()).clamp(0.0, 1.0)
    } else {
        // Continued fraction for Q(a, x).
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..MAX_ITER {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < TINY {
                d = TINY;
            }
            c = b + an / c;
            if c.abs() < TINY {
                c = TINY;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < EPS {
                break;
            }
        }
        (log_front.exp() * h).clamp(0.0, 1.0)
    }
}

pub fn erfc(x: f64) -> f64 {
    if x >= 0.0 {
        reg_upper_gamma(0.5, x * x)
    } else {
        2.0 - reg_upper_gamma(0.5, x * x)
    }
}

/// `P(Z > z)` for a standard normal `Z`.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

/// `P(F > f)` for `F ~ F(d1, d2)`.
pub fn f_sf(f: f64, d1: f64, d2: f64) -> Result<f64> {
    if !(d1 > 0.0 && d2 > 0.0) {
        return Err(Error::param(format!("F distribution needs positive df, got ({d1}, {d2})")));
    }
    if f <= 0.0 {
        return Ok(1.0);
    }
    if f.is_infinite() {
        return Ok(0.0);
    }
    reg_incomplete_beta(d2 / (d2 + d1 * f), d2 / 2.0, d1 / 2.0)
}

/// `P(|T| > |t|)` for `T ~ t(df)`.
pub fn t_two_sided(t: f64, df: f64) -> Result<f64> {
    if !(df > 0.0) {
        return Err(Error::param(format!("t distribution needs positive df, got {df}")));
    }
    if t.is_infinite() {
        return Ok(0.0);
    }
    reg_incomplete_beta(df / (df + t * t), df / 2.0, 0.5)
}

/// `P(T <= t)` for `T ~ t(df)`.
pub fn t_cdf(t: f64, df: f64) -> Result<f64> {
    let tail = 0.5 * t_two_sided(t, df)?;
    Ok(if t > 0.0 { 1.0 - tail } else { tail })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_at_integers_and_half() {
        let mut fact = 1.0f64;
        for n in 1..20 {
            assert!((ln_gamma(n as f64) - fact.ln()).abs() < 1e-12, "{n}");
            fact *= n as f64;
        }
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-13);
        assert!((ln_gamma(0.1) - 2.252_712_651_734_206).abs() < 1e-12);
    }

    #[test]
    fn incomplete_beta_trivial_cases() {
        for x in [0.0, 0.25, 1.0] {
            assert!((reg_incomplete_beta(x, 1.0, 1.0).unwrap() - x).abs() < 1e-14);
        }
        for a in [0.5, 2.0, 7.0] {
            assert!((reg_incomplete_beta(0.5, a, a).unwrap() - 0.5).abs() < 1e-12);
        }
        assert!(reg_incomplete_beta(1.5, 1.0, 1.0).is_err());
        assert!(reg_incomplete_beta(0.5, 0.0, 1.0).is_err());
    }

    #[test]
    fn incomplete_beta_binomial_identity() {
        // Integer a, b: I_x(a, b) = P(Bin(a + b - 1, x) >= a).
        let choose = |n: u32, k: u32| (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1));
        for (a, b) in [(2u32, 5u32), (1, 1), (3, 3), (10, 2), (7, 13)] {
            for x in [0.05f64, 0.3, 0.5, 0.77, 0.99] {
                let n = a + b - 1;
                let oracle: f64 = (a..=n).map(|j| choose(n, j) * x.powi(j as i32) * (1.0 - x).powi((n - j) as i32)).sum();
                let got = reg_incomplete_beta(x, f64::from(a), f64::from(b)).unwrap();
                assert!((got - oracle).abs() < 1e-12, "a={a} b={b} x={x}: {got} vs {oracle}");
            }
        }
    }

    #[test]
    fn erfc_reference_values() {
        // erfc(1) and erfc(0.5), 16 significant digits.
        assert!((erfc(1.0) - 0.157_299_207_050_285_13).abs() < 1e-14);
        assert!((erfc(0.5) - 0.479_500_122_186_953_5).abs() < 1e-14);
        assert!((erfc(-1.0) - 1.842_700_792_949_714_9).abs() < 1e-14);
        assert!((normal_sf(1.959_963_984_540_054) - 0.025).abs() < 1e-13);
        assert_eq!(normal_sf(0.0), 0.5);
    }

    #[test]
    fn t_tails() {
        // df = 1 is Cauchy: P(T <= t) = 1/2 + atan(t)/pi.
        for t in [-3.0, -0.5, 0.0, 1.0, 10.0] {
            let expected = 0.5 + f64::atan(t) / std::f64::consts::PI;
            assert!((t_cdf(t, 1.0).unwrap() - expected).abs() < 1e-12);
        }
        // df = 2: closed form P(T <= t) = 1/2 + t / (2 sqrt(2 + t^2)).
        for t in [-2.0f64, 0.3, 3.0] {
            let expected = 0.5 + t / (2.0 * (2.0 + t * t).sqrt());
            assert!((t_cdf(t, 2.0).unwrap() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn f_tail_matches_t_squared() {
        for (t, df) in [(1.3, 5.0), (2.5, 17.0), (0.2, 3.0)] {
            let via_f = f_sf(t * t, 1.0, df).unwrap();
            let via_t = t_two_sided(t, df).unwrap();
            assert!((via_f - via_t).abs() < 1e-12);
        }
        assert_eq!(f_sf(0.0, 2.0, 3.0).unwrap(), 1.0);
        // F(2, d2) tail has the closed form (1 + 2f/d2)^(-d2/2).
        for (f, d2) in [(1.0f64, 4.0f64), (3.5, 10.0)] {
            let expected = (1.0 + 2.0 * f / d2).powf(-d2 / 2.0);
            assert!((f_sf(f, 2.0, d2).unwrap() - expected).abs() < 1e-12);
        }
    }
}
