//! One-way ANOVA, Levene, Wilcoxon signed-rank and paired t.

use super::special::{f_sf, normal_sf, t_two_sided};
use super::{Alternative, Df, Method, TestResult};
use crate::error::{Error, Result};

/// Largest `n` evaluated exactly by [`WilcoxonMode::Auto`].
pub const EXACT_WILCOXON_MAX_N: usize = 20;

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn check_groups(groups: &[Vec<f64>]) -> Result<()> {
    if groups.len() < 2 {
        return Err(Error::param(format!("need at least 2 groups, got {}", groups.len())));
    }
    if let Some((i, g)) = groups.iter().enumerate().find(|(_, g)| g.len() < 2) {
        return Err(Error::param(format!("group {i} has {} value(s); at least 2 required", g.len())));
    }
    if groups.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::param("non-finite value in test input"));
    }
    Ok(())
}

fn f_test(groups: &[Vec<f64>], method: Method) -> Result<TestResult> {
    check_groups(groups)?;
    let k = groups.len();
    let n: usize = groups.iter().map(Vec::len).sum();
    let grand = groups.iter().flatten().sum::<f64>() / n as f64;
    let mut ssb = 0.0;
    let mut ssw = 0.0;
    for g in groups {
        let m = mean(g);
        ssb += g.len() as f64 * (m - grand).powi(2);
        ssw += g.iter().map(|v| (v - m).powi(2)).sum::<f64>();
    }
    let (d1, d2) = ((k - 1) as f64, (n - k) as f64);
    let df = Df::Pair(d1, d2);
    // Relative tolerance so round-off in identical groups reads as zero.
    let scale = groups.iter().flatten().map(|v| v * v).sum::<f64>().max(f64::MIN_POSITIVE);
    let ssb = if ssb <= scale * 1e-28 { 0.0 } else { ssb };
    if ssw <= scale * 1e-28 {
        let (statistic, p) = if ssb > 0.0 { (f64::INFINITY, 0.0) } else { (0.0, 1.0) };
        return Ok(TestResult::degenerate(method, statistic, p, df, n));
    }
    let f = (ssb / d1) / (ssw / d2);
    Ok(TestResult::new(method, f, f_sf(f, d1, d2)?, df, n, Alternative::Greater))
}

/// One-way ANOVA F test.
pub fn anova_oneway(groups: &[Vec<f64>]) -> Result<TestResult> {
    f_test(groups, Method::AnovaF)
}

/// Mean-centred Levene test: ANOVA on `|x_ij - mean_i|`.
pub fn levene(groups: &[Vec<f64>]) -> Result<TestResult> {
    check_groups(groups)?;
    let z: Vec<Vec<f64>> = groups
        .iter()
        .map(|g| {
            let m = mean(g);
            g.iter().map(|v| (v - m).abs()).collect()
        })
        .collect();
    f_test(&z, Method::Levene)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WilcoxonMode {
    /// Exact for `n <= 20`, normal approximation above.
    #[default]
    Auto,
    Exact,
    Normal,
}

/// Average ranks (1-based) of `|d|`, with tie-group sizes.
fn abs_ranks(d: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..d.len()).collect();
    order.sort_by(|&i, &j| d[i].abs().total_cmp(&d[j].abs()));
    let mut ranks = vec![0.0; d.len()];
    let mut ties = vec![];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && d[order[end]].abs() == d[order[start]].abs() {
            end += 1;
        }
        let avg = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = avg;
        }
        ties.push(end - start);
        start = end;
    }
    (ranks, ties)
}

/// Null distribution of `2V` over all `2^n` sign assignments, as counts
/// indexed by the doubled rank sum.
fn doubled_rank_sum_counts(ranks: &[f64]) -> Vec<f64> {
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let total: usize = doubled.iter().sum();
    let mut counts = vec![0.0; total + 1];
    counts[0] = 1.0;
    let mut reach = 0;
    for &r in &doubled {
        for s in (0..=reach).rev() {
            if counts[s] > 0.0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    counts
}

fn wilcoxon_exact_p(ranks: &[f64], v: f64, alternative: Alternative) -> f64 {
    let counts = doubled_rank_sum_counts(ranks);
    let total: f64 = counts.iter().sum();
    let observed = (2.0 * v).round() as usize;
    let lower: f64 = counts[..=observed].iter().sum::<f64>() / total;
    let upper: f64 = counts[observed..].iter().sum::<f64>() / total;
    match alternative {
        Alternative::Greater => upper,
        Alternative::Less => lower,
        Alternative::TwoSided => (2.0 * lower.min(upper)).min(1.0),
    }
}

fn wilcoxon_normal_p(n: usize, ties: &[usize], v: f64, alternative: Alternative) -> f64 {
    let nf = n as f64;
    let mu = nf * (nf + 1.0) / 4.0;
    let tie_term: f64 = ties.iter().map(|&t| (t as f64).powi(3) - t as f64).sum::<f64>() / 48.0;
    let sd = (nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term).sqrt();
    if sd == 0.0 {
        return 1.0;
    }
    match alternative {
        Alternative::Greater => normal_sf((v - mu - 0.5) / sd),
        Alternative::Less => normal_sf((mu - v - 0.5) / sd),
        Alternative::TwoSided => (2.0 * normal_sf(((v - mu).abs() - 0.5).max(0.0) / sd)).min(1.0),
    }
}

/// Wilcoxon signed-rank test on `a - b`; zero differences are dropped.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64], alternative: Alternative, mode: WilcoxonMode) -> Result<TestResult> {
    let d = paired_differences(a, b)?;
    let nonzero: Vec<f64> = d.into_iter().filter(|v| *v != 0.0).collect();
    let n = nonzero.len();
    if n == 0 {
        let mut r = TestResult::degenerate(Method::WilcoxonSr, 0.0, 1.0, Df::None, 0);
        r.alternative = alternative;
        return Ok(r);
    }
    let (ranks, ties) = abs_ranks(&nonzero);
    let v: f64 = nonzero.iter().zip(&ranks).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();
    let exact = match mode {
        WilcoxonMode::Auto => n <= EXACT_WILCOXON_MAX_N,
        WilcoxonMode::Exact => true,
        WilcoxonMode::Normal => false,
    };
    let p = if exact {
        wilcoxon_exact_p(&ranks, v, alternative)
    } else {
        wilcoxon_normal_p(n, &ties, v, alternative)
    };
    Ok(TestResult::new(Method::WilcoxonSr, v, p, Df::None, n, alternative))
}

fn paired_differences(a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    if a.len() != b.len() {
        return Err(Error::param(format!("paired samples differ in length: {} vs {}", a.len(), b.len())));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::param("non-finite value in test input"));
    }
    Ok(a.iter().zip(b).map(|(x, y)| x - y).collect())
}

/// Paired t test on `a - b`.
pub fn paired_t(a: &[f64], b: &[f64], alternative: Alternative) -> Result<TestResult> {
    let d = paired_differences(a, b)?;
    let n = d.len();
    if n < 2 {
        return Err(Error::param(format!("paired t needs at least 2 pairs, got {n}")));
    }
    let m = mean(&d);
    let sd = (d.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
    let df = Df::Single((n - 1) as f64);
    if sd <= m.abs() * 1e-14 || sd == 0.0 {
        let statistic = if m == 0.0 { 0.0 } else { m.signum() * f64::INFINITY };
        let p = match alternative {
            _ if m == 0.0 => 1.0,
            Alternative::TwoSided => 0.0,
            Alternative::Greater => f64::from(u8::from(m < 0.0)),
            Alternative::Less => f64::from(u8::from(m > 0.0)),
        };
        let mut r = TestResult::degenerate(Method::PairedT, statistic, p, df, n);
        r.alternative = alternative;
        return Ok(r);
    }
    let t = m / (sd / (n as f64).sqrt());
    let two = t_two_sided(t, (n - 1) as f64)?;
    let p = match alternative {
        Alternative::TwoSided => two,
        Alternative::Greater if t > 0.0 => two / 2.0,
        Alternative::Greater => 1.0 - two / 2.0,
        Alternative::Less if t < 0.0 => two / 2.0,
        Alternative::Less => 1.0 - two / 2.0,
    };
    Ok(TestResult::new(Method::PairedT, t, p, df, n, alternative))
}
