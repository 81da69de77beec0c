use emg_shift::stats::special::t_cdf;
use emg_shift::stats::{anova_oneway, wilcoxon_signed_rank, Alternative, WilcoxonMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Student t density for integer `nu`; the gamma ratio comes from
/// `G((v+1)/2) / G(v/2)` = `(v-1)/2 / previous`, starting at `1/sqrt(pi)`.
fn t_density(nu: u32) -> impl Fn(f64) -> f64 {
    let mut ratio = 1.0 / std::f64::consts::PI.sqrt();
    for v in 2..=nu {
        ratio = ((v - 1) as f64 / 2.0) / ratio;
    }
    let nu = f64::from(nu);
    let c = ratio / (nu * std::f64::consts::PI).sqrt();
    move |x| c * (1.0 + x * x / nu).powf(-(nu + 1.0) / 2.0)
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let h = (b - a) / intervals as f64;
    let inner: f64 = (1..intervals)
        .map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 })
        .sum();
    (f(a) + f(b) + inner) * h / 3.0
}

#[test]
fn t_cdf_matches_quadrature() {
    for nu in [1, 2, 3, 5, 8, 13, 30] {
        let density = t_density(nu);
        for t in [-6.0, -2.5, -1.0, -0.3, 0.0, 0.4, 1.7, 3.0, 9.0] {
            let want = 0.5 + simpson(&density, 0.0, t, 4000);
            let got = t_cdf(t, f64::from(nu)).unwrap();
            assert!((got - want).abs() < 1e-6, "nu={nu} t={t}: {got} vs {want}");
        }
    }
}

#[test]
fn anova_null_p_values_are_uniform() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut p: Vec<f64> = (0..1000)
        .map(|_| {
            let groups: Vec<Vec<f64>> = (0..3).map(|_| (0..8).map(|_| rng.sample(StandardNormal)).collect()).collect();
            anova_oneway(&groups).unwrap().p_value
        })
        .collect();
    p.sort_by(f64::total_cmp);
    let n = p.len() as f64;
    let d = p
        .iter()
        .enumerate()
        .map(|(i, &v)| (v - i as f64 / n).abs().max(((i + 1) as f64 / n - v).abs()))
        .fold(0.0, f64::max);
    // Kolmogorov-Smirnov critical value at alpha = 0.001.
    let critical = 1.949 / n.sqrt();
    assert!(d < critical, "D = {d}, critical {critical}");
}

#[test]
fn wilcoxon_normal_approximation_tracks_exact_at_twenty() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..200 {
        let shift = rng.random_range(-0.8..0.8);
        let a: Vec<f64> = (0..20).map(|_| rng.sample::<f64, _>(StandardNormal) + shift).collect();
        let b = vec![0.0; 20];
        for alt in [Alternative::TwoSided, Alternative::Greater, Alternative::Less] {
            let exact = wilcoxon_signed_rank(&a, &b, alt, WilcoxonMode::Exact).unwrap();
            let normal = wilcoxon_signed_rank(&a, &b, alt, WilcoxonMode::Normal).unwrap();
            assert_eq!(exact.statistic, normal.statistic);
            assert!((exact.p_value - normal.p_value).abs() < 0.01, "{exact:?} vs {normal:?}");
        }
    }
}
