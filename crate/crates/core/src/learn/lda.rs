//! Multiclass linear discriminant analysis with a ridge on the pooled
//! within-class covariance.

use nalgebra::{Cholesky, DMatrix, Dyn};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

/// Default ridge strength, relative to the mean eigenvalue of the pooled
/// covariance.
pub const DEFAULT_LAMBDA: f64 = 1e-6;

pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct LdaModel {
    /// Class labels in ascending order; index `g` addresses every per-class array.
    pub classes: Vec<u32>,
    pub class_means: Vec<Vec<f64>>,
    /// Regularised pooled covariance, row-major `d x d`.
    pub pooled_cov: Vec<f64>,
    pub log_priors: Vec<f64>,
    pub lambda: f64,
    /// `Sigma^-1 mu_g`, one row per class.
    weights: Vec<Vec<f64>>,
    /// `-mu_g' Sigma^-1 mu_g / 2 + ln pi_g`.
    offsets: Vec<f64>,
}

impl PartialEq for LdaModel {
    fn eq(&self, other: &Self) -> bool {
        self.classes == other.classes
            && self.class_means == other.class_means
            && self.pooled_cov == other.pooled_cov
            && self.log_priors == other.log_priors
            && self.lambda == other.lambda
    }
}

pub fn fit_lda(x: &FeatureMatrix, lambda: f64) -> Result<LdaModel> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::param(format!("lambda must be non-negative, got {lambda}")));
    }
    if x.dim() == 0 {
        return Err(Error::param("LDA needs at least one feature"));
    }
    if !x.is_finite() {
        return Err(Error::param("LDA training data contains non-finite values"));
    }
    let mut classes: Vec<u32> = x.labels().to_vec();
    classes.sort_unstable();
    classes.dedup();
    let d = x.dim();
    let g = classes.len();
    let index_of = |label: u32| classes.binary_search(&label).expect("label collected above");

    let mut counts = vec![0usize; g];
    let mut means = vec![vec![0.0; d]; g];
    for (row, &label) in x.iter_rows().zip(x.labels()) {
        let c = index_of(label);
        counts[c] += 1;
        means[c].iter_mut().zip(row).for_each(|(m, v)| *m += v);
    }
    for (c, &n) in counts.iter().enumerate() {
        if n < 2 {
            return Err(Error::param(format!(
                "class {} has {n} training sample(s); LDA needs at least 2 per class",
                classes[c]
            )));
        }
        means[c].iter_mut().for_each(|m| *m /= n as f64);
    }

    let n = x.rows();
    let centred = DMatrix::from_fn(n, d, |i, j| x.row(i)[j] - means[index_of(x.labels()[i])][j]);
    let mut cov = centred.tr_mul(&centred) / (n - g) as f64;
    cov = (&cov + cov.transpose()) * 0.5;
    let trace = cov.trace();
    let ridge = lambda * if trace > 0.0 { trace / d as f64 } else { 1.0 };
    for i in 0..d {
        cov[(i, i)] += ridge;
    }
    let log_priors = counts.iter().map(|&c| (c as f64 / n as f64).ln()).collect();
    let pooled_cov = (0..d).flat_map(|i| (0..d).map(move |j| (i, j))).map(|(i, j)| cov[(i, j)]).collect();
    LdaModel::from_parts(classes, means, pooled_cov, log_priors, lambda)
}

impl LdaModel {
    /// Rebuilds the discriminant from stored parameters.
    pub fn from_parts(classes: Vec<u32>, class_means: Vec<Vec<f64>>, pooled_cov: Vec<f64>, log_priors: Vec<f64>, lambda: f64) -> Result<Self> {
        let g = classes.len();
        let d = class_means.first().map_or(0, Vec::len);
        if g == 0 || class_means.len() != g || log_priors.len() != g || class_means.iter().any(|m| m.len() != d) {
            return Err(Error::param("inconsistent LDA parameter shapes"));
        }
        if pooled_cov.len() != d * d {
            return Err(Error::param(format!("pooled covariance must be {d}x{d}")));
        }
        let cov = DMatrix::from_row_slice(d, d, &pooled_cov);
        let chol: Cholesky<f64, Dyn> = Cholesky::new(cov)
            .ok_or_else(|| Error::param("pooled covariance is not positive definite; increase lambda"))?;
        let mean_cols = DMatrix::from_fn(d, g, |i, c| class_means[c][i]);
        let solved = chol.solve(&mean_cols);
        let weights: Vec<Vec<f64>> = (0..g).map(|c| solved.column(c).iter().copied().collect()).collect();
        let offsets = (0..g)
            .map(|c| {
                let quad: f64 = weights[c].iter().zip(&class_means[c]).map(|(w, m)| w * m).sum();
                -0.5 * quad + log_priors[c]
            })
            .collect();
        Ok(LdaModel {
            classes,
            class_means,
            pooled_cov,
            log_priors,
            lambda,
            weights,
            offsets,
        })
    }

    pub fn dim(&self) -> usize {
        self.class_means[0].len()
    }

    /// Discriminant score of every class.
    pub fn scores(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::param(format!("LDA expects {} features, got {}", self.dim(), x.len())));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("LDA input contains non-finite values"));
        }
        Ok(self
            .weights
            .iter()
            .zip(&self.offsets)
            .map(|(w, b)| w.iter().zip(x).map(|(p, q)| p * q).sum::<f64>() + b)
            .collect())
    }

    /// Highest-scoring label; ties go to the smallest label. Scores within
    /// `TIE_TOLERANCE` (relative) of each other count as tied, so a point
    /// on a boundary is not decided by round-off.
    pub fn predict(&self, x: &[f64]) -> Result<(u32, Vec<f64>)> {
        let scores = self.scores(x)?;
        let mut best = 0;
        for (i, s) in scores.iter().enumerate() {
            let margin = TIE_TOLERANCE * s.abs().max(scores[best].abs()).max(1.0);
            if *s > scores[best] + margin {
                best = i;
            }
        }
        Ok((self.classes[best], scores))
    }

    pub fn predict_all(&self, x: &FeatureMatrix) -> Result<Vec<u32>> {
        x.iter_rows().map(|r| self.predict(r).map(|(l, _)| l)).collect()
    }

    /// Fraction of rows whose predicted label equals the stored label.
    pub fn accuracy(&self, x: &FeatureMatrix) -> Result<f64> {
        if x.is_empty() {
            return Err(Error::param("cannot score an empty test set"));
        }
        let predicted = self.predict_all(x)?;
        let correct = predicted.iter().zip(x.labels()).filter(|(p, l)| p == l).count();
        Ok(correct as f64 / x.rows() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_blobs() -> FeatureMatrix {
        let offsets = [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)];
        let mut rows = vec![];
        let mut labels = vec![];
        for (cx, label) in [(0.0, 1), (10.0, 2)] {
            for (dx, dy) in offsets {
                rows.push(vec![cx + dx, dy]);
                labels.push(label);
            }
        }
        FeatureMatrix::from_rows(&rows, &labels).unwrap()
    }

    #[test]
    fn boundary_sits_between_symmetric_classes() {
        let m = fit_lda(&two_blobs(), DEFAULT_LAMBDA).unwrap();
        assert_eq!(m.predict(&[1.0, 0.0]).unwrap().0, 1);
        assert_eq!(m.predict(&[4.9, 0.0]).unwrap().0, 1);
        assert_eq!(m.predict(&[5.1, 0.0]).unwrap().0, 2);
        // Exactly on the boundary: tie goes to the smaller label.
        let (label, scores) = m.predict(&[5.0, 0.0]).unwrap();
        assert!((scores[0] - scores[1]).abs() < 1e-9);
        assert_eq!(label, 1);
    }

    #[test]
    fn rank_deficient_features_still_fit() {
        let base = two_blobs();
        let dup = base.select_columns(&[0, 1, 0, 1]);
        let m = fit_lda(&dup, DEFAULT_LAMBDA).unwrap();
        assert_eq!(m.accuracy(&dup).unwrap(), 1.0);
        assert!(fit_lda(&dup, 0.0).is_err());
    }

    #[test]
    fn too_few_samples_per_class() {
        let x = FeatureMatrix::from_rows(&[vec![0.0], vec![1.0], vec![5.0]], &[1, 1, 2]).unwrap();
        assert!(fit_lda(&x, DEFAULT_LAMBDA).is_err());
    }

    #[test]
    fn rejects_bad_queries() {
        let m = fit_lda(&two_blobs(), DEFAULT_LAMBDA).unwrap();
        assert!(m.predict(&[f64::NAN, 0.0]).is_err());
        assert!(m.predict(&[1.0]).is_err());
        assert!(fit_lda(&two_blobs(), -1.0).is_err());
    }

    #[test]
    fn fitting_is_deterministic() {
        let a = fit_lda(&two_blobs(), DEFAULT_LAMBDA).unwrap();
        let b = fit_lda(&two_blobs(), DEFAULT_LAMBDA).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.offsets, b.offsets);
    }

    /// Unregularised scores against an explicit cofactor inverse of the 3x3 pooled covariance.
    #[test]
    fn matches_textbook_lda_in_three_dimensions() {
        let rows = vec![
            vec![1.0, 2.0, 0.5],
            vec![2.0, 1.0, 1.5],
            vec![1.5, 2.5, -0.5],
            vec![0.2, 1.1, 0.9],
            vec![4.0, 0.0, 2.0],
            vec![5.5, 1.0, 3.5],
            vec![4.5, -1.0, 2.5],
            vec![6.0, 0.5, 1.0],
        ];
        let labels = [1, 1, 1, 1, 2, 2, 2, 2];
        let x = FeatureMatrix::from_rows(&rows, &labels).unwrap();
        let m = fit_lda(&x, 0.0).unwrap();

        let mean = |lo: usize, hi: usize| -> Vec<f64> {
            (0..3).map(|j| rows[lo..hi].iter().map(|r| r[j]).sum::<f64>() / (hi - lo) as f64).collect()
        };
        let mus = [mean(0, 4), mean(4, 8)];
        let mut s = [[0.0; 3]; 3];
        for (i, r) in rows.iter().enumerate() {
            let mu = &mus[i / 4];
            for a in 0..3 {
                for b in 0..3 {
                    s[a][b] += (r[a] - mu[a]) * (r[b] - mu[b]) / 6.0;
                }
            }
        }
        let det = s[0][0] * (s[1][1] * s[2][2] - s[1][2] * s[2][1]) - s[0][1] * (s[1][0] * s[2][2] - s[1][2] * s[2][0])
            + s[0][2] * (s[1][0] * s[2][1] - s[1][1] * s[2][0]);
        let mut inv = [[0.0; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                let (r0, r1) = ((b + 1) % 3, (b + 2) % 3);
                let (c0, c1) = ((a + 1) % 3, (a + 2) % 3);
                inv[a][b] = (s[r0][c0] * s[r1][c1] - s[r0][c1] * s[r1][c0]) / det;
            }
        }
        for q in [[0.0, 0.0, 0.0], [3.0, 1.0, 1.0], [-2.0, 4.0, 7.0]] {
            let got = m.scores(&q).unwrap();
            for c in 0..2 {
                let w: Vec<f64> = (0..3).map(|a| (0..3).map(|b| inv[a][b] * mus[c][b]).sum()).collect();
                let expected = w.iter().zip(&q).map(|(p, v)| p * v).sum::<f64>()
                    - 0.5 * w.iter().zip(&mus[c]).map(|(p, v)| p * v).sum::<f64>()
                    + 0.5f64.ln();
                assert!((got[c] - expected).abs() < 1e-9, "{got:?} vs {expected}");
            }
        }
    }
}
