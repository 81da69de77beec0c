//! Principal components analysis with explained-variance selection.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// `k` orthonormal rows of length `d`, by descending variance.
    pub components: Vec<Vec<f64>>,
    /// Variance of the training data along each kept component.
    pub variances: Vec<f64>,
    pub explained_ratio: Vec<f64>,
    pub variance_threshold: f64,
}

/// Column means of a row-major `n x d` block.
pub(crate) fn column_means(x: &FeatureMatrix) -> Vec<f64> {
    let mut mean = vec![0.0; x.dim()];
    for row in x.iter_rows() {
        mean.iter_mut().zip(row).for_each(|(m, v)| *m += v);
    }
    let n = x.rows() as f64;
    mean.iter_mut().for_each(|m| *m /= n);
    mean
}

pub(crate) fn centred(x: &FeatureMatrix, mean: &[f64]) -> DMatrix<f64> {
    let d = x.dim();
    DMatrix::from_fn(x.rows(), d, |i, j| x.row(i)[j] - mean[j])
}

/// Fits on `x`, keeping the fewest components whose cumulative explained
/// ratio reaches `threshold`.
pub fn fit_pca(x: &FeatureMatrix, threshold: f64) -> Result<PcaModel> {
    if x.rows() < 2 {
        return Err(Error::param(format!("PCA needs at least 2 samples, got {}", x.rows())));
    }
    if x.dim() == 0 {
        return Err(Error::param("PCA needs at least one feature"));
    }
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::param(format!("variance threshold must lie in (0, 1], got {threshold}")));
    }
    if !x.is_finite() {
        return Err(Error::param("PCA input contains non-finite values"));
    }
    let d = x.dim();
    let mean = column_means(x);
    let xc = centred(x, &mean);
    let mut cov = xc.tr_mul(&xc) / (x.rows() - 1) as f64;
    cov = (&cov + cov.transpose()) * 0.5;
    let eig = SymmetricEigen::new(cov);

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();
    let total: f64 = values.iter().sum();
    if total <= 0.0 {
        return Err(Error::param("PCA input has zero variance"));
    }

    // Minimal k with cumulative ratio >= threshold, tolerant to rounding at 1.0.
    let mut k = d;
    let mut cumulative = 0.0;
    for (i, v) in values.iter().enumerate() {
        cumulative += v / total;
        if cumulative >= threshold - 1e-12 {
            k = i + 1;
            break;
        }
    }

    let components = order[..k]
        .iter()
        .map(|&i| {
            let mut v: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
            let pivot = v.iter().copied().fold(0.0f64, |m, e| if e.abs() > m.abs() { e } else { m });
            if pivot < 0.0 {
                v.iter_mut().for_each(|e| *e = -*e);
            }
            v
        })
        .collect();
    Ok(PcaModel {
        mean,
        components,
        variances: values[..k].to_vec(),
        explained_ratio: values[..k].iter().map(|v| v / total).collect(),
        variance_threshold: threshold,
    })
}

impl PcaModel {
    pub fn input_dim(&self) -> usize {
        self.mean.len()
    }

    pub fn output_dim(&self) -> usize {
        self.components.len()
    }

    pub fn transform_row(&self, row: &[f64], out: &mut Vec<f64>) -> Result<()> {
        if row.len() != self.input_dim() {
            return Err(Error::param(format!(
                "PCA expects {} features, got {}",
                self.input_dim(),
                row.len()
            )));
        }
        out.extend(self.components.iter().map(|c| {
            c.iter().zip(row).zip(&self.mean).map(|((w, x), m)| w * (x - m)).sum::<f64>()
        }));
        Ok(())
    }

    /// Projects every row; labels are carried over.
    pub fn transform(&self, x: &FeatureMatrix) -> Result<FeatureMatrix> {
        let mut out = FeatureMatrix::new(self.output_dim());
        let mut buf = Vec::with_capacity(self.output_dim());
        for (row, &label) in x.iter_rows().zip(x.labels()) {
            buf.clear();
            self.transform_row(row, &mut buf)?;
            out.push(&buf, label)?;
        }
        Ok(out)
    }

    /// Maps projected rows back to feature space.
    pub fn inverse_row(&self, projected: &[f64]) -> Vec<f64> {
        let mut out = self.mean.clone();
        for (c, p) in self.components.iter().zip(projected) {
            out.iter_mut().zip(c).for_each(|(o, w)| *o += p * w);
        }
        out
    }
}
