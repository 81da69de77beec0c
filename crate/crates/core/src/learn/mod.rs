//! PCA and LDA, plus feature z-scoring and model (de)serialisation.

pub mod lda;
pub mod pca;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

pub use lda::{fit_lda, LdaModel, DEFAULT_LAMBDA};
pub use pca::{fit_pca, PcaModel};

/// Per-column z-scoring fitted on training features. Constant columns keep
/// scale 1 so they map to zero instead of NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureScaler {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl FeatureScaler {
    pub fn fit(x: &FeatureMatrix) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::param("cannot fit a scaler on zero rows"));
        }
        let mean = pca::column_means(x);
        let mut var = vec![0.0; x.dim()];
        for row in x.iter_rows() {
            for ((v, r), m) in var.iter_mut().zip(row).zip(&mean) {
                *v += (r - m) * (r - m);
            }
        }
        let n = x.rows() as f64;
        let std = var
            .into_iter()
            .map(|v| {
                let s = (v / n).sqrt();
                if s > 0.0 && s.is_finite() {
                    s
                } else {
                    1.0
                }
            })
            .collect();
        Ok(FeatureScaler { mean, std })
    }

    pub fn apply(&self, x: &mut FeatureMatrix) -> Result<()> {
        if x.dim() != self.mean.len() {
            return Err(Error::param(format!("scaler expects {} features, got {}", self.mean.len(), x.dim())));
        }
        let d = x.dim();
        for row in x.as_mut_slice().chunks_exact_mut(d.max(1)) {
            for ((v, m), s) in row.iter_mut().zip(&self.mean).zip(&self.std) {
                *v = (*v - m) / s;
            }
        }
        Ok(())
    }
}

/// JSON form of a fitted model; matrices are nested arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelDocument {
    Pca {
        mean: Vec<f64>,
        components: Vec<Vec<f64>>,
        explained_ratio: Vec<f64>,
        #[serde(default)]
        variances: Vec<f64>,
        variance_threshold: f64,
    },
    Lda {
        classes: Vec<u32>,
        class_means: Vec<Vec<f64>>,
        pooled_cov: Vec<Vec<f64>>,
        log_priors: Vec<f64>,
        lambda: f64,
    },
}

impl From<&PcaModel> for ModelDocument {
    fn from(m: &PcaModel) -> Self {
        ModelDocument::Pca {
            mean: m.mean.clone(),
            components: m.components.clone(),
            explained_ratio: m.explained_ratio.clone(),
            variances: m.variances.clone(),
            variance_threshold: m.variance_threshold,
        }
    }
}

impl From<&LdaModel> for ModelDocument {
    fn from(m: &LdaModel) -> Self {
        ModelDocument::Lda {
            classes: m.classes.clone(),
            class_means: m.class_means.clone(),
            pooled_cov: m.pooled_cov.chunks(m.dim()).map(<[f64]>::to_vec).collect(),
            log_priors: m.log_priors.clone(),
            lambda: m.lambda,
        }
    }
}

impl ModelDocument {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn into_pca(self) -> Result<PcaModel> {
        match self {
            ModelDocument::Pca {
                mean,
                components,
                explained_ratio,
                variances,
                variance_threshold,
            } => {
                if components.iter().any(|c| c.len() != mean.len()) || explained_ratio.len() != components.len() {
                    return Err(Error::param("inconsistent PCA parameter shapes"));
                }
                Ok(PcaModel {
                    mean,
                    components,
                    variances,
                    explained_ratio,
                    variance_threshold,
                })
            }
            ModelDocument::Lda { .. } => Err(Error::param("document holds an LDA model, not PCA")),
        }
    }

    pub fn into_lda(self) -> Result<LdaModel> {
        match self {
            ModelDocument::Lda {
                classes,
                class_means,
                pooled_cov,
                log_priors,
                lambda,
            } => {
                let d = pooled_cov.len();
                if pooled_cov.iter().any(|r| r.len() != d) {
                    return Err(Error::param("pooled covariance must be square"));
                }
                LdaModel::from_parts(classes, class_means, pooled_cov.concat(), log_priors, lambda)
            }
            ModelDocument::Pca { .. } => Err(Error::param("document holds a PCA model, not LDA")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data() -> FeatureMatrix {
        let rows: Vec<Vec<f64>> = (0..12)
            .map(|i| {
                let t = i as f64;
                vec![t.sin() + (i % 3) as f64 * 4.0, t.cos() * 2.0, 7.0, 0.1 * t]
            })
            .collect();
        let labels: Vec<u32> = (0..12).map(|i| (i % 3) as u32 + 1).collect();
        FeatureMatrix::from_rows(&rows, &labels).unwrap()
    }

    #[test]
    fn scaler_standardises_and_keeps_constants_finite() {
        let mut x = data();
        let s = FeatureScaler::fit(&x).unwrap();
        s.apply(&mut x).unwrap();
        assert!(x.is_finite());
        for j in [0, 1, 3] {
            let col: Vec<f64> = x.iter_rows().map(|r| r[j]).collect();
            let mean = col.iter().sum::<f64>() / 12.0;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 12.0;
            assert!(mean.abs() < 1e-12 && (var - 1.0).abs() < 1e-12);
        }
        assert!(x.iter_rows().all(|r| r[2] == 0.0));
    }

    #[test]
    fn pca_json_round_trip() {
        let m = fit_pca(&data(), 0.95).unwrap();
        let json = ModelDocument::from(&m).to_json().unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["kind"], "pca");
        for key in ["mean", "components", "explained_ratio"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(ModelDocument::from_json(&json).unwrap().into_pca().unwrap(), m);
    }

    #[test]
    fn lda_json_round_trip_predicts_identically() {
        let x = data();
        let m = fit_lda(&x, DEFAULT_LAMBDA).unwrap();
        let json = ModelDocument::from(&m).to_json().unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["kind"], "lda");
        for key in ["class_means", "pooled_cov", "log_priors", "lambda"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        let back = ModelDocument::from_json(&json).unwrap().into_lda().unwrap();
        assert_eq!(back, m);
        for row in x.iter_rows() {
            assert_eq!(back.scores(row).unwrap(), m.scores(row).unwrap());
        }
        assert!(ModelDocument::from_json(&json).unwrap().into_pca().is_err());
    }
}
