//! Classical sEMG feature sets.
//!
//! Every set is a fixed list of per-channel primitives; a window's feature
//! vector concatenates the per-channel blocks in channel order, so extraction
//! commutes with channel selection.
//!
//! | key       | per channel                                                    | dim |
//! |-----------|----------------------------------------------------------------|-----|
//! | `td`      | MAV, WL, ZC, SSC                                               | 4   |
//! | `etd`     | TD + RMS, IAV, skewness, Hjorth mobility, Hjorth complexity    | 9   |
//! | `ninapro` | db7 mDWT marginals, 3 levels (m1, m2, m3, mA)                  | 4   |
//! | `sampen`  | SampEn(m, r), 4 AR cepstral coefficients, RMS, WL              | 7   |

pub mod autoregressive;
pub mod entropy;
pub mod time_domain;
pub mod wavelet;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SignalMatrix;

pub use autoregressive::{ar_levinson, cepstral_from_ar};
pub use entropy::sample_entropy;
pub use time_domain::{hudgins_primitives, Hudgins};
pub use wavelet::mdwt_marginals;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureSet {
    Td,
    Etd,
    #[serde(rename = "ninapro")]
    NinaPro,
    #[serde(rename = "sampen")]
    SampEn,
}

impl FeatureSet {
    pub const ALL: [FeatureSet; 4] = [FeatureSet::Td, FeatureSet::Etd, FeatureSet::NinaPro, FeatureSet::SampEn];

    pub fn key(self) -> &'static str {
        match self {
            FeatureSet::Td => "td",
            FeatureSet::Etd => "etd",
            FeatureSet::NinaPro => "ninapro",
            FeatureSet::SampEn => "sampen",
        }
    }

    /// Display name used in report tables.
    pub fn title(self) -> &'static str {
        match self {
            FeatureSet::Td => "TD",
            FeatureSet::Etd => "ETD",
            FeatureSet::NinaPro => "NinaPro",
            FeatureSet::SampEn => "SampEn",
        }
    }

    pub fn per_channel_dim(self) -> usize {
        match self {
            FeatureSet::Td => 4,
            FeatureSet::Etd => 9,
            FeatureSet::NinaPro => 4,
            FeatureSet::SampEn => 7,
        }
    }

    /// Appends this set's primitives for one channel window to `out`.
    pub fn extract_channel(self, x: &[f64], params: &FeatureParams, out: &mut Vec<f64>) -> Result<()> {
        match self {
            FeatureSet::Td => {
                let h = hudgins_primitives(x, params.zc_threshold)?;
                out.extend_from_slice(&[h.mav, h.wl, f64::from(h.zc), f64::from(h.ssc)]);
            }
            FeatureSet::Etd => {
                let h = hudgins_primitives(x, params.zc_threshold)?;
                out.extend_from_slice(&[
                    h.mav,
                    h.wl,
                    f64::from(h.zc),
                    f64::from(h.ssc),
                    time_domain::rms(x),
                    time_domain::iav(x),
                    time_domain::skewness(x),
                    time_domain::hjorth_mobility(x),
                    time_domain::hjorth_complexity(x),
                ]);
            }
            FeatureSet::NinaPro => {
                out.extend(mdwt_marginals(x, params.dwt_levels)?);
            }
            FeatureSet::SampEn => {
                let se = sample_entropy(x, params.sampen_m, params.sampen_r)?;
                let ar = ar_levinson(x, params.ar_order)?;
                out.push(se);
                out.extend(cepstral_from_ar(&ar));
                out.push(time_domain::rms(x));
                out.push(time_domain::waveform_length(x));
            }
        }
        Ok(())
    }

    /// Feature vector of samples `start..start + len` of every channel.
    pub fn extract_span(self, samples: &SignalMatrix, start: usize, len: usize, params: &FeatureParams, out: &mut Vec<f64>) -> Result<()> {
        if start + len > samples.len() {
            return Err(Error::Range {
                what: "window end",
                index: start + len,
                limit: samples.len(),
            });
        }
        for ch in samples.iter_channels() {
            self.extract_channel(&ch[start..start + len], params, out)?;
        }
        Ok(())
    }

    pub fn extract(self, window: &SignalMatrix, params: &FeatureParams) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(self.per_channel_dim() * window.channels());
        self.extract_span(window, 0, window.len(), params, &mut out)?;
        Ok(out)
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for FeatureSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FeatureSet::ALL
            .into_iter()
            .find(|f| f.key().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::param(format!("unknown feature set {s:?} (expected td, etd, ninapro or sampen)")))
    }
}

/// Tunables shared by all feature sets. None of these are fixed by the
/// protocol; the defaults are the usual literature choices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureParams {
    /// Dead zone for ZC and SSC, in standardised units.
    pub zc_threshold: f64,
    pub sampen_m: usize,
    /// SampEn tolerance as a fraction of the window's standard deviation.
    pub sampen_r: f64,
    pub ar_order: usize,
    pub dwt_levels: usize,
}

impl Default for FeatureParams {
    fn default() -> Self {
        FeatureParams {
            zc_threshold: 0.01,
            sampen_m: 2,
            sampen_r: 0.2,
            ar_order: 4,
            dwt_levels: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub feature_set: FeatureSet,
    pub channels: usize,
    pub label: u32,
}

impl FeatureVector {
    pub fn extract(window: &crate::model::LabeledWindow, set: FeatureSet, params: &FeatureParams) -> Result<Self> {
        Ok(FeatureVector {
            values: set.extract(&window.samples, params)?,
            feature_set: set,
            channels: window.samples.channels(),
            label: window.gesture,
        })
    }
}

/// Row-major `N x d` feature matrix with one label per row.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureMatrix {
    dim: usize,
    data: Vec<f64>,
    labels: Vec<u32>,
}

impl FeatureMatrix {
    pub fn new(dim: usize) -> Self {
        FeatureMatrix {
            dim,
            data: Vec::new(),
            labels: Vec::new(),
        }
    }

    pub fn from_rows(rows: &[Vec<f64>], labels: &[u32]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        let mut m = FeatureMatrix::new(dim);
        if rows.len() != labels.len() {
            return Err(Error::param("one label per row required"));
        }
        for (r, &l) in rows.iter().zip(labels) {
            m.push(r, l)?;
        }
        Ok(m)
    }

    pub fn push(&mut self, row: &[f64], label: u32) -> Result<()> {
        if row.len() != self.dim {
            return Err(Error::param(format!("row has {} features, expected {}", row.len(), self.dim)));
        }
        self.data.extend_from_slice(row);
        self.labels.push(label);
        Ok(())
    }

    pub fn append(&mut self, mut other: FeatureMatrix) -> Result<()> {
        if other.is_empty() {
            return Ok(());
        }
        if self.is_empty() && self.dim != other.dim {
            self.dim = other.dim;
        }
        if other.dim != self.dim {
            return Err(Error::param(format!("cannot append {}-d rows to a {}-d matrix", other.dim, self.dim)));
        }
        self.data.append(&mut other.data);
        self.labels.append(&mut other.labels);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.rows()).map(move |i| self.row(i))
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn labels_mut(&mut self) -> &mut [u32] {
        &mut self.labels
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Column subset `cols`, in that order.
    pub fn select_columns(&self, cols: &[usize]) -> FeatureMatrix {
        let mut data = Vec::with_capacity(self.rows() * cols.len());
        for row in self.iter_rows() {
            data.extend(cols.iter().map(|&c| row[c]));
        }
        FeatureMatrix {
            dim: cols.len(),
            data,
            labels: self.labels.clone(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn window(rows: &[Vec<f64>]) -> SignalMatrix {
        SignalMatrix::from_rows(rows).unwrap()
    }

    fn noise(len: usize, seed: u64) -> Vec<f64> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    #[test]
    fn registry_round_trip() {
        for f in FeatureSet::ALL {
            assert_eq!(f.key().parse::<FeatureSet>().unwrap(), f);
            let json = serde_json::to_string(&f).unwrap();
            assert_eq!(json, format!("\"{}\"", f.key()));
        }
        assert!("fft".parse::<FeatureSet>().is_err());
    }

    #[test]
    fn dimensions() {
        let w = window(&(0..8).map(|s| noise(256, s)).collect::<Vec<_>>());
        let p = FeatureParams::default();
        let dims: Vec<usize> = FeatureSet::ALL.iter().map(|f| f.extract(&w, &p).unwrap().len()).collect();
        assert_eq!(dims, vec![32, 72, 32, 56]);
    }

    #[test]
    fn identical_channels_give_identical_blocks() {
        let x = noise(64, 1);
        let w = window(&[x.clone(), x]);
        for f in FeatureSet::ALL {
            let v = f.extract(&w, &FeatureParams::default()).unwrap();
            let d = f.per_channel_dim();
            assert_eq!(v[..d], v[d..]);
        }
    }

    #[test]
    fn channel_permutation_permutes_blocks() {
        let chans: Vec<Vec<f64>> = (0..3).map(|s| noise(64, s + 10)).collect();
        let perm = [2usize, 0, 1];
        let permuted: Vec<Vec<f64>> = perm.iter().map(|&i| chans[i].clone()).collect();
        for f in FeatureSet::ALL {
            let p = FeatureParams::default();
            let a = f.extract(&window(&chans), &p).unwrap();
            let b = f.extract(&window(&permuted), &p).unwrap();
            let d = f.per_channel_dim();
            for (slot, &src) in perm.iter().enumerate() {
                assert_eq!(b[slot * d..(slot + 1) * d], a[src * d..(src + 1) * d]);
            }
        }
    }

    #[test]
    fn zero_window_sampen_block() {
        let w = window(&[vec![0.0; 64]]);
        let v = FeatureSet::SampEn.extract(&w, &FeatureParams::default()).unwrap();
        // Constant window: every template matches, SampEn = 0; AR model is zero.
        assert_eq!(v, vec![0.0; 7]);
    }

    #[test]
    fn short_windows_error() {
        let p = FeatureParams::default();
        assert!(FeatureSet::Td.extract(&window(&[vec![1.0, 2.0]]), &p).is_err());
        assert!(FeatureSet::NinaPro.extract(&window(&[vec![1.0; 10]]), &p).is_err());
    }

    #[test]
    fn feature_matrix_shapes() {
        let mut m = FeatureMatrix::new(2);
        m.push(&[1.0, 2.0], 1).unwrap();
        assert!(m.push(&[1.0], 1).is_err());
        let mut other = FeatureMatrix::new(2);
        other.push(&[3.0, 4.0], 2).unwrap();
        m.append(other).unwrap();
        assert_eq!(m.rows(), 2);
        assert_eq!(m.row(1), &[3.0, 4.0]);
        assert_eq!(m.select_columns(&[1]).as_slice(), &[2.0, 4.0]);
    }
}
