//! One (condition, feature set) evaluation: subset treatment, channel
//! standardisation, windowing, features, optional z-score + PCA, LDA.
//!
//! Everything fitted (channel statistics, feature scaler, PCA, LDA) sees the
//! training partition only. [`LeakageAudit`] fingerprints every matrix handed
//! to a fitting routine and every test-side matrix so a run can prove the two
//! never meet.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::hash::Hasher;

use rayon::prelude::*;

use super::config::{Condition, ExperimentConfig, InputMode};
use crate::dsp::{central_segment, samples_for, window_starts, BiquadCascade, ChannelStats};
use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, FeatureParams, FeatureSet};
use crate::learn::{fit_lda, fit_pca, FeatureScaler};
use crate::model::{GridLayout, Recording, RecordingMeta, SignalMatrix};
use crate::shift::{central_subset, enumerate_subsets, ChannelSubset};

/// The filtered central interval of one recording, full grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub meta: RecordingMeta,
    pub samples: SignalMatrix,
}

impl AsRef<RecordingMeta> for Segment {
    fn as_ref(&self) -> &RecordingMeta {
        &self.meta
    }
}

impl Segment {
    /// Filters the whole recording (if a cascade is given), then keeps the
    /// central `central_s` seconds.
    pub fn from_recording(rec: &Recording, cascade: Option<&BiquadCascade>, central_s: f64) -> Result<Self> {
        let samples = match cascade {
            Some(c) => central_segment(&c.apply_matrix(&rec.samples), rec.fs, central_s)?,
            None => central_segment(&rec.samples, rec.fs, central_s)?,
        };
        Ok(Segment { meta: rec.meta, samples })
    }
}

/// Odd repetitions train, even repetitions test.
///
/// Every gesture must carry the same repetitions `1..=R`; gaps and
/// duplicates are protocol errors.
pub fn split_intrasession<T: AsRef<RecordingMeta>>(items: Vec<T>) -> Result<(Vec<T>, Vec<T>)> {
    if items.is_empty() {
        return Err(Error::protocol("session has no recordings"));
    }
    let mut reps: BTreeMap<u32, BTreeSet<u32>> = BTreeMap::new();
    for it in &items {
        let m = it.as_ref();
        if !reps.entry(m.gesture).or_default().insert(m.repetition) {
            return Err(Error::protocol(format!(
                "gesture {} repetition {} appears twice",
                m.gesture, m.repetition
            )));
        }
    }
    let max_rep = reps.values().filter_map(|r| r.last()).copied().max().unwrap_or(0);
    if max_rep < 2 {
        return Err(Error::protocol("at least two repetitions per gesture are required"));
    }
    let gaps: Vec<String> = reps
        .iter()
        .flat_map(|(g, have)| (1..=max_rep).filter(|r| !have.contains(r)).map(move |r| format!("gesture {g} repetition {r}")))
        .collect();
    if !gaps.is_empty() {
        return Err(Error::protocol(format!("missing recordings: {}", gaps.join(", "))));
    }
    Ok(items.into_iter().partition(|it| it.as_ref().repetition % 2 == 1))
}

/// Sample-level settings shared by every cell of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineSettings {
    pub layout: GridLayout,
    pub window: usize,
    pub stride: usize,
    pub column_offset: usize,
    pub features: FeatureParams,
    pub lda_lambda: f64,
    pub pca_threshold: f64,
}

impl PipelineSettings {
    pub fn from_config(cfg: &ExperimentConfig, layout: GridLayout, fs: f64) -> Result<Self> {
        let window = samples_for(cfg.window_ms / 1000.0, fs);
        let stride = samples_for(cfg.stride_ms / 1000.0, fs);
        if window == 0 || stride == 0 {
            return Err(Error::param("window and stride must cover at least one sample"));
        }
        Ok(PipelineSettings {
            layout,
            window,
            stride,
            column_offset: cfg.column_offset,
            features: cfg.features,
            lda_lambda: cfg.lda_lambda,
            pca_threshold: cfg.pca_threshold,
        })
    }

    /// Channel groups a window is expanded into under `mode`.
    pub fn views(&self, mode: InputMode) -> Result<Vec<Vec<usize>>> {
        Ok(match mode {
            InputMode::Central => {
                let c = central_subset(&self.layout)?;
                vec![ChannelSubset::at_row(&self.layout, c.row, self.column_offset)?.channels]
            }
            InputMode::AllSubsets => enumerate_subsets(&self.layout, self.column_offset)?
                .into_iter()
                .map(|s| s.channels)
                .collect(),
            InputMode::AllChannels => vec![(0..self.layout.channel_count()).collect()],
        })
    }
}

fn hash_values(values: &[f64]) -> u64 {
    let mut h = DefaultHasher::new();
    h.write_usize(values.len());
    for v in values {
        h.write_u64(v.to_bits());
    }
    h.finish()
}

/// Fingerprints of fitting inputs versus test-side data.
#[derive(Debug, Clone, Default)]
pub struct LeakageAudit {
    fit: HashSet<u64>,
    test: HashSet<u64>,
}

impl LeakageAudit {
    pub fn record_fit(&mut self, values: &[f64]) {
        self.fit.insert(hash_values(values));
    }

    pub fn record_test(&mut self, values: &[f64]) {
        self.test.insert(hash_values(values));
    }

    fn record_fit_rows(&mut self, x: &FeatureMatrix) {
        x.iter_rows().for_each(|r| self.record_fit(r));
    }

    fn record_test_rows(&mut self, x: &FeatureMatrix) {
        x.iter_rows().for_each(|r| self.record_test(r));
    }

    pub fn merge(&mut self, other: LeakageAudit) {
        self.fit.extend(other.fit);
        self.test.extend(other.test);
    }

    pub fn fit_inputs(&self) -> usize {
        self.fit.len()
    }

    pub fn test_inputs(&self) -> usize {
        self.test.len()
    }

    /// Number of test fingerprints that also entered a fit.
    pub fn overlap(&self) -> usize {
        self.test.iter().filter(|h| self.fit.contains(h)).count()
    }

    pub fn verify(&self) -> Result<()> {
        match self.overlap() {
            0 => Ok(()),
            n => Err(Error::protocol(format!("leakage audit failed: {n} test input(s) reached a fitting routine"))),
        }
    }
}

/// Train and test feature matrices of one (condition, feature set) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionFeatures {
    pub train: FeatureMatrix,
    pub test: FeatureMatrix,
}

fn standardised_views(seg: &Segment, views: &[Vec<usize>], stats: &ChannelStats) -> Result<Vec<SignalMatrix>> {
    views
        .iter()
        .map(|v| {
            let mut m = seg.samples.select_channels(v)?;
            stats.apply_in_place(&mut m)?;
            Ok(m)
        })
        .collect()
}

/// Rows ordered segment, then window, then channel group.
fn extract_rows(segments: &[Segment], views: &[Vec<usize>], stats: &ChannelStats, set: FeatureSet, s: &PipelineSettings) -> Result<FeatureMatrix> {
    let width = views[0].len();
    let dim = set.per_channel_dim() * width;
    let blocks: Vec<(Vec<f64>, u32, usize)> = segments
        .par_iter()
        .map(|seg| {
            let parts = standardised_views(seg, views, stats)?;
            let starts = window_starts(seg.samples.len(), s.window, s.stride)?;
            let mut out = Vec::with_capacity(starts.len() * parts.len() * dim);
            for &start in &starts {
                for m in &parts {
                    set.extract_span(m, start, s.window, &s.features, &mut out)?;
                }
            }
            Ok((out, seg.meta.gesture, starts.len() * parts.len()))
        })
        .collect::<Result<_>>()?;
    let mut x = FeatureMatrix::new(dim);
    for (values, label, rows) in blocks {
        for r in 0..rows {
            x.push(&values[r * dim..(r + 1) * dim], label)?;
        }
    }
    Ok(x)
}

/// Builds the train and test features of one cell. Channel statistics are
/// fitted slot-wise on the training views: one mean/std per position in the
/// channel group, pooled over every group the training mode uses.
pub fn build_features(train: &[Segment], test: &[Segment], condition: Condition, set: FeatureSet, settings: &PipelineSettings, audit: &mut LeakageAudit) -> Result<ConditionFeatures> {
    if train.is_empty() || test.is_empty() {
        return Err(Error::protocol(format!("{condition}: empty train or test partition")));
    }
    let train_views = settings.views(condition.train())?;
    let test_views = settings.views(condition.test())?;

    let fit_inputs: Vec<SignalMatrix> = train
        .iter()
        .flat_map(|seg| train_views.iter().map(move |v| seg.samples.select_channels(v)))
        .collect::<Result<_>>()?;
    fit_inputs.iter().for_each(|m| audit.record_fit(m.as_slice()));
    for seg in test {
        for v in &test_views {
            audit.record_test(seg.samples.select_channels(v)?.as_slice());
        }
    }
    let stats = ChannelStats::fit(&fit_inputs)?;
    drop(fit_inputs);

    Ok(ConditionFeatures {
        train: extract_rows(train, &train_views, &stats, set, settings)?,
        test: extract_rows(test, &test_views, &stats, set, settings)?,
    })
}

/// Fits the classifier on `features.train` and returns test accuracy.
pub fn fit_and_score(features: &ConditionFeatures, pca: bool, settings: &PipelineSettings, audit: &mut LeakageAudit) -> Result<f64> {
    let mut train = features.train.clone();
    let mut test = features.test.clone();
    if train.is_empty() || test.is_empty() {
        return Err(Error::protocol("empty train or test feature matrix"));
    }
    if pca {
        audit.record_fit_rows(&train);
        audit.record_test_rows(&test);
        let scaler = FeatureScaler::fit(&train)?;
        scaler.apply(&mut train)?;
        scaler.apply(&mut test)?;

        audit.record_fit_rows(&train);
        audit.record_test_rows(&test);
        let model = fit_pca(&train, settings.pca_threshold)?;
        train = model.transform(&train)?;
        test = model.transform(&test)?;
    }
    audit.record_fit_rows(&train);
    audit.record_test_rows(&test);
    let lda = fit_lda(&train, settings.lda_lambda)?;
    lda.accuracy(&test)
}

/// Convenience wrapper: features, fit and score with a private audit that
/// must pass.
pub fn run_condition(train: &[Segment], test: &[Segment], condition: Condition, set: FeatureSet, pca: bool, settings: &PipelineSettings) -> Result<f64> {
    let mut audit = LeakageAudit::default();
    let features = build_features(train, test, condition, set, settings, &mut audit)?;
    let acc = fit_and_score(&features, pca, settings, &mut audit)?;
    audit.verify()?;
    Ok(acc)
}
