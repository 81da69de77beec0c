//! Experiment configuration (JSON).

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureParams, FeatureSet};
use crate::ingest::SyntheticSpec;
use crate::learn::DEFAULT_LAMBDA;
use crate::model::RngSeed;

/// How a partition's windows are presented to the classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InputMode {
    /// The central subset only.
    Central,
    /// Every valid subset, one augmented copy per row.
    AllSubsets,
    /// The full grid.
    AllChannels,
}

/// A train/test condition. The first four are intrasession (experiment 1),
/// the last three intersession (experiment 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Condition {
    CsCs,
    AvsAvs,
    AvsCs,
    CsAvs,
    Avs,
    Cs,
    Ac,
}

impl Condition {
    pub const EXPERIMENT1: [Condition; 4] = [Condition::CsCs, Condition::AvsAvs, Condition::AvsCs, Condition::CsAvs];
    pub const EXPERIMENT2: [Condition; 3] = [Condition::Avs, Condition::Cs, Condition::Ac];

    pub fn key(self) -> &'static str {
        match self {
            Condition::CsCs => "CS-CS",
            Condition::AvsAvs => "AVS-AVS",
            Condition::AvsCs => "AVS-CS",
            Condition::CsAvs => "CS-AVS",
            Condition::Avs => "AVS",
            Condition::Cs => "CS",
            Condition::Ac => "AC",
        }
    }

    pub fn train(self) -> InputMode {
        match self {
            Condition::CsCs | Condition::CsAvs | Condition::Cs => InputMode::Central,
            Condition::AvsAvs | Condition::AvsCs | Condition::Avs => InputMode::AllSubsets,
            Condition::Ac => InputMode::AllChannels,
        }
    }

    pub fn test(self) -> InputMode {
        match self {
            Condition::CsCs | Condition::AvsCs | Condition::Avs | Condition::Cs => InputMode::Central,
            Condition::AvsAvs | Condition::CsAvs => InputMode::AllSubsets,
            Condition::Ac => InputMode::AllChannels,
        }
    }

    pub fn experiment(self) -> u8 {
        if Condition::EXPERIMENT1.contains(&self) {
            1
        } else {
            2
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Condition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Condition::EXPERIMENT1
            .into_iter()
            .chain(Condition::EXPERIMENT2)
            .find(|c| c.key().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::param(format!("unknown condition {s:?}")))
    }
}

impl TryFrom<String> for Condition {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Condition> for String {
    fn from(c: Condition) -> String {
        c.key().to_owned()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PcaMode {
    #[default]
    Off,
    On,
    /// Every cell is evaluated with and without PCA.
    Both,
}

impl PcaMode {
    pub fn variants(self) -> &'static [bool] {
        match self {
            PcaMode::Off => &[false],
            PcaMode::On => &[true],
            PcaMode::Both => &[false, true],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SessionDirection {
    #[default]
    #[serde(rename = "1to2")]
    OneToTwo,
    #[serde(rename = "2to1")]
    TwoToOne,
    /// Both directions; each is an independent unit in the statistics.
    #[serde(rename = "both")]
    Both,
}

impl SessionDirection {
    /// `(train session, test session)` pairs.
    pub fn pairs(self) -> &'static [(u32, u32)] {
        match self {
            SessionDirection::OneToTwo => &[(1, 2)],
            SessionDirection::TwoToOne => &[(2, 1)],
            SessionDirection::Both => &[(1, 2), (2, 1)],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterConfig {
    pub enabled: bool,
    pub f_low: f64,
    pub f_high: f64,
    pub order: usize,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            enabled: true,
            f_low: 45.0,
            f_high: 55.0,
            order: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticSource {
    /// Pseudo-subjects `1..=subjects`.
    pub subjects: u32,
    /// Generator settings; `subject` and `seed` are overridden per run.
    pub spec: SyntheticSpec,
}

impl Default for SyntheticSource {
    fn default() -> Self {
        SyntheticSource {
            subjects: 1,
            spec: SyntheticSpec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum DataSource {
    Synthetic(SyntheticSource),
    /// Root of a canonical dataset (directory holding `manifest.json`).
    Dataset(PathBuf),
}

impl Default for DataSource {
    fn default() -> Self {
        DataSource::Synthetic(SyntheticSource::default())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: u8,
    pub data: DataSource,
    pub feature_sets: Vec<FeatureSet>,
    /// Empty selects every condition of the experiment.
    pub conditions: Vec<Condition>,
    pub pca: PcaMode,
    pub pca_threshold: f64,
    pub window_ms: f64,
    pub stride_ms: f64,
    pub central_s: f64,
    pub filter: FilterConfig,
    pub features: FeatureParams,
    pub lda_lambda: f64,
    /// Root seed; also seeds the synthetic generator.
    pub seed: RngSeed,
    pub session_direction: SessionDirection,
    /// Column within each module used for the subsets.
    pub column_offset: usize,
    /// Restrict to these subjects (empty: all).
    pub subjects: Vec<u32>,
    /// `None` skips subject 10 for experiment 2 on recorded data and
    /// nothing otherwise.
    pub exclude_subjects: Option<Vec<u32>>,
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: 1,
            data: DataSource::default(),
            feature_sets: FeatureSet::ALL.to_vec(),
            conditions: Vec::new(),
            pca: PcaMode::Off,
            pca_threshold: 0.95,
            window_ms: 256.0,
            stride_ms: 15.0,
            central_s: 1.0,
            filter: FilterConfig::default(),
            features: FeatureParams::default(),
            lda_lambda: DEFAULT_LAMBDA,
            seed: RngSeed(0),
            session_direction: SessionDirection::OneToTwo,
            column_offset: 0,
            subjects: Vec::new(),
            exclude_subjects: None,
            output: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Conditions to evaluate, in the experiment's canonical order.
    pub fn effective_conditions(&self) -> Vec<Condition> {
        let all: &[Condition] = if self.experiment == 1 {
            &Condition::EXPERIMENT1
        } else {
            &Condition::EXPERIMENT2
        };
        if self.conditions.is_empty() {
            return all.to_vec();
        }
        all.iter().copied().filter(|c| self.conditions.contains(c)).collect()
    }

    pub fn effective_exclusions(&self) -> Vec<u32> {
        match (&self.exclude_subjects, &self.data) {
            (Some(v), _) => v.clone(),
            (None, DataSource::Dataset(_)) if self.experiment == 2 => vec![10],
            _ => Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !matches!(self.experiment, 1 | 2) {
            return Err(Error::param(format!("experiment must be 1 or 2, got {}", self.experiment)));
        }
        if let Some(c) = self.conditions.iter().find(|c| c.experiment() != self.experiment) {
            return Err(Error::param(format!("condition {c} does not belong to experiment {}", self.experiment)));
        }
        if self.feature_sets.is_empty() {
            return Err(Error::param("at least one feature set is required"));
        }
        if !(self.pca_threshold > 0.0 && self.pca_threshold <= 1.0) {
            return Err(Error::param(format!("pca_threshold must lie in (0, 1], got {}", self.pca_threshold)));
        }
        for (name, v) in [("window_ms", self.window_ms), ("stride_ms", self.stride_ms), ("central_s", self.central_s)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::param(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.lda_lambda >= 0.0 && self.lda_lambda.is_finite()) {
            return Err(Error::param("lda_lambda must be non-negative"));
        }
        if let DataSource::Synthetic(s) = &self.data {
            if s.subjects == 0 {
                return Err(Error::param("synthetic source needs at least one subject"));
            }
            s.spec.validate()?;
            if self.experiment == 2 && s.spec.sessions < 2 {
                return Err(Error::param("experiment 2 needs two sessions"));
            }
        }
        Ok(())
    }
}
