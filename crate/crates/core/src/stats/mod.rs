//! Hypothesis tests with self-contained special functions.

pub mod hypothesis;
pub mod special;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

pub use hypothesis::{anova_oneway, levene, paired_t, wilcoxon_signed_rank, WilcoxonMode, EXACT_WILCOXON_MAX_N};
pub use special::reg_incomplete_beta;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    AnovaF,
    Levene,
    WilcoxonSr,
    PairedT,
}

impl Method {
    pub fn key(self) -> &'static str {
        match self {
            Method::AnovaF => "ANOVA_F",
            Method::Levene => "LEVENE",
            Method::WilcoxonSr => "WILCOXON_SR",
            Method::PairedT => "PAIRED_T",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Alternative {
    #[default]
    TwoSided,
    Greater,
    Less,
}

impl Alternative {
    pub fn key(self) -> &'static str {
        match self {
            Alternative::TwoSided => "two-sided",
            Alternative::Greater => "greater",
            Alternative::Less => "less",
        }
    }
}

impl FromStr for Alternative {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "two-sided" => Ok(Alternative::TwoSided),
            "greater" => Ok(Alternative::Greater),
            "less" => Ok(Alternative::Less),
            other => Err(Error::param(format!("unknown alternative {other:?} (two-sided, greater, less)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Df {
    None,
    Single(f64),
    Pair(f64, f64),
}

impl fmt::Display for Df {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Df::None => Ok(()),
            Df::Single(d) => write!(f, "{d}"),
            Df::Pair(a, b) => write!(f, "{a},{b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub method: Method,
    pub statistic: f64,
    pub p_value: f64,
    pub df: Df,
    /// Observations entering the statistic (non-zero pairs for Wilcoxon).
    pub n: usize,
    pub alternative: Alternative,
    /// Set when the statistic is undefined or infinite (zero variance,
    /// all-zero differences); `p_value` then holds the limiting value.
    pub degenerate: bool,
}

impl TestResult {
    pub(crate) fn new(method: Method, statistic: f64, p_value: f64, df: Df, n: usize, alternative: Alternative) -> Self {
        TestResult {
            method,
            statistic,
            p_value: p_value.clamp(0.0, 1.0),
            df,
            n,
            alternative,
            degenerate: false,
        }
    }

    pub(crate) fn degenerate(method: Method, statistic: f64, p_value: f64, df: Df, n: usize) -> Self {
        TestResult {
            degenerate: true,
            ..TestResult::new(method, statistic, p_value, df, n, Alternative::Greater)
        }
    }
}
