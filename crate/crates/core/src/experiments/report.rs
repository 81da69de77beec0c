//! Experiment reports: per-cell accuracies, aggregates, statistics and their
//! CSV / markdown renderings. Output is a pure function of the cells and the
//! config, so identical runs produce identical bytes.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::{Condition, ExperimentConfig};
use crate::error::{Error, Result};
use crate::features::FeatureSet;
use crate::stats::{anova_oneway, levene, paired_t, wilcoxon_signed_rank, Alternative, TestResult, WilcoxonMode};

pub const VERSION: &str = concat!("v", env!("CARGO_PKG_VERSION"));

/// Independent unit of the statistics: a subject, or a subject and one
/// session direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Unit {
    pub subject: u32,
    /// `(train session, test session)` for intersession runs.
    pub sessions: Option<(u32, u32)>,
}

impl Unit {
    pub fn label(&self) -> String {
        match self.sessions {
            None => format!("s{:02}", self.subject),
            Some((a, b)) => format!("s{:02}:{a}to{b}", self.subject),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    pub unit: Unit,
    pub feature_set: FeatureSet,
    pub condition: Condition,
    pub pca: bool,
    pub accuracy: f64,
    pub train_rows: usize,
    pub test_rows: usize,
}

/// Mean and sample standard deviation across units. `feature_set: None` is
/// the average-score row (per-unit mean over feature sets first).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub feature_set: Option<FeatureSet>,
    pub condition: Condition,
    pub pca: bool,
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatStatus {
    Ok,
    Degenerate,
    InsufficientN,
}

impl StatStatus {
    pub fn key(self) -> &'static str {
        match self {
            StatStatus::Ok => "ok",
            StatStatus::Degenerate => "degenerate",
            StatStatus::InsufficientN => "insufficient-n",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatEntry {
    pub name: String,
    pub status: StatStatus,
    pub result: Option<TestResult>,
}

impl StatEntry {
    fn from_outcome(name: String, outcome: Result<TestResult>) -> Self {
        match outcome {
            Ok(r) => StatEntry {
                name,
                status: if r.degenerate { StatStatus::Degenerate } else { StatStatus::Ok },
                result: Some(r),
            },
            Err(_) => StatEntry::insufficient(name),
        }
    }

    fn insufficient(name: String) -> Self {
        StatEntry {
            name,
            status: StatStatus::InsufficientN,
            result: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct AuditSummary {
    pub fit_inputs: usize,
    pub test_inputs: usize,
    pub overlap: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub experiment: u8,
    pub version: String,
    pub config: ExperimentConfig,
    pub cells: Vec<Cell>,
    pub aggregates: Vec<Aggregate>,
    pub statistics: Vec<StatEntry>,
    pub audit: AuditSummary,
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn sample_std(x: &[f64]) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    let m = mean(x);
    (x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64).sqrt()
}

/// Lookup of cell accuracies on the full (unit, set, condition, pca) grid.
struct Grid<'a> {
    units: Vec<Unit>,
    sets: Vec<FeatureSet>,
    conditions: Vec<Condition>,
    pcas: Vec<bool>,
    acc: HashMap<(Unit, FeatureSet, Condition, bool), &'a Cell>,
}

impl<'a> Grid<'a> {
    fn new(cells: &'a [Cell]) -> Self {
        let mut units = vec![];
        let mut sets = vec![];
        let mut conditions = vec![];
        let mut pcas = vec![];
        for c in cells {
            if !units.contains(&c.unit) {
                units.push(c.unit);
            }
            if !sets.contains(&c.feature_set) {
                sets.push(c.feature_set);
            }
            if !conditions.contains(&c.condition) {
                conditions.push(c.condition);
            }
            if !pcas.contains(&c.pca) {
                pcas.push(c.pca);
            }
        }
        let acc = cells.iter().map(|c| ((c.unit, c.feature_set, c.condition, c.pca), c)).collect();
        Grid {
            units,
            sets,
            conditions,
            pcas,
            acc,
        }
    }

    fn value(&self, u: Unit, s: FeatureSet, c: Condition, pca: bool) -> Option<f64> {
        self.acc.get(&(u, s, c, pca)).map(|cell| cell.accuracy)
    }

    /// Per-unit values for one (set, condition, pca); `None` set averages
    /// over every feature set. Units with missing cells are skipped.
    fn series(&self, set: Option<FeatureSet>, c: Condition, pca: bool) -> Vec<f64> {
        self.units
            .iter()
            .filter_map(|&u| match set {
                Some(s) => self.value(u, s, c, pca),
                None => {
                    let v: Option<Vec<f64>> = self.sets.iter().map(|&s| self.value(u, s, c, pca)).collect();
                    v.map(|v| mean(&v))
                }
            })
            .collect()
    }
}

fn pca_tag(pca: bool) -> &'static str {
    if pca {
        "pca"
    } else {
        "no-pca"
    }
}

fn aggregates(grid: &Grid) -> Vec<Aggregate> {
    let mut out = vec![];
    for &pca in &grid.pcas {
        let rows = grid.sets.iter().map(|&s| Some(s)).chain(std::iter::once(None));
        for set in rows {
            for &condition in &grid.conditions {
                let v = grid.series(set, condition, pca);
                if v.is_empty() {
                    continue;
                }
                out.push(Aggregate {
                    feature_set: set,
                    condition,
                    pca,
                    mean: mean(&v),
                    std: sample_std(&v),
                    n: v.len(),
                });
            }
        }
    }
    out
}

fn feature_set_anova(grid: &Grid, pca: bool) -> StatEntry {
    let name = format!("anova:feature-sets:{}", pca_tag(pca));
    let groups: Vec<Vec<f64>> = grid
        .sets
        .iter()
        .map(|&s| grid.conditions.iter().flat_map(|&c| grid.series(Some(s), c, pca)).collect())
        .collect();
    StatEntry::from_outcome(name, anova_oneway(&groups))
}

fn experiment1_statistics(grid: &Grid) -> Vec<StatEntry> {
    let pca = grid.pcas[0];
    let mut out = vec![feature_set_anova(grid, pca)];
    let by_condition: Vec<Vec<f64>> = grid.conditions.iter().map(|&c| grid.series(None, c, pca)).collect();
    out.push(StatEntry::from_outcome(format!("levene:conditions:{}", pca_tag(pca)), levene(&by_condition)));
    if grid.conditions.contains(&Condition::CsCs) {
        let base = grid.series(None, Condition::CsCs, pca);
        for &c in grid.conditions.iter().filter(|&&c| c != Condition::CsCs) {
            let name = format!("wilcoxon:CS-CS vs {c}:average:{}", pca_tag(pca));
            let other = grid.series(None, c, pca);
            out.push(if base.len() < 2 || other.len() != base.len() {
                StatEntry::insufficient(name)
            } else {
                StatEntry::from_outcome(name, wilcoxon_signed_rank(&base, &other, Alternative::TwoSided, WilcoxonMode::Auto))
            });
        }
    }
    out
}

fn experiment2_statistics(grid: &Grid) -> Vec<StatEntry> {
    let mut out = vec![];
    for &pca in &grid.pcas {
        out.push(feature_set_anova(grid, pca));
    }
    for &pca in &grid.pcas {
        for other in [Condition::Cs, Condition::Ac] {
            if !grid.conditions.contains(&Condition::Avs) || !grid.conditions.contains(&other) {
                continue;
            }
            let rows = grid.sets.iter().map(|&s| Some(s)).chain(std::iter::once(None));
            for set in rows {
                let tag = set.map_or("average", FeatureSet::key);
                let name = format!("paired-t:AVS vs {other}:{tag}:{}", pca_tag(pca));
                let a = grid.series(set, Condition::Avs, pca);
                let b = grid.series(set, other, pca);
                out.push(if a.len() < 2 || a.len() != b.len() {
                    StatEntry::insufficient(name)
                } else {
                    StatEntry::from_outcome(name, paired_t(&a, &b, Alternative::Greater))
                });
            }
        }
    }
    out
}

impl ExperimentReport {
    pub fn assemble(config: ExperimentConfig, cells: Vec<Cell>, audit: AuditSummary) -> Self {
        let grid = Grid::new(&cells);
        let (aggregates, statistics) = if cells.is_empty() {
            (vec![], vec![])
        } else if config.experiment == 1 {
            (aggregates(&grid), experiment1_statistics(&grid))
        } else {
            (aggregates(&grid), experiment2_statistics(&grid))
        };
        ExperimentReport {
            experiment: config.experiment,
            version: VERSION.to_owned(),
            config,
            cells,
            aggregates,
            statistics,
            audit,
        }
    }

    pub fn aggregate(&self, set: Option<FeatureSet>, condition: Condition, pca: bool) -> Option<&Aggregate> {
        self.aggregates
            .iter()
            .find(|a| a.feature_set == set && a.condition == condition && a.pca == pca)
    }

    pub fn statistic(&self, name: &str) -> Option<&StatEntry> {
        self.statistics.iter().find(|s| s.name == name)
    }

    pub fn cells_csv(&self) -> String {
        let mut s = String::from("subject,sessions,feature_set,condition,pca,accuracy,train_rows,test_rows\n");
        for c in &self.cells {
            let sessions = c.unit.sessions.map(|(a, b)| format!("{a}to{b}")).unwrap_or_default();
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{}",
                c.unit.subject,
                sessions,
                c.feature_set,
                c.condition,
                pca_tag(c.pca),
                c.accuracy,
                c.train_rows,
                c.test_rows
            );
        }
        s
    }

    pub fn stats_csv(&self) -> String {
        let mut s = String::from("name,method,statistic,df,p_value,n,alternative,status\n");
        for e in &self.statistics {
            match &e.result {
                Some(r) => {
                    let _ = writeln!(
                        s,
                        "{},{},{},\"{}\",{},{},{},{}",
                        e.name,
                        r.method.key(),
                        r.statistic,
                        r.df,
                        r.p_value,
                        r.n,
                        r.alternative.key(),
                        e.status.key()
                    );
                }
                None => {
                    let _ = writeln!(s, "{},,,,,,,{}", e.name, e.status.key());
                }
            }
        }
        s
    }

    pub fn markdown(&self) -> String {
        let mut s = String::new();
        let title = if self.experiment == 1 {
            "Intrasession test accuracy"
        } else {
            "Intersession test accuracy"
        };
        let _ = writeln!(s, "# Experiment {}: {title}\n", self.experiment);
        let _ = writeln!(s, "Version: {}\n", self.version);
        let grid = Grid::new(&self.cells);
        let units: Vec<String> = grid.units.iter().map(Unit::label).collect();
        let _ = writeln!(s, "Units ({}): {}\n", units.len(), units.join(", "));
        for &pca in &grid.pcas {
            let _ = writeln!(s, "## Accuracy ({}), mean ± std across units\n", pca_tag(pca));
            let header: Vec<&str> = grid.conditions.iter().map(|c| c.key()).collect();
            let _ = writeln!(s, "| Feature set | {} |", header.join(" | "));
            let _ = writeln!(s, "|---|{}", "---|".repeat(header.len()));
            let rows = grid.sets.iter().map(|&f| Some(f)).chain(std::iter::once(None));
            for set in rows {
                let name = set.map_or("Avg. score", FeatureSet::title);
                let vals: Vec<String> = grid
                    .conditions
                    .iter()
                    .map(|&c| match self.aggregate(set, c, pca) {
                        Some(a) => format!("{:.3} ± {:.3}", a.mean, a.std),
                        None => "-".to_owned(),
                    })
                    .collect();
                let _ = writeln!(s, "| {name} | {} |", vals.join(" | "));
            }
            s.push('\n');
        }
        s.push_str("## Statistics\n\n| Test | Statistic | df | p | n | Status |\n|---|---|---|---|---|---|\n");
        for e in &self.statistics {
            match &e.result {
                Some(r) => {
                    let _ = writeln!(
                        s,
                        "| {} | {:.4} | {} | {:.3e} | {} | {} |",
                        e.name,
                        r.statistic,
                        r.df,
                        r.p_value,
                        r.n,
                        e.status.key()
                    );
                }
                None => {
                    let _ = writeln!(s, "| {} | - | - | - | - | {} |", e.name, e.status.key());
                }
            }
        }
        let _ = writeln!(
            s,
            "\nLeakage audit: {} ({} fit inputs, {} test inputs, {} shared).\n",
            if self.audit.overlap == 0 { "passed" } else { "FAILED" },
            self.audit.fit_inputs,
            self.audit.test_inputs,
            self.audit.overlap
        );
        s.push_str(
            "Features are z-scored with training statistics before PCA; PCA and LDA are fitted per \
             (unit, feature set, condition) on training data only.\n\n",
        );
        let _ = writeln!(
            s,
            "## Configuration\n\n```json\n{}\n```",
            serde_json::to_string_pretty(&self.config).unwrap_or_default()
        );
        s
    }

    /// Writes `cells.csv`, `stats.csv`, `report.md` and `config.json` into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let files = [
            ("cells.csv", self.cells_csv()),
            ("stats.csv", self.stats_csv()),
            ("report.md", self.markdown()),
            ("config.json", self.config.to_json()? + "\n"),
        ];
        files
            .into_iter()
            .map(|(name, body)| {
                let path = dir.join(name);
                fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
                Ok(path)
            })
            .collect()
    }
}
