//! Experiment 1 (intrasession condition matrix) and experiment 2
//! (intersession), from configuration to report.

pub mod config;
pub mod pipeline;
pub mod report;
pub mod runner;

pub use config::{Condition, DataSource, ExperimentConfig, FilterConfig, InputMode, PcaMode, SessionDirection, SyntheticSource};
pub use pipeline::{build_features, fit_and_score, run_condition, split_intrasession, ConditionFeatures, LeakageAudit, PipelineSettings, Segment};
pub use report::{Aggregate, AuditSummary, Cell, ExperimentReport, StatEntry, StatStatus, Unit, VERSION};
pub use runner::{run_experiment, run_experiment1, run_experiment2, Source};
