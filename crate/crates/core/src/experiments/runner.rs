//! End-to-end experiment runs over synthetic or canonical data.

use rayon::prelude::*;

use super::config::{DataSource, ExperimentConfig};
use super::pipeline::{build_features, fit_and_score, split_intrasession, LeakageAudit, PipelineSettings, Segment};
use super::report::{AuditSummary, Cell, ExperimentReport, Unit};
use crate::dsp::{design_bandstop, BiquadCascade};
use crate::error::{Error, Result};
use crate::ingest::{CanonicalDataset, SyntheticSpec, SyntheticSubject};
use crate::model::GridLayout;

/// Where recordings come from.
pub enum Source {
    Synthetic { spec: SyntheticSpec, subjects: u32 },
    Dataset(CanonicalDataset),
}

impl Source {
    pub fn open(cfg: &ExperimentConfig) -> Result<Self> {
        Ok(match &cfg.data {
            DataSource::Synthetic(s) => Source::Synthetic {
                spec: SyntheticSpec {
                    seed: cfg.seed,
                    ..s.spec.clone()
                },
                subjects: s.subjects,
            },
            DataSource::Dataset(path) => Source::Dataset(CanonicalDataset::open(path)?),
        })
    }

    pub fn layout(&self) -> GridLayout {
        match self {
            Source::Synthetic { spec, .. } => spec.layout,
            Source::Dataset(d) => d.layout(),
        }
    }

    pub fn fs(&self) -> f64 {
        match self {
            Source::Synthetic { spec, .. } => spec.fs_hz,
            Source::Dataset(d) => d.fs(),
        }
    }

    pub fn subjects(&self) -> Vec<u32> {
        match self {
            Source::Synthetic { subjects, .. } => (1..=*subjects).collect(),
            Source::Dataset(d) => d.subjects(),
        }
    }

    /// Central segments of every recording of one session, ordered by
    /// (gesture, repetition). Recordings are loaded one at a time.
    pub fn segments(&self, subject: u32, session: u32, cascade: Option<&BiquadCascade>, central_s: f64) -> Result<Vec<Segment>> {
        let mut out = match self {
            Source::Synthetic { spec, .. } => {
                if session == 0 || session > spec.sessions {
                    return Err(Error::protocol(format!("synthetic subject {subject} has no session {session}")));
                }
                let gen = SyntheticSubject::new(SyntheticSpec {
                    subject,
                    ..spec.clone()
                })?;
                (1..=spec.gestures)
                    .flat_map(|g| (1..=spec.repetitions).map(move |r| (g, r)))
                    .map(|(g, r)| Segment::from_recording(&gen.recording(session, g, r)?, cascade, central_s))
                    .collect::<Result<Vec<_>>>()?
            }
            Source::Dataset(d) => d
                .manifest()
                .recordings
                .iter()
                .filter(|e| e.subject == subject && e.session == session)
                .map(|e| Segment::from_recording(&d.load(e)?, cascade, central_s))
                .collect::<Result<Vec<_>>>()?,
        };
        if out.is_empty() {
            return Err(Error::protocol(format!("subject {subject} has no recordings in session {session}")));
        }
        out.sort_by_key(|s| (s.meta.gesture, s.meta.repetition));
        Ok(out)
    }
}

fn evaluate_unit(unit: Unit, train: &[Segment], test: &[Segment], cfg: &ExperimentConfig, settings: &PipelineSettings) -> Result<(Vec<Cell>, AuditSummary)> {
    let mut audit = LeakageAudit::default();
    let mut cells = vec![];
    let pcas = cfg.pca.variants();
    let conditions = cfg.effective_conditions();
    let mut by_pca: Vec<Vec<Cell>> = vec![vec![]; pcas.len()];
    for &set in &cfg.feature_sets {
        for &condition in &conditions {
            let features = build_features(train, test, condition, set, settings, &mut audit)?;
            for (slot, &pca) in pcas.iter().enumerate() {
                let accuracy = fit_and_score(&features, pca, settings, &mut audit)?;
                by_pca[slot].push(Cell {
                    unit,
                    feature_set: set,
                    condition,
                    pca,
                    accuracy,
                    train_rows: features.train.rows(),
                    test_rows: features.test.rows(),
                });
            }
        }
    }
    by_pca.into_iter().for_each(|c| cells.extend(c));
    // Per unit: in "both" directions a session is test data for one unit and
    // fitting data for the other, legitimately.
    audit.verify()?;
    Ok((cells, summarise(&audit)))
}

fn summarise(audit: &LeakageAudit) -> AuditSummary {
    AuditSummary {
        fit_inputs: audit.fit_inputs(),
        test_inputs: audit.test_inputs(),
        overlap: audit.overlap(),
    }
}

fn add(total: &mut AuditSummary, part: AuditSummary) {
    total.fit_inputs += part.fit_inputs;
    total.test_inputs += part.test_inputs;
    total.overlap += part.overlap;
}

fn evaluate_subject(subject: u32, source: &Source, cfg: &ExperimentConfig, cascade: Option<&BiquadCascade>, settings: &PipelineSettings) -> Result<(Vec<Cell>, AuditSummary)> {
    if cfg.experiment == 1 {
        let segments = source.segments(subject, 1, cascade, cfg.central_s)?;
        let (train, test) = split_intrasession(segments)?;
        let unit = Unit { subject, sessions: None };
        return evaluate_unit(unit, &train, &test, cfg, settings);
    }
    let first = source.segments(subject, 1, cascade, cfg.central_s)?;
    let second = source.segments(subject, 2, cascade, cfg.central_s)?;
    let mut cells = vec![];
    let mut audit = AuditSummary::default();
    for &(a, b) in cfg.session_direction.pairs() {
        let (train, test) = if a == 1 { (&first, &second) } else { (&second, &first) };
        let unit = Unit {
            subject,
            sessions: Some((a, b)),
        };
        let (c, au) = evaluate_unit(unit, train, test, cfg, settings)?;
        cells.extend(c);
        add(&mut audit, au);
    }
    Ok((cells, audit))
}

/// Runs the configured experiment. Cells come out in (unit, pca, feature set,
/// condition) order regardless of scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let source = Source::open(cfg)?;
    let excluded = cfg.effective_exclusions();
    let subjects: Vec<u32> = source
        .subjects()
        .into_iter()
        .filter(|s| cfg.subjects.is_empty() || cfg.subjects.contains(s))
        .filter(|s| !excluded.contains(s))
        .collect();
    if subjects.is_empty() {
        return Err(Error::protocol("no subjects left to evaluate"));
    }
    let fs = source.fs();
    let cascade = if cfg.filter.enabled {
        Some(design_bandstop(fs, cfg.filter.f_low, cfg.filter.f_high, cfg.filter.order)?)
    } else {
        None
    };
    let settings = PipelineSettings::from_config(cfg, source.layout(), fs)?;

    let results: Vec<(Vec<Cell>, AuditSummary)> = subjects
        .par_iter()
        .map(|&s| evaluate_subject(s, &source, cfg, cascade.as_ref(), &settings))
        .collect::<Result<_>>()?;
    let mut cells = vec![];
    let mut summary = AuditSummary::default();
    for (c, a) in results {
        cells.extend(c);
        add(&mut summary, a);
    }
    Ok(ExperimentReport::assemble(cfg.clone(), cells, summary))
}

/// `run_experiment` with `experiment` forced to 1.
pub fn run_experiment1(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    run_experiment(&ExperimentConfig {
        experiment: 1,
        ..cfg.clone()
    })
}

/// `run_experiment` with `experiment` forced to 2.
pub fn run_experiment2(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    run_experiment(&ExperimentConfig {
        experiment: 2,
        ..cfg.clone()
    })
}
