//! `emgshift`: synthetic data, experiment runs, statistics and dataset checks.
//!
//! Exit codes: 0 success, 2 protocol or parameter error, 3 I/O or
//! corrupt-data error.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use emg_shift::experiments::{run_experiment, ExperimentConfig};
use emg_shift::ingest::{CanonicalDataset, ManifestWriter, SyntheticSpec, SyntheticSubject};
use emg_shift::model::RngSeed;
use emg_shift::stats::{anova_oneway, levene, paired_t, wilcoxon_signed_rank, Alternative, TestResult, WilcoxonMode};
use emg_shift::Error;

#[derive(Parser)]
#[command(name = "emgshift", version, about = "Electrode-shift benchmark harness for HD-sEMG gesture recognition")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset in the canonical format.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        subjects: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// JSON file with generator settings (missing keys take defaults).
        #[arg(long)]
        spec: Option<PathBuf>,
    },
    /// Run an experiment described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Report directory; overrides the config's `output`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hypothesis test on a CSV with one column per group (header = names).
    Stats {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        test: TestKind,
        #[arg(long, default_value = "two-sided")]
        alternative: String,
        /// Wilcoxon p-value method.
        #[arg(long, value_enum, default_value_t = Mode::Auto)]
        mode: Mode,
    },
    /// Summarise a canonical dataset.
    Inspect {
        #[arg(long)]
        data: PathBuf,
    },
    /// Validate a canonical dataset: every file readable and finite, every
    /// (subject, session) holding a complete gesture x repetition grid.
    ConvertCheck {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = 8)]
        gestures: u32,
        #[arg(long, default_value_t = 10)]
        repetitions: u32,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TestKind {
    Anova,
    Levene,
    Wilcoxon,
    PairedT,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Auto,
    Exact,
    Normal,
}

/// CLI failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parameter(_) | Error::Range { .. } | Error::Protocol(_) => 2,
            Error::Corrupt { .. } | Error::Version { .. } | Error::Io { .. } | Error::Json(_) => 3,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure {
        code: 3,
        message: format!("{}: {e}", path.display()),
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| io_failure(path, e))
}

fn synth(out: &Path, subjects: u32, seed: u64, spec: Option<&Path>) -> Result<(), Failure> {
    let mut base = match spec {
        Some(p) => serde_json::from_str::<SyntheticSpec>(&read_text(p)?).map_err(|e| usage(format!("{}: {e}", p.display())))?,
        None => SyntheticSpec::default(),
    };
    base.seed = RngSeed(seed);
    base.validate()?;
    if subjects == 0 {
        return Err(usage("--subjects must be at least 1"));
    }
    let mut writer = ManifestWriter::create(out, base.layout, base.fs_hz)?;
    for subject in 1..=subjects {
        let gen = SyntheticSubject::new(SyntheticSpec {
            subject,
            ..base.clone()
        })?;
        for rec in gen.recordings() {
            writer.add(&rec?)?;
        }
    }
    let manifest = writer.finish()?;
    println!("wrote {}", manifest.display());
    Ok(())
}

fn run(config: &Path, out: Option<&Path>) -> Result<(), Failure> {
    let text = read_text(config)?;
    let cfg = ExperimentConfig::from_json(&text).map_err(|e| match e {
        Error::Json(j) => usage(format!("{}: {j}", config.display())),
        other => other.into(),
    })?;
    let dir = out
        .map(Path::to_path_buf)
        .or_else(|| cfg.output.clone())
        .ok_or_else(|| usage("no report directory: pass --out or set \"output\" in the config"))?;
    let report = run_experiment(&cfg)?;
    for path in report.write(&dir)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

/// Columns of a headed CSV; ragged columns (blank trailing cells) are allowed.
fn read_columns(path: &Path) -> Result<Vec<(String, Vec<f64>)>, Failure> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| io_failure(path, e))?;
    let names: Vec<String> = reader
        .headers()
        .map_err(|e| io_failure(path, e))?
        .iter()
        .map(str::to_owned)
        .collect();
    let mut columns: Vec<Vec<f64>> = vec![vec![]; names.len()];
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| io_failure(path, e))?;
        for (col, field) in record.iter().enumerate() {
            if field.is_empty() {
                continue;
            }
            let v: f64 = field
                .parse()
                .map_err(|_| usage(format!("{}: row {}: {field:?} is not a number", path.display(), line + 2)))?;
            columns
                .get_mut(col)
                .ok_or_else(|| usage(format!("{}: row {} has more fields than the header", path.display(), line + 2)))?
                .push(v);
        }
    }
    Ok(names.into_iter().zip(columns).collect())
}

fn stats(input: &Path, test: TestKind, alternative: &str, mode: Mode) -> Result<(), Failure> {
    let alternative: Alternative = alternative.parse()?;
    let columns = read_columns(input)?;
    let groups: Vec<Vec<f64>> = columns.iter().map(|(_, v)| v.clone()).collect();
    let paired = |groups: &[Vec<f64>]| -> Result<(), Failure> {
        if groups.len() != 2 {
            return Err(usage(format!("paired tests need exactly 2 columns, got {}", groups.len())));
        }
        Ok(())
    };
    let result: TestResult = match test {
        TestKind::Anova => anova_oneway(&groups)?,
        TestKind::Levene => levene(&groups)?,
        TestKind::Wilcoxon => {
            paired(&groups)?;
            let mode = match mode {
                Mode::Auto => WilcoxonMode::Auto,
                Mode::Exact => WilcoxonMode::Exact,
                Mode::Normal => WilcoxonMode::Normal,
            };
            wilcoxon_signed_rank(&groups[0], &groups[1], alternative, mode)?
        }
        TestKind::PairedT => {
            paired(&groups)?;
            paired_t(&groups[0], &groups[1], alternative)?
        }
    };
    let json = serde_json::to_string_pretty(&result).map_err(|e| usage(e.to_string()))?;
    println!("{json}");
    Ok(())
}

fn inspect(data: &Path) -> Result<(), Failure> {
    let ds = CanonicalDataset::open(data)?;
    let m = ds.manifest();
    let layout = ds.layout();
    println!("root: {}", data.display());
    println!("format_version: {}", m.format_version);
    println!("fs_hz: {}", m.fs_hz);
    println!(
        "grid: {} x {} ({} channels, module width {}, pitch {} mm)",
        layout.rows,
        layout.cols,
        layout.channel_count(),
        layout.module_width,
        layout.pitch_mm
    );
    println!("recordings: {}", m.recordings.len());
    let mut per: BTreeMap<(u32, u32), (usize, usize, usize)> = BTreeMap::new();
    for e in &m.recordings {
        let slot = per.entry((e.subject, e.session)).or_insert((0, usize::MAX, 0));
        slot.0 += 1;
        slot.1 = slot.1.min(e.sample_count);
        slot.2 = slot.2.max(e.sample_count);
    }
    for ((subject, session), (count, lo, hi)) in per {
        println!("subject {subject} session {session}: {count} recordings, {lo}-{hi} samples");
    }
    Ok(())
}

fn convert_check(data: &Path, gestures: u32, repetitions: u32) -> Result<(), Failure> {
    let ds = CanonicalDataset::open(data)?;
    let mut seen: BTreeMap<(u32, u32), Vec<(u32, u32)>> = BTreeMap::new();
    for entry in &ds.manifest().recordings {
        let rec = ds.load(entry)?;
        if !rec.samples.is_finite() {
            return Err(Error::Corrupt {
                path: ds.root().join(&entry.path),
                reason: "non-finite samples".into(),
            }
            .into());
        }
        seen.entry((entry.subject, entry.session))
            .or_default()
            .push((entry.gesture, entry.repetition));
    }
    if seen.is_empty() {
        return Err(Error::Protocol("manifest lists no recordings".into()).into());
    }
    let mut problems = vec![];
    for ((subject, session), items) in seen {
        let mut issues = vec![];
        for g in 1..=gestures {
            for r in 1..=repetitions {
                match items.iter().filter(|&&k| k == (g, r)).count() {
                    0 => issues.push(format!("missing g{g} r{r}")),
                    1 => {}
                    n => issues.push(format!("g{g} r{r} listed {n} times")),
                }
            }
        }
        issues.extend(
            items
                .iter()
                .filter(|&&(g, r)| g == 0 || g > gestures || r == 0 || r > repetitions)
                .map(|(g, r)| format!("unexpected g{g} r{r}")),
        );
        if !issues.is_empty() {
            let shown = issues.len().min(5);
            let more = if issues.len() > shown { format!(", ... ({} issues)", issues.len()) } else { String::new() };
            problems.push(format!("subject {subject} session {session}: {}{more}", issues[..shown].join(", ")));
        }
    }
    if !problems.is_empty() {
        return Err(Error::Protocol(problems.join("; ")).into());
    }
    println!("ok: {} recordings", ds.manifest().recordings.len());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match &cli.command {
        Command::Synth { out, subjects, seed, spec } => synth(out, *subjects, *seed, spec.as_deref()),
        Command::Run { config, out } => run(config, out.as_deref()),
        Command::Stats {
            input,
            test,
            alternative,
            mode,
        } => stats(input, *test, alternative, *mode),
        Command::Inspect { data } => inspect(data),
        Command::ConvertCheck {
            data,
            gestures,
            repetitions,
        } => convert_check(data, *gestures, *repetitions),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
