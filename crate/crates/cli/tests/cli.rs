use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn emgshift(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_emgshift"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn synth_small(dir: &Path) -> String {
    let spec = dir.join("spec.json");
    fs::write(&spec, r#"{"gestures": 2, "repetitions": 2, "duration_s": 0.4}"#).unwrap();
    let data = dir.join("ds");
    let out = emgshift(&["synth", "--out", data.to_str().unwrap(), "--subjects", "2", "--seed", "3", "--spec", spec.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    data.to_str().unwrap().to_owned()
}

#[test]
fn synth_inspect_and_check() {
    let tmp = tempfile::tempdir().unwrap();
    let data = synth_small(tmp.path());

    let out = emgshift(&["inspect", "--data", &data]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("recordings: 16"), "{text}");
    assert!(text.contains("8 x 16 (128 channels"), "{text}");
    assert!(text.contains("subject 2 session 2: 4 recordings, 400-400 samples"), "{text}");

    let out = emgshift(&["convert-check", "--data", &data, "--gestures", "2", "--repetitions", "2"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("ok: 16 recordings"));
}

#[test]
fn incomplete_protocol_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let data = synth_small(tmp.path());
    // Expecting 10 repetitions where only 2 exist.
    let out = emgshift(&["convert-check", "--data", &data, "--gestures", "2"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing g1 r3"));
}

#[test]
fn corrupt_recording_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let data = synth_small(tmp.path());
    let victim = Path::new(&data).join("s01/session1/g01_r01.f32");
    let bytes = fs::read(&victim).unwrap();
    fs::write(&victim, &bytes[..bytes.len() - 4]).unwrap();
    let out = emgshift(&["convert-check", "--data", &data, "--gestures", "2", "--repetitions", "2"]);
    assert_eq!(code(&out), 3);

    let out = emgshift(&["inspect", "--data", tmp.path().join("absent").to_str().unwrap()]);
    assert_eq!(code(&out), 3);
}

#[test]
fn wrong_manifest_version_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let data = synth_small(tmp.path());
    let manifest = Path::new(&data).join("manifest.json");
    let text = fs::read_to_string(&manifest).unwrap().replace("\"format_version\": 1", "\"format_version\": 99");
    fs::write(&manifest, text).unwrap();
    assert_eq!(code(&emgshift(&["inspect", "--data", &data])), 3);
}

#[test]
fn stats_wilcoxon_all_positive() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = tmp.path().join("pairs.csv");
    fs::write(&csv, "x,y\n1.5,0\n2.5,0\n3.5,0\n4.5,0\n5.5,0\n").unwrap();
    let out = emgshift(&["stats", "--input", csv.to_str().unwrap(), "--test", "wilcoxon"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["method"], "WILCOXON_SR");
    assert_eq!(v["statistic"], 15.0);
    assert!((v["p_value"].as_f64().unwrap() - 0.0625).abs() < 1e-12);
}

#[test]
fn stats_anova_ragged_columns() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = tmp.path().join("groups.csv");
    // Groups {1,2,3}, {4,5,6,7}: SSB = 21, SSW = 7, F = 21 / (7 / 5) = 15 on (1, 5).
    fs::write(&csv, "a,b\n1,4\n2,5\n3,6\n,7\n").unwrap();
    let out = emgshift(&["stats", "--input", csv.to_str().unwrap(), "--test", "anova"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((v["statistic"].as_f64().unwrap() - 15.0).abs() < 1e-12);
    assert_eq!(v["n"], 7);
}

#[test]
fn stats_rejects_bad_input() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = tmp.path().join("bad.csv");
    fs::write(&csv, "a,b,c\n1,2,3\n4,5,6\n").unwrap();
    let path = csv.to_str().unwrap();
    assert_eq!(code(&emgshift(&["stats", "--input", path, "--test", "paired-t"])), 2);
    assert_eq!(code(&emgshift(&["stats", "--input", path, "--test", "anova", "--alternative", "up"])), 2);
    fs::write(&csv, "a,b\n1,x\n").unwrap();
    assert_eq!(code(&emgshift(&["stats", "--input", path, "--test", "levene"])), 2);
    assert_eq!(code(&emgshift(&["stats", "--input", "/nonexistent.csv", "--test", "levene"])), 3);
    assert_eq!(code(&emgshift(&["stats", "--input", path, "--test", "kruskal"])), 2);
}

const SMALL_RUN: &str = r#"{
  "experiment": 1,
  "data": {"synthetic": {"subjects": 2}},
  "feature_sets": ["td"],
  "conditions": ["CS-CS", "CS-AVS"],
  "seed": 11
}"#;

#[test]
fn run_writes_deterministic_report() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("cfg.json");
    fs::write(&cfg, SMALL_RUN).unwrap();
    let mut bodies = vec![];
    for name in ["a", "b"] {
        let dir = tmp.path().join(name);
        let out = emgshift(&["run", "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        for file in ["cells.csv", "stats.csv", "report.md", "config.json"] {
            assert!(dir.join(file).is_file(), "{file}");
        }
        bodies.push(fs::read(dir.join("report.md")).unwrap());
    }
    assert_eq!(bodies[0], bodies[1]);
    let cells = fs::read_to_string(tmp.path().join("a/cells.csv")).unwrap();
    // Header plus 2 subjects x 2 conditions.
    assert_eq!(cells.lines().count(), 5, "{cells}");
}

#[test]
fn run_config_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("cfg.json");
    let out_dir = tmp.path().join("out");
    let out = out_dir.to_str().unwrap();

    fs::write(&cfg, r#"{"experiment": 1, "window": 200}"#).unwrap();
    assert_eq!(code(&emgshift(&["run", "--config", cfg.to_str().unwrap(), "--out", out])), 2);

    fs::write(&cfg, r#"{"experiment": 3}"#).unwrap();
    assert_eq!(code(&emgshift(&["run", "--config", cfg.to_str().unwrap(), "--out", out])), 2);

    // Experiment 2 conditions do not belong to experiment 1.
    fs::write(&cfg, r#"{"experiment": 1, "conditions": ["AVS"]}"#).unwrap();
    assert_eq!(code(&emgshift(&["run", "--config", cfg.to_str().unwrap(), "--out", out])), 2);

    // No output directory anywhere.
    fs::write(&cfg, SMALL_RUN).unwrap();
    assert_eq!(code(&emgshift(&["run", "--config", cfg.to_str().unwrap()])), 2);

    assert_eq!(code(&emgshift(&["run", "--config", "/nonexistent.json", "--out", out])), 3);
    assert!(!out_dir.exists());
}

#[test]
fn run_on_dataset_with_missing_repetition_is_a_protocol_error() {
    let tmp = tempfile::tempdir().unwrap();
    let data = synth_small(tmp.path());
    // Drop one even repetition so gesture 1 of subject 1 has no test half.
    let manifest = Path::new(&data).join("manifest.json");
    let mut doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&manifest).unwrap()).unwrap();
    let recs = doc["recordings"].as_array_mut().unwrap();
    let before = recs.len();
    recs.retain(|r| !(r["subject"] == 1 && r["session"] == 1 && r["gesture"] == 1 && r["repetition"] == 2));
    assert_eq!(recs.len(), before - 1);
    fs::write(&manifest, doc.to_string()).unwrap();
    let cfg = tmp.path().join("cfg.json");
    fs::write(&cfg, format!(r#"{{"experiment": 1, "data": {{"dataset": {data:?}}}, "feature_sets": ["td"], "central_s": 0.3}}"#)).unwrap();
    let out = emgshift(&["run", "--config", cfg.to_str().unwrap(), "--out", tmp.path().join("r").to_str().unwrap()]);
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stderr));
}
