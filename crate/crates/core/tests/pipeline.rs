use emg_shift::experiments::{run_experiment, Condition, ExperimentConfig, StatStatus};
use emg_shift::features::{FeatureMatrix, FeatureSet};
use emg_shift::ingest::synthetic::{render_field, SourceCentre};
use emg_shift::learn::fit_lda;
use emg_shift::model::GridLayout;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Small synthetic run; `extra` is spliced into the top-level JSON object.
fn config(experiment: u8, subjects: u32, spec: &str, extra: &str) -> ExperimentConfig {
    let json = format!(
        r#"{{
          "experiment": {experiment},
          "data": {{"synthetic": {{"subjects": {subjects}, "spec": {{"gestures": 3, "repetitions": 4, "duration_s": 0.6{spec}}}}}}},
          "feature_sets": ["td"],
          "central_s": 0.4,
          "seed": 5{extra}
        }}"#
    );
    ExperimentConfig::from_json(&json).unwrap()
}

#[test]
fn shifting_sources_moves_the_field() {
    let layout = GridLayout::capgmyo();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let centres: Vec<SourceCentre> = (0..3)
        .map(|_| SourceCentre {
            row: rng.random_range(0.0..7.0),
            col: rng.random_range(0.0..16.0),
        })
        .collect();
    let sources: Vec<Vec<f64>> = (0..3).map(|_| (0..50).map(|_| rng.sample(StandardNormal)).collect()).collect();
    let field = render_field(&layout, 1.5, &centres, &sources).unwrap();
    for delta in [-3i32, -1, 1, 2] {
        let moved: Vec<SourceCentre> = centres
            .iter()
            .map(|c| SourceCentre {
                row: c.row - f64::from(delta),
                col: c.col,
            })
            .collect();
        let shifted = render_field(&layout, 1.5, &moved, &sources).unwrap();
        for r in 0..layout.rows as i32 {
            let Ok(src_row) = usize::try_from(r + delta) else { continue };
            if src_row >= layout.rows {
                continue;
            }
            for c in 0..layout.cols {
                let a = field.channel(layout.channel_at(src_row, c).unwrap());
                let b = shifted.channel(layout.channel_at(r as usize, c).unwrap());
                assert!(a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-9), "delta {delta} row {r}");
            }
        }
    }
}

#[test]
fn single_row_grid_makes_conditions_coincide() {
    let spec = r#", "layout": {"rows": 1, "cols": 16, "module_width": 2, "pitch_mm": 8.0}, "session_row_shift": 0"#;
    let report = run_experiment(&config(1, 2, spec, "")).unwrap();
    for subject in [1, 2] {
        let acc: Vec<f64> = report.cells.iter().filter(|c| c.unit.subject == subject).map(|c| c.accuracy).collect();
        assert_eq!(acc.len(), 4);
        assert!(acc.iter().all(|&a| a == acc[0]), "{acc:?}");
    }
}

#[test]
fn reports_are_reproducible() {
    let cfg = config(1, 2, "", r#", "conditions": ["CS-CS", "AVS-CS"]"#);
    let a = run_experiment(&cfg).unwrap();
    let b = run_experiment(&cfg).unwrap();
    assert_eq!(a.cells_csv(), b.cells_csv());
    assert_eq!(a.stats_csv(), b.stats_csv());
    assert_eq!(a.markdown(), b.markdown());

    for condition in [Condition::CsCs, Condition::AvsCs] {
        let acc: Vec<f64> = a.cells.iter().filter(|c| c.condition == condition).map(|c| c.accuracy).collect();
        let mean = acc.iter().sum::<f64>() / acc.len() as f64;
        let agg = a.aggregate(Some(FeatureSet::Td), condition, false).unwrap();
        assert_eq!(agg.n, 2);
        assert!((agg.mean - mean).abs() < 1e-12);
        // A single feature set: the average row equals the set's row.
        let avg = a.aggregate(None, condition, false).unwrap();
        assert!((avg.mean - mean).abs() < 1e-12);
    }
}

#[test]
fn one_subject_is_flagged_insufficient() {
    let report = run_experiment(&config(1, 1, "", "")).unwrap();
    assert!(!report.statistics.is_empty());
    for s in &report.statistics {
        assert_eq!(s.status, StatStatus::InsufficientN, "{}", s.name);
        assert!(s.result.is_none());
    }
}

#[test]
fn both_directions_are_separate_units() {
    let report = run_experiment(&config(2, 2, "", r#", "conditions": ["CS"], "session_direction": "both""#)).unwrap();
    let mut units: Vec<_> = report.cells.iter().map(|c| (c.unit.subject, c.unit.sessions)).collect();
    units.sort();
    units.dedup();
    assert_eq!(
        units,
        [(1, Some((1, 2))), (1, Some((2, 1))), (2, Some((1, 2))), (2, Some((2, 1)))]
    );
    assert_eq!(report.aggregate(Some(FeatureSet::Td), Condition::Cs, false).unwrap().n, 4);
}

fn clustered(rng: &mut ChaCha8Rng, classes: u32, per_class: usize, d: usize, spread: f64) -> (Vec<Vec<f64>>, Vec<u32>) {
    let centres: Vec<Vec<f64>> = (0..classes).map(|_| (0..d).map(|_| rng.random_range(-5.0..5.0)).collect()).collect();
    let mut rows = vec![];
    let mut labels = vec![];
    for (g, centre) in (1..=classes).zip(&centres) {
        for _ in 0..per_class {
            rows.push(centre.iter().map(|c| c + spread * rng.sample::<f64, _>(StandardNormal)).collect());
            labels.push(g);
        }
    }
    (rows, labels)
}

#[test]
fn separable_classes_resubstitute_perfectly() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (rows, labels) = clustered(&mut rng, 8, 40, 6, 0.05);
    let x = FeatureMatrix::from_rows(&rows, &labels).unwrap();
    let model = fit_lda(&x, 1e-6).unwrap();
    assert!(model.accuracy(&x).unwrap() >= 0.99);
}

#[test]
fn permuted_labels_give_chance_accuracy() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (rows, mut labels) = clustered(&mut rng, 8, 200, 6, 1.0);
    labels.shuffle(&mut rng);
    let (train_rows, test_rows) = rows.split_at(800);
    let (train_labels, test_labels) = labels.split_at(800);
    let model = fit_lda(&FeatureMatrix::from_rows(train_rows, train_labels).unwrap(), 1e-6).unwrap();
    let acc = model.accuracy(&FeatureMatrix::from_rows(test_rows, test_labels).unwrap()).unwrap();
    // 800 draws around 1/8: sd ~ 0.012.
    assert!((acc - 0.125).abs() < 0.05, "{acc}");
}
