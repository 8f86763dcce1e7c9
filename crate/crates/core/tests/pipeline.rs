use std::fs;

use callscope::audio::{read_wav, slice_segment};
use callscope::embeddings::{embedding_path, N_LAYERS};
use callscope::experiment::{
    build_results_table, collect_reports, evaluate_checkpoint, probe_layers, run_experiment, ExperimentConfig,
    ExperimentReport, FeatureKind, ProbeConfig,
};
use callscope::manifest::{load_manifest, Task};
use callscope::nnet::TrainConfig;
use callscope::synthetic::{make_synthetic_dataset, write_synthetic_embeddings, SyntheticEmbeddingSpec, SyntheticSpec};
use callscope::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn small_spec() -> SyntheticSpec {
    SyntheticSpec { count_per_class: 20, ..SyntheticSpec::default() }
}

fn dft_peak_bin(x: &[f64]) -> usize {
    let n = x.len();
    (0..=n / 2)
        .map(|k| {
            let (mut re, mut im) = (0.0, 0.0);
            for (t, &v) in x.iter().enumerate() {
                let a = -std::f64::consts::TAU * (k * t % n) as f64 / n as f64;
                re += v * a.cos();
                im += v * a.sin();
            }
            (k, re * re + im * im)
        })
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap()
        .0
}

#[test]
fn synthetic_tones_peak_at_their_class_frequency() {
    let dir = tempfile::tempdir().unwrap();
    let spec = SyntheticSpec { count_per_class: 3, ..SyntheticSpec::default() };
    let m = make_synthetic_dataset(&spec, 11, dir.path()).unwrap();
    for rec in &m.records {
        let w = read_wav(m.resolve_wav(rec)).unwrap();
        let seg = slice_segment(&w, rec.start_s, rec.end_s).unwrap();
        let n = seg.len() as f64;
        let tone: f64 = rec.call_type.as_deref().unwrap()[4..].parse().unwrap();
        let expected = tone * n / 44_100.0;
        let got = dft_peak_bin(&seg.samples) as f64;
        assert!((got - expected).abs() <= 1.0, "{}: bin {got} vs {expected}", rec.segment_id);
    }
}

#[test]
fn c22_experiment_is_reproducible_and_above_chance() {
    let dir = tempfile::tempdir().unwrap();
    make_synthetic_dataset(&small_spec(), 5, &dir.path().join("data")).unwrap();
    let cfg = |out: &str| ExperimentConfig {
        train: TrainConfig { max_epochs: 10, ..TrainConfig::mlp() },
        ..ExperimentConfig::new(dir.path().join("data/manifest.csv"), Task::Ctid, FeatureKind::C22, 44_100, 3, dir.path().join(out))
    };
    let a = run_experiment(&cfg("a")).unwrap();
    run_experiment(&cfg("b")).unwrap();
    assert!((a.report.eval.chance - 100.0 / 3.0).abs() < 1e-12);
    assert!(a.report.eval.uar > a.report.eval.chance);
    for file in ["report.json", "model.mkm", "history.csv"] {
        assert_eq!(fs::read(dir.path().join("a").join(file)).unwrap(), fs::read(dir.path().join("b").join(file)).unwrap(), "{file}");
    }
    let back = ExperimentReport::load(&a.report_path).unwrap();
    assert_eq!(back, a.report);

    let test = load_manifest(&dir.path().join("a/split/test.csv")).unwrap();
    let again = evaluate_checkpoint(&cfg("a"), &dir.path().join("a/model.mkm"), &test).unwrap();
    assert_eq!(again, a.report.eval);

    let reports = collect_reports(&[dir.path().to_path_buf()]).unwrap();
    assert_eq!(reports.len(), 2);
    assert_eq!(build_results_table(&reports).unwrap().rows.len(), 1);
}

#[test]
fn missing_layer_file_names_segment_and_layer() {
    let dir = tempfile::tempdir().unwrap();
    let m = make_synthetic_dataset(&small_spec(), 5, &dir.path().join("data")).unwrap();
    let emb = dir.path().join("emb");
    let spec = SyntheticEmbeddingSpec { n_frames: 2, ..SyntheticEmbeddingSpec::default() };
    write_synthetic_embeddings(&m, &spec, 1, &emb).unwrap();
    let victim = &m.records[17].segment_id;
    fs::remove_file(embedding_path(&emb, victim, 6)).unwrap();
    let mut cfg = ExperimentConfig::new(dir.path().join("data/manifest.csv"), Task::Ctid, FeatureKind::WLM, 16_000, 0, dir.path().join("out"));
    cfg.wlm_layer = Some(6);
    cfg.embeddings_dir = Some(emb);
    match run_experiment(&cfg) {
        Err(Error::MissingEmbedding { segment_id, layer, .. }) => {
            assert_eq!(&segment_id, victim);
            assert_eq!(layer, 6);
        }
        other => panic!("expected a missing embedding, got {:?}", other.map(|o| o.report)),
    }
    cfg.wlm_layer = Some(3);
    assert!(run_experiment(&cfg).unwrap().report.eval.uar > 100.0 / 3.0);
}

#[test]
fn probe_matrix_peaks_at_the_informative_layer() {
    let dir = tempfile::tempdir().unwrap();
    let spec = SyntheticSpec { count_per_class: 60, min_duration_ms: 5.0, max_duration_ms: 5.0, ..SyntheticSpec::default() };
    let m = make_synthetic_dataset(&spec, 8, &dir.path().join("data")).unwrap();
    let emb = dir.path().join("emb");
    write_synthetic_embeddings(&m, &SyntheticEmbeddingSpec { n_frames: 3, ..Default::default() }, 8, &emb).unwrap();
    let cfg = ProbeConfig {
        dataset_manifest: dir.path().join("data/manifest.csv"),
        embeddings_dir: emb,
        tasks: Task::ALL.to_vec(),
        train: TrainConfig::mlp(),
        seed: 2,
        output_dir: dir.path().join("probe"),
    };
    let lm = probe_layers(&cfg).unwrap();
    assert_eq!(lm.best_layers(), vec![3; 3]);
    for row in &lm.normalized {
        assert_eq!(row.len(), N_LAYERS);
        assert_eq!(row.iter().copied().fold(f64::INFINITY, f64::min), 0.0);
        assert_eq!(row.iter().copied().fold(f64::NEG_INFINITY, f64::max), 1.0);
    }
    assert!(dir.path().join("probe/layers.csv").exists());
}

fn random_report(rng: &mut ChaCha8Rng, dataset: &str, feature: FeatureKind, sr: u32, task: Task) -> ExperimentReport {
    let preds: Vec<usize> = (0..30).map(|_| rng.random_range(0..3)).collect();
    let truths: Vec<usize> = (0..30).map(|i| i % 3).collect();
    ExperimentReport {
        dataset: dataset.into(),
        task,
        feature,
        sample_rate: sr,
        wlm_layer: None,
        seed: 0,
        shuffle_labels: false,
        classes: vec!["a".into(), "b".into(), "c".into()],
        split_sizes: [0, 0, 30],
        epochs_run: 1,
        best_epoch: 0,
        eval: callscope::eval::EvalReport::from_predictions(&preds, &truths, 3).unwrap(),
    }
}

#[test]
fn best_flags_match_brute_force_maximum() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..50 {
        let mut reports = Vec::new();
        for dataset in ["D1", "D2"] {
            for (feature, sr) in [(FeatureKind::C22, 44_100), (FeatureKind::E2E, 44_100), (FeatureKind::E2E, 16_000)] {
                for task in Task::ALL {
                    if rng.random_bool(0.8) {
                        reports.push(random_report(&mut rng, dataset, feature, sr, task));
                    }
                }
            }
        }
        if reports.is_empty() {
            continue;
        }
        let table = build_results_table(&reports).unwrap();
        for row in &table.rows {
            for (task, &uar) in &row.uar {
                let max = reports
                    .iter()
                    .filter(|r| r.dataset == row.dataset && r.task == *task)
                    .map(|r| r.eval.uar)
                    .fold(f64::NEG_INFINITY, f64::max);
                assert_eq!(row.best[task], uar == max);
            }
            for task in Task::ALL {
                let present = reports.iter().any(|r| {
                    r.dataset == row.dataset && r.feature.to_string() == row.feature && r.sample_rate == row.sample_rate && r.task == task
                });
                assert_eq!(row.uar.contains_key(&task), present);
            }
        }
    }
}
