use klmat::bench::{emit_csv, preset, presets, run_experiment, ExperimentConfig, SignalSource};
use klmat::filters::FilterSpec;
use klmat::noise::NoiseModel;
use klmat::signals::MgParams;
use klmat::Error;

fn small(algorithms: Vec<FilterSpec>, noise: NoiseModel) -> ExperimentConfig {
    ExperimentConfig {
        name: "small".into(),
        signal: SignalSource::MackeyGlass { params: MgParams::default(), samples: None },
        normalize: false,
        embedding_order: 5,
        n_train: 120,
        n_test: 40,
        algorithms,
        noise,
        n_replicas: 3,
        base_seed: 42,
    }
}

#[test]
fn repeated_runs_are_identical() {
    let cfg = small(
        vec![FilterSpec::Klmat { mu: 0.5, h: 1.0 }, FilterSpec::Lmat { mu: 0.04 }],
        NoiseModel::Wgn { sigma: 0.1 },
    );
    let a = run_experiment(&cfg).unwrap();
    let b = run_experiment(&cfg).unwrap();
    for (x, y) in a.algorithms.iter().zip(&b.algorithms) {
        let bits = |v: &[f64]| v.iter().map(|d| d.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&x.curve.values_db), bits(&y.curve.values_db));
    }
    assert_eq!(a.seeds, vec![42, 43, 44]);
}

#[test]
fn algorithms_share_the_corrupted_stream() {
    // Two copies of one filter in a run must produce identical traces.
    let spec = FilterSpec::Klms { mu: 0.3, h: 1.0 };
    let cfg = small(vec![spec.clone(), spec], NoiseModel::Uniform { variance: 0.01 });
    let run = run_experiment(&cfg).unwrap();
    for r in 0..cfg.n_replicas {
        assert_eq!(run.algorithms[0].traces[r].train_error, run.algorithms[1].traces[r].train_error);
    }
    assert_ne!(run.algorithms[0].traces[0].train_error, run.algorithms[0].traces[1].train_error);
}

#[test]
fn emitted_files_have_expected_shape() {
    let mut cfg = preset("fig2a").unwrap();
    cfg.n_replicas = 2;
    let run = run_experiment(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    emit_csv(&run, dir.path()).unwrap();
    let first = std::fs::read(dir.path().join("klmat.csv")).unwrap();
    let text = String::from_utf8(first.clone()).unwrap();
    assert_eq!(text.lines().count(), 1001);
    assert_eq!(text.lines().next(), Some("iteration,mse_db,mu,codebook_size"));
    let mus: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(2).unwrap()).collect();
    assert!(mus.iter().all(|m| *m == mus[0]));
    assert_eq!(mus[0].parse::<f64>().unwrap(), 0.5);
    let last: Vec<&str> = text.lines().last().unwrap().split(',').collect();
    assert_eq!(last[0], "1000");
    assert_eq!(last[3].parse::<f64>().unwrap(), 1000.0);

    emit_csv(&run, dir.path()).unwrap();
    assert_eq!(std::fs::read(dir.path().join("klmat.csv")).unwrap(), first);
    let manifest = std::fs::read_to_string(dir.path().join("manifest.txt")).unwrap();
    assert!(manifest.contains("replica_seeds = 1, 2"));
    let config_part = manifest.split("# derived").next().unwrap();
    assert_eq!(ExperimentConfig::parse(config_part).unwrap(), cfg);
}

#[test]
fn divergence_is_marked_in_output() {
    let cfg = small(vec![FilterSpec::Klmat { mu: 1e6, h: 1.0 }], NoiseModel::Wgn { sigma: 1.0 });
    let run = run_experiment(&cfg).unwrap();
    let alg = &run.algorithms[0];
    let d = alg.curve.divergence.expect("huge step size diverges");
    assert!(alg.curve.values_db.len() <= d.step);
    let dir = tempfile::tempdir().unwrap();
    emit_csv(&run, dir.path()).unwrap();
    let text = std::fs::read_to_string(dir.path().join("klmat.csv")).unwrap();
    assert!(text.lines().last().unwrap().ends_with(",diverged,,"));
}

#[test]
fn oversized_split_is_a_config_error() {
    let mut cfg = small(vec![FilterSpec::Lmat { mu: 0.01 }], NoiseModel::None);
    cfg.signal = SignalSource::MackeyGlass { params: MgParams::default(), samples: Some(100) };
    assert!(matches!(run_experiment(&cfg), Err(Error::Config(_))));
}

#[test]
fn preset_step_sizes_respect_the_bound_on_clean_data() {
    for cfg in presets() {
        let mut cfg = cfg.scaled(0.05).unwrap();
        cfg.n_replicas = 1;
        let run = run_experiment(&cfg).unwrap();
        for alg in &run.algorithms {
            assert!(
                alg.diagnostics.lambda_max > 0.0 && alg.diagnostics.lambda_max <= 1.0 + 1e-9 || alg.name() == "lmat"
            );
            assert!(alg.divergences.is_empty(), "{} {} diverged", cfg.name, alg.name());
        }
    }
}
