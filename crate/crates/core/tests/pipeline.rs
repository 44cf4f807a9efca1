use std::process::Command;

use jellyfuse::pipeline::{
    evaluate, generate_synthetic, read_dataset, train_artifact, write_dataset, Ablation, Artifact, RunConfig,
    TestCase,
};
use jellyfuse::Error;

fn small_config() -> RunConfig {
    let mut cfg = RunConfig::parse(
        r#"
        seed = 3
        repetitions = 2
        ablations = ["su_jfo", "no_optimization"]
        test_cases = ["none", "noise"]
        [dataset]
        real_count = 8
        fake_count = 8
        sequence_length = 2
        width = 64
        height = 64
        ear_size = 18.0
        ear_size_sd = 1.5
        [features]
        frame_size = 64
        grid = 3
        [model]
        hidden = 2
        dbn_hidden = [4]
        [swarm]
        max_iterations = 8
        "#,
    )
    .unwrap();
    cfg.pretrain.epochs = 2;
    cfg
}

fn quiet(_: &str) {}

#[test]
fn artifact_roundtrip_preserves_model_and_predictions() {
    let cfg = small_config();
    let ds = generate_synthetic(&cfg.dataset, 1).unwrap();
    let out = train_artifact(&cfg, &ds, &quiet).unwrap();
    let mut bytes = Vec::new();
    out.artifact.write(&mut bytes).unwrap();
    let back = Artifact::read(bytes.as_slice()).unwrap();
    assert_eq!(back, out.artifact);
    let mut again = Vec::new();
    back.write(&mut again).unwrap();
    assert_eq!(again, bytes);

    let trace = &out.artifact.model.trace;
    assert_eq!(trace.len(), cfg.swarm.max_iterations + 1);
    assert!(trace.windows(2).all(|w| w[1].best_fitness <= w[0].best_fitness));
    assert!((0.0..=1.0).contains(&out.held_out.accuracy));

    assert!(matches!(Artifact::read(&bytes[..bytes.len() - 3]), Err(Error::Format(_))));
    let mut bad = bytes.clone();
    bad[0] ^= 0xff;
    assert!(matches!(Artifact::read(bad.as_slice()), Err(Error::Format(_))));
}

#[test]
fn training_and_evaluation_are_deterministic() {
    let cfg = small_config();
    let ds = generate_synthetic(&cfg.dataset, 2).unwrap();
    let a = train_artifact(&cfg, &ds, &quiet).unwrap();
    let b = train_artifact(&cfg, &ds, &quiet).unwrap();
    let (mut x, mut y) = (Vec::new(), Vec::new());
    a.artifact.write(&mut x).unwrap();
    b.artifact.write(&mut y).unwrap();
    assert_eq!(x, y);

    let r1 = evaluate(&cfg, &ds, &quiet).unwrap();
    let r2 = evaluate(&cfg, &ds, &quiet).unwrap();
    let csv = |r: &jellyfuse::pipeline::EvaluationReport| {
        let mut m = Vec::new();
        r.write_metrics_csv(&mut m).unwrap();
        r.write_roc_csv(&mut m).unwrap();
        m
    };
    assert_eq!(csv(&r1), csv(&r2));
    // repetition 0 trains the same SU-JFO model as `train`
    assert_eq!(r1.convergence, a.artifact.model.trace);
    for method in [Ablation::SuJfo, Ablation::NoOptimization] {
        for case in [TestCase::None, TestCase::Noise] {
            assert!(r1.get(method, case, "accuracy").is_some());
        }
    }
}

#[test]
fn dataset_directory_roundtrip() {
    let cfg = small_config();
    let ds = generate_synthetic(&cfg.dataset, 4).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_dataset(dir.path(), &ds).unwrap();
    let back = read_dataset(dir.path()).unwrap();
    assert_eq!(back, ds);
    std::fs::write(dir.path().join("labels.csv"), "sample,label\nsample_0000,7\n").unwrap();
    assert!(matches!(read_dataset(dir.path()), Err(Error::Format(_))));
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_jellyfuse"))
}

#[test]
fn cli_reports_categorised_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "repetitions = 0\n").unwrap();
    let out = cli().args(["train", "-c"]).arg(&bad).arg("-o").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error[config]: "));

    let out = cli().arg("report").arg(dir.path().join("missing.csv")).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error[io]: "));
}

#[test]
fn cli_train_evaluate_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.toml");
    std::fs::write(&cfg_path, small_config().to_toml()).unwrap();
    let run = |args: &[&str]| {
        let out = cli().args(args).arg("-o").arg(dir.path()).output().unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    };
    let c = cfg_path.to_str().unwrap();
    run(&["train", "-c", c]);
    let art = dir.path().join("artifact.bin");
    run(&["evaluate", "--artifact", art.to_str().unwrap()]);
    for f in ["artifact.bin", "metrics.csv", "roc.csv", "convergence.csv", "run.log"] {
        assert!(dir.path().join(f).is_file(), "{f} missing");
    }
    let metrics = std::fs::read_to_string(dir.path().join("metrics.csv")).unwrap();
    assert!(metrics.starts_with("method,test_case,metric,mean,maximum,std,median,minimum\n"));
    let out = cli().arg("report").arg(dir.path().join("metrics.csv")).output().unwrap();
    assert!(out.status.success());
    let md = String::from_utf8(out.stdout).unwrap();
    assert!(md.contains("## none") && md.contains("| accuracy |"));
}
