mod common;

use common::{foresight, small_config, snapshot, stderr, workspace};
use foresight_core::reconstruct::io::{read_frames, read_model, write_frames, write_model};
use foresight_core::reconstruct::{train_on_streams, FrameTensor, ReconstructorKind, TrainConfig};
use foresight_core::FrameStream;

#[test]
fn nominal_simulation_has_no_misbehaviour() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = workspace(dir.path(), &small_config());
    let out = foresight(&cfg, &["simulate"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = std::fs::read_to_string(dir.path().join("work/nominal_a.misbehaviour.csv")).unwrap();
    assert!(csv.starts_with("frame_index,misbehaviour\n"));
    assert_eq!(csv.lines().skip(1).count(), 300);
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",0")));
}

#[test]
fn missing_output_directory_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = small_config();
    config["paths"]["work_dir"] = "does/not/exist".into();
    let cfg = workspace(dir.path(), &config);
    let out = foresight(&cfg, &["simulate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("does not exist"), "{}", stderr(&out));
}

#[test]
fn invalid_epsilon_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = workspace(dir.path(), &small_config());
    for eps in ["0", "1", "1.5", "-0.1"] {
        let out = foresight(&cfg, &["fit", &format!("--epsilon={eps}")]);
        assert_eq!(out.status.code(), Some(2), "eps {eps}");
    }
    let out = foresight(&cfg, &["simulate", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn corrupt_frame_magic_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = workspace(dir.path(), &small_config());
    std::fs::write(dir.path().join("work/nominal_a.frm"), b"FRMX\0\0\0\0").unwrap();
    let out = foresight(&cfg, &["train"]);
    assert_eq!(out.status.code(), Some(2));
    let msg = stderr(&out);
    assert!(msg.contains("magic") && msg.contains("byte 0"), "{msg}");
}

#[test]
fn constant_frames_are_a_numerical_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = serde_json::json!({
        "paths": { "work_dir": "work" },
        "train": { "streams": ["flat"], "hidden_sizes": [2], "epochs": 1 },
        "fit": { "streams": ["flat"] }
    });
    let cfg = workspace(dir.path(), &config);
    let frames = (0..50).map(|_| FrameTensor::filled(4, 4, 1, 0.4).unwrap()).collect();
    let stream = FrameStream::new(frames, 10.0).unwrap();
    write_frames(std::fs::File::create(dir.path().join("work/flat.frm")).unwrap(), &stream).unwrap();
    assert!(foresight(&cfg, &["train"]).status.success());
    let out = foresight(&cfg, &["fit"]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(stderr(&out).contains("degenerate"), "{}", stderr(&out));
}

#[test]
fn nominal_only_evaluation_reports_null_tpr() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = small_config();
    config["eval"]["streams"] = serde_json::json!(["nominal_b"]);
    let cfg = workspace(dir.path(), &config);
    let out = foresight(&cfg, &["pipeline"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("work/report.json")).unwrap()).unwrap();
    assert!(report["metrics"]["tpr"].is_null());
    assert!(report["auc_roc"].is_null());
    assert_eq!(report["anomalous_windows"], 0);
}

#[test]
fn pipeline_equals_separate_commands() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let cfg_a = workspace(a.path(), &small_config());
    let cfg_b = workspace(b.path(), &small_config());
    assert!(foresight(&cfg_a, &["pipeline"]).status.success());
    for cmd in ["simulate", "train", "fit", "detect", "eval"] {
        let out = foresight(&cfg_b, &[cmd]);
        assert!(out.status.success(), "{cmd}: {}", stderr(&out));
    }
    let (sa, sb) = (snapshot(&a.path().join("work")), snapshot(&b.path().join("work")));
    assert!(sa.contains_key("report.json") && sa.contains_key("adverse.alarms.csv"));
    assert_eq!(sa.keys().collect::<Vec<_>>(), sb.keys().collect::<Vec<_>>());
    for (name, bytes) in &sa {
        assert!(bytes == &sb[name], "{name} differs");
    }
}

#[test]
fn trained_model_reloads_bit_identically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = workspace(dir.path(), &small_config());
    assert!(foresight(&cfg, &["simulate"]).status.success());
    assert!(foresight(&cfg, &["train"]).status.success());

    let work = dir.path().join("work");
    let frames: FrameStream = read_frames(std::fs::File::open(work.join("nominal_a.frm")).unwrap(), 10.0).unwrap();
    let hyper = TrainConfig { hidden_sizes: vec![8], epochs: 3, seed: 3, ..TrainConfig::default() };
    let in_memory =
        train_on_streams(std::slice::from_ref(&frames), ReconstructorKind::Sae, &hyper, false).unwrap().model;
    let reloaded: foresight_core::ReconstructorModel =
        read_model(std::fs::File::open(work.join("model.json")).unwrap()).unwrap();

    for frame in frames.frames().iter().step_by(37) {
        let x = in_memory.forward(frame.pixels());
        let y = reloaded.forward(frame.pixels());
        assert!(x.iter().zip(&y).all(|(p, q)| p.to_bits() == q.to_bits()));
    }
    let mut rewritten = Vec::new();
    write_model(&mut rewritten, &reloaded).unwrap();
    assert_eq!(rewritten, std::fs::read(work.join("model.json")).unwrap());
}

#[test]
fn flags_override_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = workspace(dir.path(), &small_config());
    assert!(foresight(&cfg, &["simulate"]).status.success());
    assert!(foresight(&cfg, &["train"]).status.success());
    assert!(foresight(&cfg, &["fit", "--epsilon", "0.01", "--ar-k", "4"]).status.success());
    let cal: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("work/calibration.json")).unwrap()).unwrap();
    assert_eq!(cal["epsilon"].as_f64(), Some(0.01));

    assert!(foresight(&cfg, &["detect"]).status.success());
    let out = foresight(&cfg, &["eval", "--reaction-r", "20,40", "--thresholds", "0.001,0.01,0.1"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let sweep = std::fs::read_to_string(dir.path().join("work/reaction_sweep.csv")).unwrap();
    let rs: Vec<&str> = sweep.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(rs, ["20", "40"]);
    let roc = std::fs::read_to_string(dir.path().join("work/roc.csv")).unwrap();
    assert_eq!(roc.lines().count(), 4);
}

#[test]
fn seed_changes_the_simulation() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let cfg_a = workspace(a.path(), &small_config());
    let cfg_b = workspace(b.path(), &small_config());
    assert!(foresight(&cfg_a, &["simulate"]).status.success());
    assert!(foresight(&cfg_b, &["simulate", "--seed", "4"]).status.success());
    let name = "nominal_a.frm";
    assert_ne!(snapshot(&a.path().join("work"))[name], snapshot(&b.path().join("work"))[name]);
}

#[test]
fn label_writes_partitioning_windows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = workspace(dir.path(), &small_config());
    assert!(foresight(&cfg, &["simulate"]).status.success());
    assert!(foresight(&cfg, &["label"]).status.success());
    let labels = std::fs::read_to_string(dir.path().join("work/adverse.labels.csv")).unwrap();
    let mut next = 0;
    for line in labels.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f[0].parse::<usize>().unwrap(), next);
        next += f[1].parse::<usize>().unwrap();
    }
    assert_eq!(next, 900);
}
