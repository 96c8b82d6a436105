#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn foresight(config: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_foresight"))
        .args(args)
        .arg("--config")
        .arg(config)
        .output()
        .expect("spawn foresight")
}

/// Writes `config.json` plus an empty `work/` next to it.
pub fn workspace(root: &Path, config: &serde_json::Value) -> PathBuf {
    std::fs::create_dir_all(root.join("work")).unwrap();
    let path = root.join("config.json");
    std::fs::write(&path, serde_json::to_vec_pretty(config).unwrap()).unwrap();
    path
}

/// File name to contents for every regular file in `dir`.
pub fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let entry = entry.unwrap();
        if entry.file_type().unwrap().is_file() {
            out.insert(entry.file_name().to_string_lossy().into_owned(), std::fs::read(entry.path()).unwrap());
        }
    }
    out
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Small but complete configuration: two nominal streams and one adverse one.
pub fn small_config() -> serde_json::Value {
    serde_json::json!({
        "seed": 3,
        "paths": { "work_dir": "work" },
        "simulate": { "scenarios": {
            "nominal_a": { "track_seed": 1, "n_frames": 300, "width": 16, "height": 16 },
            "nominal_b": { "track_seed": 2, "n_frames": 300, "width": 16, "height": 16 },
            "adverse": { "track_seed": 3, "n_frames": 900, "width": 16, "height": 16,
                         "conditions": { "day_night_cycle": 1.0, "rain": 1.0, "snow": 1.0, "fog": 1.0 } }
        } },
        "train": { "streams": ["nominal_a"], "hidden_sizes": [8], "epochs": 3 },
        "fit": { "streams": ["nominal_b"], "epsilon": 0.05 },
        "detect": { "streams": ["nominal_b", "adverse"] },
        "eval": { "streams": ["adverse"], "n_thresholds": 50 }
    })
}
