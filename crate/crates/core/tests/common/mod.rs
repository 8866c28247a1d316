#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dfrc_core::experiment::ExperimentConfig;

pub fn dfrc() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dfrc"))
}

/// Small configuration that runs in milliseconds.
pub fn toy_config() -> ExperimentConfig {
    ExperimentConfig {
        n_tx: 12,
        n_rx: 4,
        n_streams: 3,
        n_rf: 4,
        n_paths: 4,
        target_angles_deg: vec![-30.0, 0.0, 30.0],
        eta_values: vec![0.4, 0.7, 1.0],
        snr_db_values: vec![-5.0, 0.0, 5.0],
        num_trials: 6,
        ..Default::default()
    }
}

pub fn write_config(dir: &Path, name: &str, cfg: &ExperimentConfig) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, cfg.to_json()).unwrap();
    path
}

pub fn run(args: &[&str], config: Option<&Path>) -> Output {
    let mut cmd = dfrc();
    cmd.args(args);
    if let Some(c) = config {
        cmd.arg("--config").arg(c);
    }
    cmd.output().expect("dfrc binary runs")
}

pub fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// CSV body lines, skipping `#` comments and the header.
pub fn data_rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}
