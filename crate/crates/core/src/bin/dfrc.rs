//! `dfrc`: experiment runner for the hybrid DFRC beamforming design.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical solver error,
//! 1 anything else (I/O).

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use dfrc_core::experiment::{
    run_beampattern, run_convergence, run_rate_sweep, ExperimentConfig, RunMetadata, TrialRecord,
};
use dfrc_core::Error;

#[derive(Debug, Parser)]
#[command(name = "dfrc", version, about = "Hybrid beamforming for mmWave radar-communication")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mean achievable rate and fitting errors over the (eta, SNR) grid.
    RateSweep(Common),
    /// Radar beampattern of the designed precoder.
    Beampattern {
        #[command(flatten)]
        common: Common,
        /// Average the covariance over `num_trials` channel draws.
        #[arg(long)]
        average: bool,
    },
    /// Objective trace of one seeded design run.
    Convergence(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// JSON experiment config; defaults are used for absent fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides `base_seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; output does not depend on it.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Weighting factor. For rate-sweep it replaces `eta_values`; otherwise
    /// it defaults to the first entry of `eta_values`.
    #[arg(long)]
    eta: Option<f64>,
    /// Also write run metadata (config echo, seeds, wall time, convergence
    /// flags) as JSON to this path.
    #[arg(long)]
    meta: Option<PathBuf>,
}

fn load_config(common: &Common) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::config("--config", format!("{}: {e}", path.display())))?;
            ExperimentConfig::from_json(&text)?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.base_seed = seed;
    }
    if common.workers == 0 {
        return Err(Error::config("--workers", "must be at least 1"));
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(common: &Common, body: &str) -> Result<(), Error> {
    match &common.out {
        Some(path) => fs::write(path, body)?,
        None => std::io::stdout().write_all(body.as_bytes())?,
    }
    Ok(())
}

fn write_meta(
    common: &Common,
    command: &str,
    cfg: &ExperimentConfig,
    eta: Option<f64>,
    started: Instant,
    trials: &[TrialRecord],
) -> Result<(), Error> {
    if let Some(path) = &common.meta {
        let meta = RunMetadata {
            command,
            config: cfg,
            eta,
            workers: common.workers,
            wall_time_s: started.elapsed().as_secs_f64(),
            trials,
        };
        fs::write(path, serde_json::to_string_pretty(&meta)?)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    let started = Instant::now();
    match cli.command {
        Command::RateSweep(common) => {
            let mut cfg = load_config(&common)?;
            if let Some(eta) = common.eta {
                cfg.eta_values = vec![eta];
                cfg.validate()?;
            }
            let sweep = run_rate_sweep(&cfg, common.workers)?;
            emit(&common, &sweep.to_csv())?;
            write_meta(&common, "rate-sweep", &cfg, common.eta, started, &sweep.trials)
        }
        Command::Beampattern { common, average } => {
            let mut cfg = load_config(&common)?;
            cfg.average_beampattern |= average;
            let eta = common.eta.unwrap_or(cfg.eta_values[0]);
            let bp = run_beampattern(&cfg, eta, common.workers)?;
            emit(&common, &bp.to_csv())?;
            write_meta(&common, "beampattern", &cfg, Some(eta), started, &bp.trials)
        }
        Command::Convergence(common) => {
            let cfg = load_config(&common)?;
            let eta = common.eta.unwrap_or(cfg.eta_values[0]);
            let conv = run_convergence(&cfg, eta)?;
            emit(&common, &conv.to_csv())?;
            let record = TrialRecord {
                trial: 0,
                seed: conv.seed,
                eta,
                iterations: conv.report.iterations_used,
                converged: conv.report.converged,
                final_objective: conv.report.final_objective(),
            };
            write_meta(&common, "convergence", &cfg, Some(eta), started, &[record])
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                ExitCode::from(2)
            } else if e.is_numerical() {
                ExitCode::from(3)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
