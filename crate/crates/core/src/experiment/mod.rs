//! Seeded Monte Carlo harness for rate-tradeoff curves, beampatterns and
//! convergence traces.
//!
//! Trials are independent and keyed by `base_seed + trial`; they may run on
//! any number of worker threads, and results are reduced in trial order so the
//! emitted tables never depend on the worker count.

mod config;

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

pub use config::{default_eta_grid, ExperimentConfig};

use crate::altmin::{taltmin, AltMinReport};
use crate::array::{beampattern, build_radar_beamformer, covariance_of, TargetScene, UlaConfig};
use crate::channel::{generate_channel, optimal_digital_beamformers, ChannelParams};
use crate::metrics::{achievable_rate, fitting_errors};
use crate::{ComplexMat, Error, Result};

/// Everything one trial needs: channel, reference precoders, radar target.
#[derive(Debug, Clone)]
pub struct TrialSetup {
    pub seed: u64,
    pub channel: ComplexMat,
    pub f_com: ComplexMat,
    pub w_com: ComplexMat,
    pub f_rad: ComplexMat,
}

pub fn trial_setup(cfg: &ExperimentConfig, trial: usize) -> Result<TrialSetup> {
    let seed = cfg.trial_seed(trial);
    let channel = generate_channel(&ChannelParams {
        num_tx: cfg.n_tx,
        num_rx: cfg.n_rx,
        num_paths: cfg.n_paths,
        rng_seed: seed,
    })?;
    let digital =
        optimal_digital_beamformers(&channel.matrix, cfg.n_streams, cfg.effective_total_power())?;
    let scene = TargetScene::from_degrees(&cfg.target_angles_deg, cfg.n_tx)?;
    let f_rad = build_radar_beamformer(&scene, cfg.effective_total_power())?;
    Ok(TrialSetup {
        seed,
        channel: channel.matrix,
        f_com: digital.precoder,
        w_com: digital.combiner,
        f_rad,
    })
}

/// Run the design for one trial at one weighting factor.
pub fn design(cfg: &ExperimentConfig, setup: &TrialSetup, eta: f64) -> Result<AltMinReport> {
    taltmin(
        &setup.f_com,
        &setup.f_rad,
        cfg.n_rf,
        &cfg.altmin_config(eta, setup.seed),
    )
}

fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Validation(format!("cannot start {workers} workers: {e}")))
}

/// Map `f` over trials on `workers` threads, returning results in trial
/// order; the lowest failing trial index is reported.
fn map_trials<T, F>(num_trials: usize, workers: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
{
    let pool = thread_pool(workers)?;
    let results: Vec<Result<T>> =
        pool.install(|| (0..num_trials).into_par_iter().map(&f).collect());
    results
        .into_iter()
        .enumerate()
        .map(|(trial, r)| {
            r.map_err(|e| Error::Trial {
                trial,
                source: Box::new(e),
            })
        })
        .collect()
}

/// Decimal with 17 significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateRow {
    pub eta: f64,
    pub snr_db: f64,
    pub mean_rate: f64,
    pub std_rate: f64,
    pub mean_comm_err: f64,
    pub mean_radar_err: f64,
    pub mean_iterations: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub eta: f64,
    pub iterations: usize,
    pub converged: bool,
    pub final_objective: f64,
}

#[derive(Debug, Clone)]
pub struct RateSweep {
    pub rows: Vec<RateRow>,
    pub trials: Vec<TrialRecord>,
    /// Per-trial rates, `rates[trial][eta_index][snr_index]`.
    pub rates: Vec<Vec<Vec<f64>>>,
}

pub const RATE_SWEEP_HEADER: &str =
    "eta,snr_db,mean_rate,std_rate,mean_comm_err,mean_radar_err,mean_iterations";

impl RateSweep {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(RATE_SWEEP_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                fmt_num(r.eta),
                fmt_num(r.snr_db),
                fmt_num(r.mean_rate),
                fmt_num(r.std_rate),
                fmt_num(r.mean_comm_err),
                fmt_num(r.mean_radar_err),
                fmt_num(r.mean_iterations)
            );
        }
        out
    }
}

struct EtaOutcome {
    rates: Vec<f64>,
    comm_err: f64,
    radar_err: f64,
    iterations: usize,
    converged: bool,
    final_objective: f64,
}

/// Mean and sample standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// Rate and fitting errors over the `(eta, SNR)` grid, averaged over trials.
pub fn run_rate_sweep(cfg: &ExperimentConfig, workers: usize) -> Result<RateSweep> {
    cfg.validate()?;
    let mut etas = cfg.eta_values.clone();
    etas.sort_by(f64::total_cmp);
    let mut snrs = cfg.snr_db_values.clone();
    snrs.sort_by(f64::total_cmp);

    let per_trial = map_trials(cfg.num_trials, workers, |trial| {
        let setup = trial_setup(cfg, trial)?;
        etas.iter()
            .map(|&eta| {
                let report = design(cfg, &setup, eta)?;
                let f = report.beamformer.materialize();
                let f_rad_u = &setup.f_rad * report.unitary.matrix();
                let errs = fitting_errors(&f, &setup.f_com, &f_rad_u, eta)?;
                let rates = snrs
                    .iter()
                    .map(|&snr| achievable_rate(&setup.channel, &f, &setup.w_com, snr))
                    .collect::<Result<Vec<_>>>()?;
                Ok(EtaOutcome {
                    rates,
                    comm_err: errs.comm,
                    radar_err: errs.radar,
                    iterations: report.iterations_used,
                    converged: report.converged,
                    final_objective: report.final_objective(),
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let n = per_trial.len() as f64;
    let mut rows = Vec::with_capacity(etas.len() * snrs.len());
    for (ei, &eta) in etas.iter().enumerate() {
        let comm = per_trial.iter().map(|t| t[ei].comm_err).sum::<f64>() / n;
        let radar = per_trial.iter().map(|t| t[ei].radar_err).sum::<f64>() / n;
        let iters = per_trial.iter().map(|t| t[ei].iterations as f64).sum::<f64>() / n;
        for (si, &snr) in snrs.iter().enumerate() {
            let xs: Vec<f64> = per_trial.iter().map(|t| t[ei].rates[si]).collect();
            let (mean, std) = mean_std(&xs);
            rows.push(RateRow {
                eta,
                snr_db: snr,
                mean_rate: mean,
                std_rate: std,
                mean_comm_err: comm,
                mean_radar_err: radar,
                mean_iterations: iters,
            });
        }
    }
    let mut trials = Vec::new();
    for (trial, outcomes) in per_trial.iter().enumerate() {
        for (ei, o) in outcomes.iter().enumerate() {
            trials.push(TrialRecord {
                trial,
                seed: cfg.trial_seed(trial),
                eta: etas[ei],
                iterations: o.iterations,
                converged: o.converged,
                final_objective: o.final_objective,
            });
        }
    }
    let rates = per_trial
        .into_iter()
        .map(|t| t.into_iter().map(|o| o.rates).collect())
        .collect();
    Ok(RateSweep {
        rows,
        trials,
        rates,
    })
}

#[derive(Debug, Clone)]
pub struct BeampatternRun {
    pub eta: f64,
    pub averaged: bool,
    pub angles_deg: Vec<f64>,
    pub gains: Vec<f64>,
    pub trials: Vec<TrialRecord>,
}

pub const BEAMPATTERN_HEADER: &str = "angle_deg,gain";

impl BeampatternRun {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# eta={}", fmt_num(self.eta));
        let _ = writeln!(
            out,
            "# mode={}",
            if self.averaged { "averaged" } else { "single" }
        );
        let _ = writeln!(out, "# trials={}", self.trials.len());
        let seeds: Vec<String> = self.trials.iter().map(|t| t.seed.to_string()).collect();
        let _ = writeln!(out, "# seeds={}", seeds.join(" "));
        out.push_str(BEAMPATTERN_HEADER);
        out.push('\n');
        for (a, g) in self.angles_deg.iter().zip(&self.gains) {
            let _ = writeln!(out, "{},{}", fmt_num(*a), fmt_num(*g));
        }
        out
    }

    pub fn pattern(&self) -> Vec<(f64, f64)> {
        self.angles_deg.iter().copied().zip(self.gains.iter().copied()).collect()
    }
}

/// Radar beampattern of the designed hybrid precoder. Single-run mode uses
/// trial 0; averaged mode averages `F F^H` over all `num_trials` trials.
pub fn run_beampattern(cfg: &ExperimentConfig, eta: f64, workers: usize) -> Result<BeampatternRun> {
    cfg.validate()?;
    check_eta_arg(eta)?;
    let trials = if cfg.average_beampattern { cfg.num_trials } else { 1 };
    let runs = map_trials(trials, workers, |trial| {
        let setup = trial_setup(cfg, trial)?;
        let report = design(cfg, &setup, eta)?;
        let r = covariance_of(&report.beamformer.materialize());
        Ok((
            r,
            TrialRecord {
                trial,
                seed: setup.seed,
                eta,
                iterations: report.iterations_used,
                converged: report.converged,
                final_objective: report.final_objective(),
            },
        ))
    })?;
    let mut cov = ComplexMat::zeros(cfg.n_tx, cfg.n_tx);
    for (r, _) in &runs {
        cov += r;
    }
    cov /= num_complex::Complex64::new(runs.len() as f64, 0.0);
    let ula = UlaConfig::half_wavelength(cfg.n_tx)?;
    let grid = cfg.beampattern_grid_deg;
    let gains = beampattern(&cov, &ula, &grid.radians())?;
    Ok(BeampatternRun {
        eta,
        averaged: cfg.average_beampattern,
        angles_deg: grid.degrees(),
        gains,
        trials: runs.into_iter().map(|(_, t)| t).collect(),
    })
}

#[derive(Debug, Clone)]
pub struct ConvergenceRun {
    pub eta: f64,
    pub seed: u64,
    pub report: AltMinReport,
}

pub const CONVERGENCE_HEADER: &str = "iteration,objective";

impl ConvergenceRun {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(CONVERGENCE_HEADER);
        out.push('\n');
        for (k, f) in self.report.objective_trace.iter().enumerate() {
            let _ = writeln!(out, "{k},{}", fmt_num(*f));
        }
        out
    }
}

/// Objective trace of one seeded run (trial 0).
pub fn run_convergence(cfg: &ExperimentConfig, eta: f64) -> Result<ConvergenceRun> {
    cfg.validate()?;
    check_eta_arg(eta)?;
    let setup = trial_setup(cfg, 0)?;
    let report = design(cfg, &setup, eta)?;
    Ok(ConvergenceRun {
        eta,
        seed: setup.seed,
        report,
    })
}

fn check_eta_arg(eta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&eta) {
        Ok(())
    } else {
        Err(Error::config("eta", format!("{eta} outside [0, 1]")))
    }
}

/// Run metadata written next to a table.
#[derive(Debug, Clone, Serialize)]
pub struct RunMetadata<'a> {
    pub command: &'a str,
    pub config: &'a ExperimentConfig,
    pub eta: Option<f64>,
    pub workers: usize,
    pub wall_time_s: f64,
    pub trials: &'a [TrialRecord],
}
