//! Joint hybrid beamformer design by triple alternating minimization.
//!
//! The design objective is
//!
//! ```text
//! f = eta ||F_RF F_BB - F_com||_F^2 + (1 - eta) ||F_RF F_BB - F_rad U||_F^2
//! ```
//!
//! over partially-connected `F_RF`, `||F_RF F_BB||_F^2 = P_T` and
//! `U U^H = I`. Each of the three blocks has a globally optimal closed-form or
//! certified update ([`solve_unitary`], [`solve_analog`], [`solve_baseband`]),
//! so cycling through them never increases `f`.

mod phase;
mod procrustes;
mod sphere;

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

pub use phase::{optimal_row_phase, row_correlation, row_objective, solve_analog};
pub use procrustes::{solve_unitary, AuxiliaryUnitary, SEMI_UNITARY_TOL};
pub use sphere::{
    quadratic_objective, solve_sphere_ls, KktCertificate, SphereLsSolution, KKT_NORM_TOL,
    KKT_PSD_TOL, KKT_RESIDUAL_TOL, SECULAR_TOL,
};

use crate::hybrid::{
    baseband_power_target, normalize_power, AnalogBeamformer, BasebandBeamformer,
    HybridBeamformer,
};
use crate::linalg::{complex_gaussian, orthonormal_rows};
use crate::rng::{seeded, INIT_STREAM};
use crate::{ComplexMat, Error, Result};

use phase::check_eta;

/// Stopping threshold on `|f^(k) - f^(k-1)|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Tolerance {
    /// `epsilon = value * (1 + f^(0))`.
    Relative(f64),
    Absolute(f64),
}

impl Tolerance {
    fn resolve(self, f0: f64) -> f64 {
        match self {
            Tolerance::Relative(r) => r * (1.0 + f0),
            Tolerance::Absolute(a) => a,
        }
    }

    fn value(self) -> f64 {
        match self {
            Tolerance::Relative(v) | Tolerance::Absolute(v) => v,
        }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::Relative(1e-5)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AltMinConfig {
    pub eta: f64,
    pub total_power: f64,
    pub tolerance: Tolerance,
    pub max_iterations: usize,
    pub rng_seed: u64,
}

impl AltMinConfig {
    pub fn new(eta: f64, total_power: f64) -> Self {
        Self {
            eta,
            total_power,
            tolerance: Tolerance::default(),
            max_iterations: 100,
            rng_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_eta(self.eta)?;
        if !(self.total_power > 0.0 && self.total_power.is_finite()) {
            return Err(Error::Validation(format!(
                "total power must be positive, got {}",
                self.total_power
            )));
        }
        let tol = self.tolerance.value();
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::Validation(format!("tolerance must be positive, got {tol}")));
        }
        if self.max_iterations == 0 {
            return Err(Error::Validation("max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

/// The weighted fitting objective for a materialized hybrid precoder
/// `x = F_RF F_BB` against `F_com` and `F_rad U`.
pub fn objective_of(x: &ComplexMat, f_com: &ComplexMat, f_rad_u: &ComplexMat, eta: f64) -> Result<f64> {
    if x.shape() != f_com.shape() || x.shape() != f_rad_u.shape() {
        return Err(Error::Dimension(format!(
            "objective operands {:?}, {:?}, {:?} differ",
            x.shape(),
            f_com.shape(),
            f_rad_u.shape()
        )));
    }
    let mut com = 0.0;
    let mut rad = 0.0;
    for ((a, b), c) in x.iter().zip(f_com.iter()).zip(f_rad_u.iter()) {
        com += (a - b).norm_sqr();
        rad += (a - c).norm_sqr();
    }
    Ok(eta * com + (1.0 - eta) * rad)
}

/// Objective in terms of the individual design variables.
pub fn objective(
    f_rf: &AnalogBeamformer,
    f_bb: &ComplexMat,
    u: &AuxiliaryUnitary,
    f_com: &ComplexMat,
    f_rad: &ComplexMat,
    eta: f64,
) -> Result<f64> {
    let (n_tar, n_s) = u.matrix().shape();
    if f_rad.ncols() != n_tar || f_bb.ncols() != n_s {
        return Err(Error::Dimension(format!(
            "U is {n_tar}x{n_s}, F_rad has {} columns, F_BB has {}",
            f_rad.ncols(),
            f_bb.ncols()
        )));
    }
    if n_s < n_tar {
        return Err(Error::Dimension("fewer streams than targets".into()));
    }
    let x = f_rf.apply(f_bb)?;
    objective_of(&x, f_com, &(f_rad * u.matrix()), eta)
}

/// Baseband update with the analog stage and `U` frozen.
#[derive(Debug, Clone)]
pub struct BasebandSolution {
    pub baseband: BasebandBeamformer,
    pub certificate: KktCertificate,
}

/// Minimize the objective over `F_BB` on `||F_BB||_F^2 = N_RF P_T / N_t`.
///
/// Stacking `A = [sqrt(eta) F_RF; sqrt(1-eta) F_RF]` and
/// `B = [sqrt(eta) F_com; sqrt(1-eta) F_rad U]` gives the sphere LS problem
/// with `Q = A^H A = F_RF^H F_RF` and `G = A^H B = F_RF^H (eta F_com + (1-eta) F_rad U)`.
pub fn solve_baseband(
    f_rf: &AnalogBeamformer,
    f_com: &ComplexMat,
    f_rad_u: &ComplexMat,
    eta: f64,
    total_power: f64,
) -> Result<BasebandSolution> {
    check_eta(eta)?;
    let n_t = f_rf.num_antennas();
    if f_com.nrows() != n_t || f_rad_u.shape() != f_com.shape() {
        return Err(Error::Dimension(format!(
            "F_com {:?} and F_rad U {:?} must both have {n_t} rows",
            f_com.shape(),
            f_rad_u.shape()
        )));
    }
    let c = baseband_power_target(n_t, f_rf.num_rf_chains(), total_power);
    let rf = f_rf.to_matrix();
    let q = rf.adjoint() * &rf;
    let target = f_com * Complex64::new(eta, 0.0) + f_rad_u * Complex64::new(1.0 - eta, 0.0);
    let g = rf.adjoint() * target;
    let sol = solve_sphere_ls(&q, &g, c)?;
    Ok(BasebandSolution {
        baseband: BasebandBeamformer::new(sol.x)?,
        certificate: sol.certificate,
    })
}

/// Outcome of one alternating-minimization run.
#[derive(Debug, Clone)]
pub struct AltMinReport {
    pub beamformer: HybridBeamformer,
    pub unitary: AuxiliaryUnitary,
    /// `f^(0), f^(1), ..., f^(iterations_used)`.
    pub objective_trace: Vec<f64>,
    pub iterations_used: usize,
    pub converged: bool,
    /// Absolute threshold the stop rule used.
    pub epsilon: f64,
}

impl AltMinReport {
    pub fn final_objective(&self) -> f64 {
        *self.objective_trace.last().expect("trace holds f^(0)")
    }
}

/// Random feasible starting point: uniform phases, Gaussian baseband at the
/// target power, orthonormalized Gaussian `U`.
pub fn random_start<R: Rng + ?Sized>(
    rng: &mut R,
    num_antennas: usize,
    num_rf_chains: usize,
    num_streams: usize,
    num_targets: usize,
    total_power: f64,
) -> Result<(AnalogBeamformer, BasebandBeamformer, AuxiliaryUnitary)> {
    let phases: Vec<f64> = (0..num_antennas).map(|_| rng.random_range(0.0..TAU)).collect();
    let analog = AnalogBeamformer::new(num_rf_chains, phases)?;
    let raw = BasebandBeamformer::new(complex_gaussian(rng, num_rf_chains, num_streams))?;
    let baseband = normalize_power(&raw, num_antennas, num_rf_chains, total_power)?;
    let u = orthonormal_rows(&complex_gaussian(rng, num_targets, num_streams))?;
    Ok((analog, baseband, AuxiliaryUnitary::new(u)?))
}

/// Triple alternating minimization `U -> F_RF -> F_BB` from a seeded random
/// start, stopping once `|f^(k) - f^(k-1)| < epsilon` or after
/// `max_iterations` sweeps.
pub fn taltmin(
    f_com: &ComplexMat,
    f_rad: &ComplexMat,
    num_rf_chains: usize,
    cfg: &AltMinConfig,
) -> Result<AltMinReport> {
    cfg.validate()?;
    let (n_t, n_s) = f_com.shape();
    let n_tar = f_rad.ncols();
    if f_rad.nrows() != n_t {
        return Err(Error::Dimension(format!(
            "F_com has {n_t} rows, F_rad has {}",
            f_rad.nrows()
        )));
    }
    if num_rf_chains == 0 || n_t % num_rf_chains != 0 {
        return Err(Error::Structure(format!(
            "{n_t} antennas not divisible by {num_rf_chains} RF chains"
        )));
    }
    if n_tar == 0 || n_t % n_tar != 0 {
        return Err(Error::Structure(format!(
            "{n_t} antennas not divisible by {n_tar} targets"
        )));
    }
    if n_s < n_tar {
        return Err(Error::Dimension(format!(
            "need at least as many streams ({n_s}) as targets ({n_tar})"
        )));
    }

    let mut rng = seeded(cfg.rng_seed, INIT_STREAM);
    let (mut analog, mut baseband, mut u) =
        random_start(&mut rng, n_t, num_rf_chains, n_s, n_tar, cfg.total_power)?;

    let f0 = objective(&analog, baseband.matrix(), &u, f_com, f_rad, cfg.eta)?;
    let epsilon = cfg.tolerance.resolve(f0);
    let mut trace = vec![f0];
    let mut converged = false;

    for _ in 0..cfg.max_iterations {
        let x = analog.apply(baseband.matrix())?;
        u = solve_unitary(f_rad, &x)?;
        let f_rad_u = f_rad * u.matrix();
        analog = solve_analog(baseband.matrix(), f_com, &f_rad_u, cfg.eta, &analog)?;
        let bb = solve_baseband(&analog, f_com, &f_rad_u, cfg.eta, cfg.total_power)?;
        baseband = normalize_power(&bb.baseband, n_t, num_rf_chains, cfg.total_power)?;

        let x = analog.apply(baseband.matrix())?;
        let f = objective_of(&x, f_com, &f_rad_u, cfg.eta)?;
        let prev = *trace.last().expect("non-empty");
        trace.push(f);
        if (f - prev).abs() < epsilon {
            converged = true;
            break;
        }
    }

    Ok(AltMinReport {
        beamformer: HybridBeamformer::new(analog, baseband)?,
        unitary: u,
        iterations_used: trace.len() - 1,
        objective_trace: trace,
        converged,
        epsilon,
    })
}
