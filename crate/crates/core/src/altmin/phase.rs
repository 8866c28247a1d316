//! Row-wise phase-rotation update of the analog stage.

use num_complex::Complex64;

use crate::hybrid::AnalogBeamformer;
use crate::{ComplexMat, Error, Result};

/// Single-antenna objective
/// `eta |e^{j phi} b - c|^2 + (1 - eta) |e^{j phi} b - r|^2`
/// where `b` is the baseband row of the antenna's RF chain and `c`, `r` are the
/// antenna's rows of `F_com` and `F_rad U`.
pub fn row_objective(
    phase: f64,
    bb_row: &[Complex64],
    com_row: &[Complex64],
    rad_row: &[Complex64],
    eta: f64,
) -> f64 {
    let w = Complex64::from_polar(1.0, phase);
    let mut com = 0.0;
    let mut rad = 0.0;
    for ((b, c), r) in bb_row.iter().zip(com_row).zip(rad_row) {
        com += (w * b - c).norm_sqr();
        rad += (w * b - r).norm_sqr();
    }
    eta * com + (1.0 - eta) * rad
}

/// Correlation `b^H (eta c + (1 - eta) r)`; its argument is the optimal phase.
pub fn row_correlation(
    bb_row: &[Complex64],
    com_row: &[Complex64],
    rad_row: &[Complex64],
    eta: f64,
) -> Complex64 {
    bb_row
        .iter()
        .zip(com_row)
        .zip(rad_row)
        .map(|((b, c), r)| b.conj() * (c * eta + r * (1.0 - eta)))
        .sum()
}

/// Optimal phase for one antenna, or `None` when every phase is optimal.
pub fn optimal_row_phase(
    bb_row: &[Complex64],
    com_row: &[Complex64],
    rad_row: &[Complex64],
    eta: f64,
) -> Option<f64> {
    let z = row_correlation(bb_row, com_row, rad_row, eta);
    if z == Complex64::new(0.0, 0.0) {
        None
    } else {
        Some(z.arg())
    }
}

/// Update every analog phase with the baseband and `U` frozen.
///
/// Antennas whose correlation vanishes keep their phase from `previous`.
pub fn solve_analog(
    f_bb: &ComplexMat,
    f_com: &ComplexMat,
    f_rad_u: &ComplexMat,
    eta: f64,
    previous: &AnalogBeamformer,
) -> Result<AnalogBeamformer> {
    let n_t = previous.num_antennas();
    let n_rf = previous.num_rf_chains();
    let n_s = f_bb.ncols();
    if f_bb.nrows() != n_rf {
        return Err(Error::Dimension(format!(
            "baseband has {} rows, analog stage has {n_rf} RF chains",
            f_bb.nrows()
        )));
    }
    for (name, m) in [("F_com", f_com), ("F_rad U", f_rad_u)] {
        if m.shape() != (n_t, n_s) {
            return Err(Error::Dimension(format!(
                "{name} is {}x{}, expected {n_t}x{n_s}",
                m.nrows(),
                m.ncols()
            )));
        }
    }
    check_eta(eta)?;

    let mut bb_row = vec![Complex64::new(0.0, 0.0); n_s];
    let mut com_row = bb_row.clone();
    let mut rad_row = bb_row.clone();
    let mut phases = Vec::with_capacity(n_t);
    for i in 0..n_t {
        let l = previous.chain_of(i);
        for j in 0..n_s {
            bb_row[j] = f_bb[(l, j)];
            com_row[j] = f_com[(i, j)];
            rad_row[j] = f_rad_u[(i, j)];
        }
        let phi = optimal_row_phase(&bb_row, &com_row, &rad_row, eta)
            .unwrap_or(previous.phases()[i]);
        phases.push(phi);
    }
    AnalogBeamformer::new(n_rf, phases)
}

pub(crate) fn check_eta(eta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&eta) {
        Ok(())
    } else {
        Err(Error::Validation(format!("weighting factor {eta} outside [0, 1]")))
    }
}
