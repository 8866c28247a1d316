//! Communication and radar performance figures.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{ComplexMat, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub snr_db: f64,
    pub rate_bits_per_hz: f64,
}

/// Cholesky pivots of `W^H W` below this fraction of the largest one mark `W` as
/// rank deficient (pivots scale like singular values of `W`, so roundoff on an
/// exactly singular Gram matrix leaves pivots near `sqrt(eps)`).
const RANK_RTOL: f64 = 1e-7;

/// Spectral efficiency with Gaussian signalling, equal power per stream and a
/// linear combiner:
///
/// `log2 det(I + gamma / N_S (W^H W)^{-1} W^H H F F^H H^H W)`, `gamma = 10^(snr_db/10)`.
///
/// The determinant is taken of the Hermitian form `I + gamma/N_S L^{-1} M M^H L^{-H}`
/// with `W^H W = L L^H`, which has the same value.
pub fn achievable_rate(h: &ComplexMat, f: &ComplexMat, w: &ComplexMat, snr_db: f64) -> Result<f64> {
    let (nr, nt) = h.shape();
    let ns = f.ncols();
    if f.nrows() != nt || w.nrows() != nr || w.ncols() != ns {
        return Err(Error::Dimension(format!(
            "H {nr}x{nt}, F {}x{}, W {}x{} do not chain",
            f.nrows(),
            f.ncols(),
            w.nrows(),
            w.ncols()
        )));
    }
    if !snr_db.is_finite() {
        return Err(Error::Validation(format!("snr_db must be finite, got {snr_db}")));
    }
    let gamma = 10f64.powf(snr_db / 10.0);
    let gram = w.adjoint() * w;
    let chol = gram
        .cholesky()
        .ok_or_else(|| Error::LinearSolve("combiner W does not have full column rank".into()))?;
    let diag: Vec<f64> = (0..ns).map(|i| chol.l_dirty()[(i, i)].re).collect();
    let dmax = diag.iter().cloned().fold(0.0f64, f64::max);
    if diag.iter().any(|&d| !(d > RANK_RTOL * dmax)) {
        return Err(Error::LinearSolve("combiner W does not have full column rank".into()));
    }
    let m = w.adjoint() * h * f;
    let y = chol
        .l()
        .solve_lower_triangular(&m)
        .ok_or_else(|| Error::LinearSolve("triangular solve with W^H W failed".into()))?;
    let mut t = ComplexMat::identity(ns, ns);
    let s = gamma / ns as f64;
    for i in 0..ns {
        for j in i..ns {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..ns {
                acc += y[(i, k)] * y[(j, k)].conj();
            }
            t[(i, j)] += acc * s;
            if i != j {
                t[(j, i)] = t[(i, j)].conj();
            }
        }
        t[(i, i)].im = 0.0;
    }
    let tc = t
        .cholesky()
        .ok_or_else(|| Error::LinearSolve("rate matrix not positive definite".into()))?;
    let l = tc.l();
    let log_det: f64 = (0..ns).map(|i| 2.0 * l[(i, i)].re.log2()).sum();
    Ok(log_det.max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FittingErrors {
    /// `||F - F_com||_F^2`.
    pub comm: f64,
    /// `||F - F_rad U||_F^2`.
    pub radar: f64,
    /// `eta comm + (1 - eta) radar`.
    pub weighted: f64,
}

pub fn fitting_errors(
    f_hybrid: &ComplexMat,
    f_com: &ComplexMat,
    f_rad_u: &ComplexMat,
    eta: f64,
) -> Result<FittingErrors> {
    if f_hybrid.shape() != f_com.shape() || f_hybrid.shape() != f_rad_u.shape() {
        return Err(Error::Dimension(format!(
            "fitting operands {:?}, {:?}, {:?} differ",
            f_hybrid.shape(),
            f_com.shape(),
            f_rad_u.shape()
        )));
    }
    let mut comm = 0.0;
    let mut radar = 0.0;
    for ((a, b), c) in f_hybrid.iter().zip(f_com.iter()).zip(f_rad_u.iter()) {
        comm += (a - b).norm_sqr();
        radar += (a - c).norm_sqr();
    }
    Ok(FittingErrors {
        comm,
        radar,
        weighted: eta * comm + (1.0 - eta) * radar,
    })
}

/// Relative tolerance under which neighbouring samples count as equal.
const PLATEAU_RTOL: f64 = 1e-12;

/// Indices of the local maxima of a sampled pattern.
///
/// A maximum is a run of (numerically) equal samples whose existing neighbours
/// on both sides are strictly lower and which contains at least one interior
/// grid point. Each run is reported once, at its leftmost interior point.
pub fn local_maxima(gains: &[f64]) -> Vec<usize> {
    let n = gains.len();
    if n < 3 {
        return Vec::new();
    }
    let scale = gains.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    let eq_tol = PLATEAU_RTOL * scale.max(f64::MIN_POSITIVE);
    let mut out = Vec::new();
    let mut s = 0;
    while s < n {
        let mut e = s;
        while e + 1 < n && (gains[e + 1] - gains[s]).abs() <= eq_tol {
            e += 1;
        }
        let left_ok = s == 0 || gains[s - 1] < gains[s] - eq_tol;
        let right_ok = e == n - 1 || gains[e + 1] < gains[s] - eq_tol;
        let has_interior = e >= 1 && s < n - 1;
        if left_ok && right_ok && has_interior {
            out.push(s.max(1));
        }
        s = e + 1;
    }
    out
}

/// For each target, the angular distance to the nearest local maximum of
/// `pattern` (pairs of angle and gain on a monotone grid). Equidistant maxima
/// resolve to the first one scanning from the low end of the grid. Targets
/// with no maximum anywhere get `f64::INFINITY`.
pub fn peak_deviation(pattern: &[(f64, f64)], targets: &[f64]) -> Vec<f64> {
    let gains: Vec<f64> = pattern.iter().map(|p| p.1).collect();
    let peaks: Vec<f64> = local_maxima(&gains).into_iter().map(|i| pattern[i].0).collect();
    targets
        .iter()
        .map(|&t| {
            let mut best = f64::INFINITY;
            for &p in &peaks {
                let d = (p - t).abs();
                if d < best {
                    best = d;
                }
            }
            best
        })
        .collect()
}
