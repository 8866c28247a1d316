//! Uniform linear array geometry, the sub-arrayed radar beamformer and
//! transmit beampatterns.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::hermitian_defect;
use crate::{ComplexMat, Error, Result};

/// Relative Frobenius tolerance for accepting a covariance as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UlaConfig {
    pub num_antennas: usize,
    /// Element spacing in wavelengths, `d / lambda`.
    pub spacing_over_wavelength: f64,
}

impl UlaConfig {
    pub fn new(num_antennas: usize, spacing_over_wavelength: f64) -> Result<Self> {
        if num_antennas == 0 {
            return Err(Error::Validation("ULA needs at least one antenna".into()));
        }
        if !(spacing_over_wavelength > 0.0 && spacing_over_wavelength.is_finite()) {
            return Err(Error::Validation(format!(
                "element spacing must be positive, got {spacing_over_wavelength}"
            )));
        }
        Ok(Self {
            num_antennas,
            spacing_over_wavelength,
        })
    }

    /// Half-wavelength spacing.
    pub fn half_wavelength(num_antennas: usize) -> Result<Self> {
        Self::new(num_antennas, 0.5)
    }
}

/// Unit-norm array response `a(theta)`, entry `n` equal to
/// `exp(j 2 pi (d/lambda) n sin(theta)) / sqrt(N)`.
pub fn steering_vector(cfg: &UlaConfig, theta: f64) -> ComplexMat {
    let n = cfg.num_antennas;
    let amp = 1.0 / (n as f64).sqrt();
    let k = 2.0 * PI * cfg.spacing_over_wavelength * theta.sin();
    ComplexMat::from_fn(n, 1, |i, _| Complex64::from_polar(amp, k * i as f64))
}

/// Radar target directions together with the transmit array size.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetScene {
    angles: Vec<f64>,
    num_antennas: usize,
}

impl TargetScene {
    /// `angles` in radians, each within `[-pi/2, pi/2]`.
    pub fn new(angles: Vec<f64>, num_antennas: usize) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::Validation("target scene needs at least one target".into()));
        }
        if num_antennas == 0 {
            return Err(Error::Validation("target scene needs at least one antenna".into()));
        }
        if let Some(bad) = angles
            .iter()
            .find(|a| !(a.is_finite() && a.abs() <= FRAC_PI_2 + 1e-12))
        {
            return Err(Error::Validation(format!(
                "target angle {bad} rad outside [-pi/2, pi/2]"
            )));
        }
        if num_antennas % angles.len() != 0 {
            return Err(Error::Structure(format!(
                "{num_antennas} antennas cannot be split into {} equal sub-arrays",
                angles.len()
            )));
        }
        Ok(Self {
            angles,
            num_antennas,
        })
    }

    pub fn from_degrees(angles_deg: &[f64], num_antennas: usize) -> Result<Self> {
        Self::new(angles_deg.iter().map(|d| d.to_radians()).collect(), num_antennas)
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn num_targets(&self) -> usize {
        self.angles.len()
    }

    pub fn num_antennas(&self) -> usize {
        self.num_antennas
    }
}

/// Sub-arrayed MIMO radar beamformer `F_rad` (`N_t x N_tar`).
///
/// Block `i` holds the entries of the half-wavelength steering vector
/// `a_t(phi_i)` at the antenna slots of sub-array `i`; everything off the
/// block diagonal is zero. The whole matrix is rescaled so that
/// `||F_rad||_F^2 = total_power`, which makes the radar fitting term
/// commensurate with a hybrid precoder that radiates the same power.
pub fn build_radar_beamformer(scene: &TargetScene, total_power: f64) -> Result<ComplexMat> {
    if !(total_power >= 0.0 && total_power.is_finite()) {
        return Err(Error::Validation(format!(
            "total power must be finite and non-negative, got {total_power}"
        )));
    }
    let n = scene.num_antennas;
    let n_tar = scene.num_targets();
    if n % n_tar != 0 {
        return Err(Error::Structure(format!(
            "{n} antennas not divisible by {n_tar} targets"
        )));
    }
    let block = n / n_tar;
    let ula = UlaConfig::half_wavelength(n)?;
    let mut f = ComplexMat::zeros(n, n_tar);
    for (t, &phi) in scene.angles.iter().enumerate() {
        let a = steering_vector(&ula, phi);
        for i in t * block..(t + 1) * block {
            f[(i, t)] = a[(i, 0)];
        }
    }
    // Every entry has modulus 1/sqrt(N), so the raw squared norm is exactly 1.
    let raw: f64 = f.iter().map(|z| z.norm_sqr()).sum();
    let scale = (total_power / raw).sqrt();
    f.iter_mut().for_each(|z| *z *= scale);
    Ok(f)
}

/// Waveform covariance `F F^H`, Hermitian to the last bit.
pub fn covariance_of(f: &ComplexMat) -> ComplexMat {
    let n = f.nrows();
    let mut r = ComplexMat::zeros(n, n);
    for i in 0..n {
        let mut d = 0.0;
        for k in 0..f.ncols() {
            d += f[(i, k)].norm_sqr();
        }
        r[(i, i)] = Complex64::new(d, 0.0);
        for j in i + 1..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..f.ncols() {
                acc += f[(i, k)] * f[(j, k)].conj();
            }
            r[(i, j)] = acc;
            r[(j, i)] = acc.conj();
        }
    }
    r
}

/// Transmit beampattern `G(theta) = Re{a^H(theta) R a(theta)}` at each angle.
pub fn beampattern(r: &ComplexMat, cfg: &UlaConfig, thetas: &[f64]) -> Result<Vec<f64>> {
    let n = cfg.num_antennas;
    if r.shape() != (n, n) {
        return Err(Error::Dimension(format!(
            "covariance is {}x{}, array has {n} antennas",
            r.nrows(),
            r.ncols()
        )));
    }
    let defect = hermitian_defect(r);
    if defect > HERMITIAN_TOL {
        return Err(Error::Validation(format!(
            "covariance not Hermitian (relative defect {defect:.3e})"
        )));
    }
    Ok(thetas
        .iter()
        .map(|&theta| {
            let a = steering_vector(cfg, theta);
            let ra = r * &a;
            a.iter()
                .zip(ra.iter())
                .map(|(x, y)| x.conj() * y)
                .sum::<Complex64>()
                .re
        })
        .collect())
}

/// Inclusive, evenly spaced angle grid in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Default for AngleGrid {
    fn default() -> Self {
        Self {
            start: -90.0,
            stop: 90.0,
            step: 0.5,
        }
    }
}

impl AngleGrid {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::Validation(format!("grid step must be positive, got {}", self.step)));
        }
        if !(self.start.is_finite() && self.stop.is_finite() && self.stop >= self.start) {
            return Err(Error::Validation(format!(
                "grid bounds [{}, {}] are not increasing",
                self.start, self.stop
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn degrees(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| self.start + i as f64 * self.step)
            .collect()
    }

    pub fn radians(&self) -> Vec<f64> {
        self.degrees().into_iter().map(f64::to_radians).collect()
    }
}
