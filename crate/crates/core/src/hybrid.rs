//! Partially-connected hybrid beamformer.
//!
//! The analog stage is stored as one phase per antenna. Antenna `i` belongs to
//! sub-array `i / (N_t / N_RF)` and is the only nonzero in its row, so the
//! block-diagonal, constant-modulus structure cannot be violated by any value
//! of this type.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::{check_finite, frob2};
use crate::{ComplexMat, Error, Result};

/// Map a phase into `[0, 2 pi)`.
pub fn canonical_phase(phase: f64) -> f64 {
    let p = phase.rem_euclid(TAU);
    if p >= TAU {
        0.0
    } else {
        p
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalogBeamformer {
    num_rf_chains: usize,
    phases: Vec<f64>,
}

impl AnalogBeamformer {
    /// One phase per antenna; `phases.len()` must be a multiple of
    /// `num_rf_chains`.
    pub fn new(num_rf_chains: usize, phases: Vec<f64>) -> Result<Self> {
        let n = phases.len();
        if n == 0 || num_rf_chains == 0 {
            return Err(Error::Structure("analog beamformer needs antennas and RF chains".into()));
        }
        if n % num_rf_chains != 0 {
            return Err(Error::Structure(format!(
                "{n} antennas not divisible by {num_rf_chains} RF chains"
            )));
        }
        if phases.iter().any(|p| !p.is_finite()) {
            return Err(Error::Validation("analog phases must be finite".into()));
        }
        Ok(Self {
            num_rf_chains,
            phases: phases.into_iter().map(canonical_phase).collect(),
        })
    }

    pub fn zero_phase(num_antennas: usize, num_rf_chains: usize) -> Result<Self> {
        Self::new(num_rf_chains, vec![0.0; num_antennas])
    }

    pub fn num_antennas(&self) -> usize {
        self.phases.len()
    }

    pub fn num_rf_chains(&self) -> usize {
        self.num_rf_chains
    }

    /// Antennas per RF chain.
    pub fn sub_array_size(&self) -> usize {
        self.phases.len() / self.num_rf_chains
    }

    /// RF chain (column) that drives antenna `i`.
    pub fn chain_of(&self, antenna: usize) -> usize {
        antenna / self.sub_array_size()
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    /// Unit-modulus weight of antenna `i`.
    pub fn weight(&self, antenna: usize) -> Complex64 {
        Complex64::from_polar(1.0, self.phases[antenna])
    }

    /// Dense `N_t x N_RF` matrix.
    pub fn to_matrix(&self) -> ComplexMat {
        let mut m = ComplexMat::zeros(self.num_antennas(), self.num_rf_chains);
        for i in 0..self.num_antennas() {
            m[(i, self.chain_of(i))] = self.weight(i);
        }
        m
    }

    /// `F_RF X` without forming `F_RF`: row `i` is `w_i X[chain_of(i), :]`.
    pub fn apply(&self, x: &ComplexMat) -> Result<ComplexMat> {
        if x.nrows() != self.num_rf_chains {
            return Err(Error::Dimension(format!(
                "baseband has {} rows, analog stage has {} RF chains",
                x.nrows(),
                self.num_rf_chains
            )));
        }
        let mut out = ComplexMat::zeros(self.num_antennas(), x.ncols());
        for i in 0..self.num_antennas() {
            let w = self.weight(i);
            let l = self.chain_of(i);
            for j in 0..x.ncols() {
                out[(i, j)] = w * x[(l, j)];
            }
        }
        Ok(out)
    }
}

/// Baseband precoder `F_BB` (`N_RF x N_S`).
#[derive(Debug, Clone, PartialEq)]
pub struct BasebandBeamformer {
    matrix: ComplexMat,
}

impl BasebandBeamformer {
    pub fn new(matrix: ComplexMat) -> Result<Self> {
        check_finite(&matrix, "baseband beamformer")?;
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &ComplexMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMat {
        self.matrix
    }

    pub fn num_rf_chains(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn num_streams(&self) -> usize {
        self.matrix.ncols()
    }
}

/// Squared baseband norm that makes `||F_RF F_BB||_F^2 = total_power`.
pub fn baseband_power_target(num_antennas: usize, num_rf_chains: usize, total_power: f64) -> f64 {
    num_rf_chains as f64 * total_power / num_antennas as f64
}

/// Rescale `bb` so that `||F_BB||_F^2 = N_RF P_T / N_t`.
pub fn normalize_power(
    bb: &BasebandBeamformer,
    num_antennas: usize,
    num_rf_chains: usize,
    total_power: f64,
) -> Result<BasebandBeamformer> {
    if num_antennas == 0 || num_rf_chains == 0 || num_antennas % num_rf_chains != 0 {
        return Err(Error::Structure(format!(
            "{num_antennas} antennas not divisible into {num_rf_chains} sub-arrays"
        )));
    }
    if !(total_power >= 0.0 && total_power.is_finite()) {
        return Err(Error::Validation(format!("invalid total power {total_power}")));
    }
    let current = frob2(&bb.matrix);
    if current == 0.0 {
        return Err(Error::Degenerate("cannot normalize a zero baseband matrix".into()));
    }
    let target = baseband_power_target(num_antennas, num_rf_chains, total_power);
    let scale = (target / current).sqrt();
    Ok(BasebandBeamformer {
        matrix: &bb.matrix * Complex64::new(scale, 0.0),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HybridDoc", into = "HybridDoc")]
pub struct HybridBeamformer {
    pub analog: AnalogBeamformer,
    pub baseband: BasebandBeamformer,
}

impl HybridBeamformer {
    pub fn new(analog: AnalogBeamformer, baseband: BasebandBeamformer) -> Result<Self> {
        if analog.num_rf_chains() != baseband.num_rf_chains() {
            return Err(Error::Dimension(format!(
                "analog stage has {} RF chains, baseband has {} rows",
                analog.num_rf_chains(),
                baseband.num_rf_chains()
            )));
        }
        Ok(Self { analog, baseband })
    }

    /// Dense `F_RF F_BB` (`N_t x N_S`).
    pub fn materialize(&self) -> ComplexMat {
        self.analog
            .apply(&self.baseband.matrix)
            .expect("RF chain count checked at construction")
    }

    /// Radiated power `||F_RF F_BB||_F^2`, evaluated through the structural
    /// identity `(N_t / N_RF) ||F_BB||_F^2`.
    pub fn radiated_power(&self) -> f64 {
        self.analog.sub_array_size() as f64 * frob2(&self.baseband.matrix)
    }
}

/// On-disk form: phases plus row-major `[re, im]` baseband entries.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct HybridDoc {
    num_antennas: usize,
    num_rf_chains: usize,
    num_streams: usize,
    phases: Vec<f64>,
    baseband: Vec<[f64; 2]>,
}

impl From<HybridBeamformer> for HybridDoc {
    fn from(hb: HybridBeamformer) -> Self {
        let m = hb.baseband.matrix();
        let mut baseband = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                baseband.push([m[(i, j)].re, m[(i, j)].im]);
            }
        }
        HybridDoc {
            num_antennas: hb.analog.num_antennas(),
            num_rf_chains: hb.analog.num_rf_chains(),
            num_streams: m.ncols(),
            phases: hb.analog.phases,
            baseband,
        }
    }
}

impl TryFrom<HybridDoc> for HybridBeamformer {
    type Error = Error;

    fn try_from(doc: HybridDoc) -> Result<Self> {
        if doc.phases.len() != doc.num_antennas {
            return Err(Error::Dimension(format!(
                "{} phases for {} antennas",
                doc.phases.len(),
                doc.num_antennas
            )));
        }
        let analog = AnalogBeamformer::new(doc.num_rf_chains, doc.phases)?;
        let entries: Vec<Complex64> = doc
            .baseband
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect();
        let m = crate::linalg::from_row_major(doc.num_rf_chains, doc.num_streams, &entries)?;
        HybridBeamformer::new(analog, BasebandBeamformer::new(m)?)
    }
}
