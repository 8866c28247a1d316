//! Closed-form update of the auxiliary semi-unitary `U`.

use num_complex::Complex64;

use crate::linalg::svd_canonical;
use crate::{ComplexMat, Error, Result};

/// `N_tar x N_S` matrix with orthonormal rows.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxiliaryUnitary {
    matrix: ComplexMat,
}

/// Tolerance on `||U U^H - I||_F` accepted by [`AuxiliaryUnitary::new`].
pub const SEMI_UNITARY_TOL: f64 = 1e-9;

impl AuxiliaryUnitary {
    pub fn new(matrix: ComplexMat) -> Result<Self> {
        if matrix.nrows() > matrix.ncols() {
            return Err(Error::Dimension(format!(
                "auxiliary unitary must be wide, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let defect = crate::linalg::semi_unitary_defect(&matrix);
        if !(defect <= SEMI_UNITARY_TOL) {
            return Err(Error::Validation(format!(
                "rows not orthonormal (||UU^H - I||_F = {defect:.3e})"
            )));
        }
        Ok(Self { matrix })
    }

    /// `[I | 0]`.
    pub fn canonical(num_targets: usize, num_streams: usize) -> Result<Self> {
        Self::new(ComplexMat::identity(num_targets, num_streams))
    }

    pub fn matrix(&self) -> &ComplexMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMat {
        self.matrix
    }
}

/// Minimize `||F_rad U - X||_F` over `U U^H = I`.
///
/// With the SVD `F_rad^H X = U~ S V~^H`, the minimizer is `U~ V~^H` (thin
/// factors). A zero cross product leaves every feasible `U` optimal; `[I | 0]`
/// is returned then.
pub fn solve_unitary(f_rad: &ComplexMat, x: &ComplexMat) -> Result<AuxiliaryUnitary> {
    let (n_t, n_tar) = f_rad.shape();
    let n_s = x.ncols();
    if x.nrows() != n_t {
        return Err(Error::Dimension(format!(
            "F_rad has {n_t} rows, hybrid precoder has {}",
            x.nrows()
        )));
    }
    if n_s < n_tar {
        return Err(Error::Dimension(format!(
            "need at least as many streams ({n_s}) as targets ({n_tar})"
        )));
    }
    let cross = f_rad.adjoint() * x;
    if cross.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return AuxiliaryUnitary::canonical(n_tar, n_s);
    }
    let svd = svd_canonical(&cross)?;
    let u = &svd.u * svd.v.adjoint();
    AuxiliaryUnitary::new(u).map_err(|e| Error::Solver(format!("Procrustes step: {e}")))
}
