//! Dense complex helpers shared by the model and solver modules.
//!
//! Factorizations are delegated to `nalgebra`; this module only pins down the
//! ordering and phase conventions the rest of the crate relies on.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::{ComplexMat, Error, Result};

/// Thin SVD `M = U diag(s) V^H`, singular values descending.
#[derive(Debug, Clone)]
pub struct Svd {
    /// `m x k` left singular vectors.
    pub u: ComplexMat,
    /// `k` singular values, descending.
    pub singular_values: Vec<f64>,
    /// `n x k` right singular vectors (columns), not the adjoint.
    pub v: ComplexMat,
}

/// Thin SVD with the canonical phase convention: the largest-magnitude entry
/// of every right singular vector is real and positive (first index wins on
/// ties), and equal singular values keep their original index order.
pub fn svd_canonical(m: &ComplexMat) -> Result<Svd> {
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    if k == 0 {
        return Err(Error::Dimension(format!("svd of empty {rows}x{cols} matrix")));
    }
    let svd = m.clone().svd(true, true);
    let u = svd
        .u
        .ok_or_else(|| Error::LinearSolve("svd did not return U".into()))?;
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::LinearSolve("svd did not return V^H".into()))?;
    let s: Vec<f64> = svd.singular_values.iter().copied().collect();
    if s.iter().any(|x| !x.is_finite()) {
        return Err(Error::LinearSolve("svd produced non-finite singular values".into()));
    }

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]).then(a.cmp(&b)));

    let mut out_u = ComplexMat::zeros(rows, k);
    let mut out_v = ComplexMat::zeros(cols, k);
    let mut out_s = Vec::with_capacity(k);
    for (dst, &src) in order.iter().enumerate() {
        let v_col: Vec<Complex64> = v_t.row(src).iter().map(|z| z.conj()).collect();
        let pivot = argmax_modulus(&v_col);
        let p = v_col[pivot];
        let rot = if p.norm() > 0.0 {
            p.conj() / p.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for (i, z) in v_col.iter().enumerate() {
            out_v[(i, dst)] = z * rot;
        }
        // u sigma v^H is unchanged when v -> v e^{jt} and u -> u e^{jt}.
        for i in 0..rows {
            out_u[(i, dst)] = u[(i, src)] * rot;
        }
        out_s.push(s[src]);
    }
    Ok(Svd {
        u: out_u,
        singular_values: out_s,
        v: out_v,
    })
}

fn argmax_modulus(v: &[Complex64]) -> usize {
    let mut best = 0;
    let mut best_mag = f64::NEG_INFINITY;
    for (i, z) in v.iter().enumerate() {
        let mag = z.norm_sqr();
        if mag > best_mag {
            best = i;
            best_mag = mag;
        }
    }
    best
}

/// Eigendecomposition `A = V diag(w) V^H` of a Hermitian matrix, eigenvalues
/// ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMat,
}

pub fn hermitian_eigen(a: &ComplexMat) -> Result<HermitianEigen> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let n = a.nrows();
    let eig = a.clone().symmetric_eigen();
    let w: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    if w.iter().any(|x| !x.is_finite()) {
        return Err(Error::LinearSolve("non-finite eigenvalue".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| w[x].total_cmp(&w[y]).then(x.cmp(&y)));
    let mut vecs = ComplexMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(HermitianEigen {
        eigenvalues: order.iter().map(|&i| w[i]).collect(),
        eigenvectors: vecs,
    })
}

/// Squared Frobenius norm.
pub fn frob2(m: &ComplexMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

/// Relative Hermitian defect `||A - A^H||_F / ||A||_F` (0 for the zero matrix).
pub fn hermitian_defect(a: &ComplexMat) -> f64 {
    if !a.is_square() {
        return f64::INFINITY;
    }
    let scale = a.norm();
    if scale == 0.0 {
        return 0.0;
    }
    (a - a.adjoint()).norm() / scale
}

/// `||U U^H - I||_F` for a wide matrix with (supposedly) orthonormal rows.
pub fn semi_unitary_defect(u: &ComplexMat) -> f64 {
    let g = u * u.adjoint();
    (g - ComplexMat::identity(u.nrows(), u.nrows())).norm()
}

/// Entries i.i.d. circularly-symmetric complex Gaussian, `E|z|^2 = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMat {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = ComplexMat::zeros(rows, cols);
    // Row-major draw order so results do not depend on storage layout.
    for i in 0..rows {
        for j in 0..cols {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            m[(i, j)] = Complex64::new(re * scale, im * scale);
        }
    }
    m
}

/// Orthonormalize the rows of a wide (or square) matrix via QR of its adjoint.
pub fn orthonormal_rows(m: &ComplexMat) -> Result<ComplexMat> {
    if m.nrows() > m.ncols() {
        return Err(Error::Dimension(format!(
            "cannot orthonormalize {} rows of length {}",
            m.nrows(),
            m.ncols()
        )));
    }
    let q = m.adjoint().qr().q();
    Ok(q.adjoint())
}

/// Build a matrix from row-major `(re, im)` pairs.
pub fn from_row_major(rows: usize, cols: usize, data: &[Complex64]) -> Result<ComplexMat> {
    if data.len() != rows * cols {
        return Err(Error::Dimension(format!(
            "expected {} entries for {rows}x{cols}, got {}",
            rows * cols,
            data.len()
        )));
    }
    Ok(DMatrix::from_row_slice(rows, cols, data))
}

/// Row-major copy of the entries.
pub fn to_row_major(m: &ComplexMat) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(m[(i, j)]);
        }
    }
    out
}

pub(crate) fn check_finite(m: &ComplexMat, what: &str) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::Validation(format!("{what} contains non-finite entries")))
    }
}
