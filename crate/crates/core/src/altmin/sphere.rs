//! Least squares on the Frobenius sphere (matrix trust-region subproblem).
//!
//! Solves
//!
//! ```text
//! min_X  tr(X^H Q X) - 2 Re tr(X^H G)   s.t.  ||X||_F^2 = c
//! ```
//!
//! for Hermitian PSD `Q`. Strong duality holds, so the global minimizer is the
//! `X` satisfying `(Q + lambda I) X = G`, `Q + lambda I >= 0` and the norm
//! constraint. With `Q = V diag(q) V^H` and `G' = V^H G` the norm of the
//! stationary point is the secular function
//!
//! ```text
//! n(lambda) = sum_i ||G'_i||^2 / (q_i + lambda)^2
//! ```
//!
//! which decreases strictly on `(-q_min, inf)`. The root is bracketed and
//! located by bisection in the shifted variable `mu = lambda + q_min`, using
//! geometric midpoints so that roots close to the pole keep full relative
//! precision. When `n` stays below `c` all the way down to the pole (the
//! "hard case") the minimal eigenspace supplies the missing norm.

use num_complex::Complex64;

use crate::linalg::{frob2, hermitian_defect, hermitian_eigen};
use crate::{ComplexMat, Error, Result};

/// Relative residual bound for `(Q + lambda I) X = G`.
pub const KKT_RESIDUAL_TOL: f64 = 1e-7;
/// Relative bound on `| ||X||_F^2 - c |`.
pub const KKT_NORM_TOL: f64 = 1e-8;
/// `lambda_min(Q + lambda I) >= -KKT_PSD_TOL * ||Q||_2`.
pub const KKT_PSD_TOL: f64 = 1e-9;
/// Stopping rule of the root search, `|n(lambda) - c| <= this * c`.
pub const SECULAR_TOL: f64 = 1e-10;

const MAX_BISECTIONS: usize = 400;
const MAX_BRACKET_GROWTH: usize = 200;

/// Optimality certificate of a sphere-constrained LS solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktCertificate {
    pub multiplier: f64,
    /// `||(Q + lambda I) X - G||_F / max(||G||_F, (||Q||_2 + |lambda|) ||X||_F)`.
    pub relative_residual: f64,
    /// `| ||X||_F^2 - c | / c`.
    pub relative_norm_error: f64,
    /// Smallest eigenvalue of `Q + lambda I`.
    pub min_shifted_eigenvalue: f64,
    /// Spectral norm of `Q`.
    pub q_norm: f64,
    pub hard_case: bool,
}

impl KktCertificate {
    pub fn holds(&self) -> bool {
        self.relative_residual <= KKT_RESIDUAL_TOL
            && self.relative_norm_error <= KKT_NORM_TOL
            && self.min_shifted_eigenvalue >= -KKT_PSD_TOL * self.q_norm
    }
}

#[derive(Debug, Clone)]
pub struct SphereLsSolution {
    pub x: ComplexMat,
    pub objective: f64,
    pub certificate: KktCertificate,
}

/// `tr(X^H Q X) - 2 Re tr(X^H G)`.
pub fn quadratic_objective(q: &ComplexMat, g: &ComplexMat, x: &ComplexMat) -> f64 {
    let qx = q * x;
    let mut quad = 0.0;
    let mut lin = 0.0;
    for ((xi, qxi), gi) in x.iter().zip(qx.iter()).zip(g.iter()) {
        quad += (xi.conj() * qxi).re;
        lin += (xi.conj() * gi).re;
    }
    quad - 2.0 * lin
}

/// Global minimizer of the sphere-constrained quadratic, with its KKT
/// certificate checked before returning.
pub fn solve_sphere_ls(q: &ComplexMat, g: &ComplexMat, c: f64) -> Result<SphereLsSolution> {
    let n = q.nrows();
    if !q.is_square() || g.nrows() != n {
        return Err(Error::Dimension(format!(
            "Q is {}x{}, G is {}x{}",
            q.nrows(),
            q.ncols(),
            g.nrows(),
            g.ncols()
        )));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Degenerate(format!("sphere radius^2 must be positive, got {c}")));
    }
    if hermitian_defect(q) > 1e-9 {
        return Err(Error::Validation("Q is not Hermitian".into()));
    }

    let eig = hermitian_eigen(q)?;
    let q_eigs = &eig.eigenvalues;
    let v = &eig.eigenvectors;
    let q_min = q_eigs[0];
    let q_norm = q_eigs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let gp = v.adjoint() * g;
    let row_energy: Vec<f64> = (0..n)
        .map(|i| gp.row(i).iter().map(|z| z.norm_sqr()).sum())
        .collect();
    // Gaps to the smallest eigenvalue, exact zero for the minimal one.
    let gaps: Vec<f64> = q_eigs.iter().map(|&e| e - q_min).collect();

    let secular = |mu: f64| -> f64 {
        row_energy
            .iter()
            .zip(&gaps)
            .map(|(&e, &d)| if e == 0.0 { 0.0 } else { e / ((d + mu) * (d + mu)) })
            .sum()
    };

    let delta = 1e-12 * (1.0 + q_norm);
    let (mu, hard_case) = if secular(delta) <= c {
        (0.0, true)
    } else {
        let g_norm = row_energy.iter().sum::<f64>().sqrt();
        // n(mu) <= ||G||^2 / mu^2, so this upper end already satisfies n <= c.
        let mut hi = (g_norm / c.sqrt()).max(2.0 * delta);
        let mut grow = 0;
        while secular(hi) > c {
            hi *= 2.0;
            grow += 1;
            if grow > MAX_BRACKET_GROWTH || !hi.is_finite() {
                return Err(Error::Solver(format!(
                    "secular equation not bracketed: n({hi:e}) > c = {c:e}"
                )));
            }
        }
        let mut lo = delta;
        let mut best = hi;
        for _ in 0..MAX_BISECTIONS {
            let mid = (lo * hi).sqrt();
            if !(mid > lo && mid < hi) {
                break;
            }
            let val = secular(mid);
            best = mid;
            if (val - c).abs() <= SECULAR_TOL * c {
                break;
            }
            if val > c {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (best, false)
    };
    let lambda = mu - q_min;

    // Solution in the eigenbasis.
    let mut xp = ComplexMat::zeros(n, g.ncols());
    for i in 0..n {
        let d = gaps[i] + mu;
        if hard_case && gaps[i] <= delta {
            continue;
        }
        for j in 0..g.ncols() {
            xp[(i, j)] = gp[(i, j)] / d;
        }
    }
    if hard_case {
        let have = frob2(&xp);
        let missing = (c - have).max(0.0);
        let anchor = 0;
        let e = row_energy[anchor];
        if e > 0.0 {
            let s = (missing / e).sqrt();
            for j in 0..g.ncols() {
                xp[(anchor, j)] = gp[(anchor, j)] * s;
            }
        } else {
            xp[(anchor, 0)] = Complex64::new(missing.sqrt(), 0.0);
        }
    }
    let mut x = v * xp;
    let norm2 = frob2(&x);
    if norm2 == 0.0 || !norm2.is_finite() {
        return Err(Error::Solver(format!("sphere LS produced ||X||^2 = {norm2}")));
    }
    x *= Complex64::new((c / norm2).sqrt(), 0.0);

    let certificate = certify(q, g, &x, c, lambda, q_min, q_norm, hard_case);
    if !certificate.holds() {
        return Err(Error::Solver(format!(
            "KKT certificate failed: residual {:.3e}, norm error {:.3e}, min eig {:.3e}",
            certificate.relative_residual,
            certificate.relative_norm_error,
            certificate.min_shifted_eigenvalue
        )));
    }
    Ok(SphereLsSolution {
        objective: quadratic_objective(q, g, &x),
        x,
        certificate,
    })
}

#[allow(clippy::too_many_arguments)]
fn certify(
    q: &ComplexMat,
    g: &ComplexMat,
    x: &ComplexMat,
    c: f64,
    lambda: f64,
    q_min: f64,
    q_norm: f64,
    hard_case: bool,
) -> KktCertificate {
    let r = q * x + x * Complex64::new(lambda, 0.0) - g;
    let scale = g.norm().max((q_norm + lambda.abs()) * x.norm());
    let relative_residual = if scale > 0.0 { r.norm() / scale } else { 0.0 };
    KktCertificate {
        multiplier: lambda,
        relative_residual,
        relative_norm_error: (frob2(x) - c).abs() / c,
        min_shifted_eigenvalue: q_min + lambda,
        q_norm,
        hard_case,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::complex_gaussian;
    use crate::rng::seeded;

    #[test]
    fn isotropic_q_scales_g() {
        let mut rng = seeded(1, 0);
        let g = complex_gaussian(&mut rng, 5, 3);
        let c = 2.5;
        let sol = solve_sphere_ls(&ComplexMat::identity(5, 5), &g, c).unwrap();
        let expect = &g * Complex64::new(c.sqrt() / g.norm(), 0.0);
        assert!((&sol.x - expect).norm() < 1e-10);
        assert!(sol.certificate.holds());
    }

    #[test]
    fn recovers_on_sphere_unconstrained_optimum() {
        let mut rng = seeded(2, 0);
        let b = complex_gaussian(&mut rng, 6, 6);
        let q = &b * b.adjoint() + ComplexMat::identity(6, 6) * Complex64::new(0.5, 0.0);
        let q = (&q + q.adjoint()) * Complex64::new(0.5, 0.0);
        let c = 1.7;
        let mut f = complex_gaussian(&mut rng, 6, 3);
        f *= Complex64::new((c / frob2(&f)).sqrt(), 0.0);
        let g = &q * &f;
        let sol = solve_sphere_ls(&q, &g, c).unwrap();
        assert!((&sol.x - &f).norm() <= 1e-7 * f.norm());
        assert!(sol.certificate.multiplier.abs() < 1e-6);
    }

    #[test]
    fn zero_g_takes_minimal_eigenvector() {
        let mut q = ComplexMat::zeros(3, 3);
        q[(0, 0)] = Complex64::new(3.0, 0.0);
        q[(1, 1)] = Complex64::new(1.0, 0.0);
        q[(2, 2)] = Complex64::new(2.0, 0.0);
        let g = ComplexMat::zeros(3, 2);
        let sol = solve_sphere_ls(&q, &g, 4.0).unwrap();
        assert!(sol.certificate.hard_case);
        assert!((sol.objective - 4.0).abs() < 1e-12);
        let row1: f64 = sol.x.row(1).iter().map(|z| z.norm_sqr()).sum();
        assert!((row1 - 4.0).abs() < 1e-12);
    }

    #[test]
    fn hard_case_with_nonzero_g() {
        // G orthogonal to the minimal eigenvector, small enough that the
        // secular function never reaches c.
        let mut q = ComplexMat::zeros(3, 3);
        q[(0, 0)] = Complex64::new(1.0, 0.0);
        q[(1, 1)] = Complex64::new(2.0, 0.0);
        q[(2, 2)] = Complex64::new(4.0, 0.0);
        let mut g = ComplexMat::zeros(3, 1);
        g[(1, 0)] = Complex64::new(0.1, 0.0);
        g[(2, 0)] = Complex64::new(0.0, 0.3);
        let c = 1.0;
        let sol = solve_sphere_ls(&q, &g, c).unwrap();
        assert!(sol.certificate.hard_case);
        assert!(sol.certificate.holds());
        assert!((sol.certificate.multiplier + 1.0).abs() < 1e-12);
        assert!((sol.x[(1, 0)] - Complex64::new(0.1, 0.0)).norm() < 1e-12);
        assert!((sol.x[(2, 0)] - Complex64::new(0.0, 0.1)).norm() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        let q = ComplexMat::identity(2, 2);
        let g = ComplexMat::zeros(2, 1);
        assert!(matches!(solve_sphere_ls(&q, &g, 0.0), Err(Error::Degenerate(_))));
        assert!(matches!(
            solve_sphere_ls(&q, &ComplexMat::zeros(3, 1), 1.0),
            Err(Error::Dimension(_))
        ));
        let mut nh = q.clone();
        nh[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(matches!(solve_sphere_ls(&nh, &g, 1.0), Err(Error::Validation(_))));
    }
}
