//! Narrowband Saleh-Valenzuela mmWave channel and its SVD reference
//! precoder/combiner.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::array::{steering_vector, UlaConfig};
use crate::linalg::svd_canonical;
use crate::rng::{seeded, CHANNEL_STREAM};
use crate::{ComplexMat, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChannelParams {
    pub num_tx: usize,
    pub num_rx: usize,
    pub num_paths: usize,
    pub rng_seed: u64,
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        if self.num_tx == 0 || self.num_rx == 0 || self.num_paths == 0 {
            return Err(Error::Validation(format!(
                "channel needs positive dimensions, got N_t={} N_r={} L={}",
                self.num_tx, self.num_rx, self.num_paths
            )));
        }
        Ok(())
    }
}

/// One channel draw: per-path gains and angles plus the assembled `N_r x N_t`
/// matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub gains: Vec<Complex64>,
    /// Angles of arrival, radians.
    pub aoas: Vec<f64>,
    /// Angles of departure, radians.
    pub aods: Vec<f64>,
    pub matrix: ComplexMat,
}

impl ChannelRealization {
    /// Re-assemble `sqrt(N_t N_r / L) sum_l alpha_l a_r(theta_r) a_t^H(theta_t)`
    /// from the stored path parameters.
    pub fn reconstruct(&self) -> Result<ComplexMat> {
        assemble(
            self.matrix.ncols(),
            self.matrix.nrows(),
            &self.gains,
            &self.aoas,
            &self.aods,
        )
    }
}

fn assemble(
    num_tx: usize,
    num_rx: usize,
    gains: &[Complex64],
    aoas: &[f64],
    aods: &[f64],
) -> Result<ComplexMat> {
    let tx = UlaConfig::half_wavelength(num_tx)?;
    let rx = UlaConfig::half_wavelength(num_rx)?;
    let l = gains.len();
    let scale = ((num_tx * num_rx) as f64 / l as f64).sqrt();
    let mut h = ComplexMat::zeros(num_rx, num_tx);
    for ((g, &aoa), &aod) in gains.iter().zip(aoas).zip(aods) {
        let ar = steering_vector(&rx, aoa);
        let at = steering_vector(&tx, aod);
        h += (ar * at.adjoint()) * (g * scale);
    }
    Ok(h)
}

/// Draw a channel. Gains are unit-variance circularly-symmetric complex
/// Gaussian; AoAs and AoDs are uniform on `[-pi, pi]`. Deterministic in
/// `params.rng_seed`.
pub fn generate_channel(params: &ChannelParams) -> Result<ChannelRealization> {
    params.validate()?;
    let mut rng = seeded(params.rng_seed, CHANNEL_STREAM);
    let l = params.num_paths;
    let gains: Vec<Complex64> = (0..l)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
        })
        .collect();
    let aoas: Vec<f64> = (0..l).map(|_| rng.random_range(-PI..=PI)).collect();
    let aods: Vec<f64> = (0..l).map(|_| rng.random_range(-PI..=PI)).collect();
    let matrix = assemble(params.num_tx, params.num_rx, &gains, &aoas, &aods)?;
    Ok(ChannelRealization {
        gains,
        aoas,
        aods,
        matrix,
    })
}

/// Fully digital SVD beamformers for a channel.
#[derive(Debug, Clone)]
pub struct DigitalBeamformers {
    /// `N_t x N_S` precoder, `||F_com||_F^2 = P_T`.
    pub precoder: ComplexMat,
    /// `N_r x N_S` combiner with orthonormal columns.
    pub combiner: ComplexMat,
    /// The `N_S` retained singular values, descending.
    pub singular_values: Vec<f64>,
}

/// Precoder from the top `num_streams` right singular vectors of `h`, scaled
/// uniformly to `total_power`; combiner from the matching left singular
/// vectors.
pub fn optimal_digital_beamformers(
    h: &ComplexMat,
    num_streams: usize,
    total_power: f64,
) -> Result<DigitalBeamformers> {
    let (nr, nt) = h.shape();
    if num_streams == 0 || num_streams > nr.min(nt) {
        return Err(Error::Dimension(format!(
            "{num_streams} streams requested from a {nr}x{nt} channel"
        )));
    }
    if !(total_power >= 0.0 && total_power.is_finite()) {
        return Err(Error::Validation(format!("invalid total power {total_power}")));
    }
    let svd = svd_canonical(h)?;
    let v = svd.v.columns(0, num_streams).into_owned();
    let u = svd.u.columns(0, num_streams).into_owned();
    // Orthonormal columns: ||V||_F^2 = N_S.
    let scale = (total_power / num_streams as f64).sqrt();
    Ok(DigitalBeamformers {
        precoder: v * Complex64::new(scale, 0.0),
        combiner: u,
        singular_values: svd.singular_values[..num_streams].to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::frob2;

    fn params(seed: u64) -> ChannelParams {
        ChannelParams {
            num_tx: 16,
            num_rx: 4,
            num_paths: 10,
            rng_seed: seed,
        }
    }

    #[test]
    fn single_path_is_rank_one() {
        let ch = generate_channel(&ChannelParams {
            num_paths: 1,
            ..params(5)
        })
        .unwrap();
        let s = svd_canonical(&ch.matrix).unwrap().singular_values;
        assert!(s[1] <= 1e-9 * s[0]);
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let a = generate_channel(&params(42)).unwrap();
        let b = generate_channel(&params(42)).unwrap();
        assert_eq!(a, b);
        let c = generate_channel(&params(43)).unwrap();
        assert_ne!(a.matrix, c.matrix);
    }

    #[test]
    fn angles_within_range() {
        let ch = generate_channel(&params(9)).unwrap();
        for a in ch.aoas.iter().chain(&ch.aods) {
            assert!(a.abs() <= PI);
        }
    }

    #[test]
    fn reconstruction_matches() {
        for seed in 0..50 {
            let ch = generate_channel(&params(seed)).unwrap();
            let r = ch.reconstruct().unwrap();
            assert!((r - &ch.matrix).norm() <= 1e-12 * ch.matrix.norm());
        }
    }

    #[test]
    fn invalid_params() {
        assert!(generate_channel(&ChannelParams {
            num_paths: 0,
            ..params(0)
        })
        .is_err());
    }

    #[test]
    fn known_svd_recovers_basis() {
        // diag(3, 2, 1, 0): top two right singular vectors are e_0, e_1.
        let mut h = ComplexMat::zeros(4, 4);
        h[(0, 0)] = Complex64::new(3.0, 0.0);
        h[(1, 1)] = Complex64::new(2.0, 0.0);
        h[(2, 2)] = Complex64::new(1.0, 0.0);
        let bf = optimal_digital_beamformers(&h, 2, 2.0).unwrap();
        for j in 0..2 {
            for i in 0..4 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((bf.precoder[(i, j)].norm() - expect).abs() < 1e-12);
            }
            // Canonical phase makes the pivot real positive.
            assert!((bf.precoder[(j, j)] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
        assert_eq!(bf.singular_values.len(), 2);
        assert!((bf.singular_values[0] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn rank_one_channel_factors() {
        let u = ComplexMat::from_column_slice(
            2,
            1,
            &[Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)],
        );
        let v = ComplexMat::from_column_slice(
            3,
            1,
            &[
                Complex64::new(0.0, 1.0 / 3f64.sqrt()),
                Complex64::new(1.0 / 3f64.sqrt(), 0.0),
                Complex64::new(-1.0 / 3f64.sqrt(), 0.0),
            ],
        );
        let h = (&u * v.adjoint()) * Complex64::new(5.0, 0.0);
        let bf = optimal_digital_beamformers(&h, 1, 1.0).unwrap();
        let fv = (bf.precoder.adjoint() * &v)[(0, 0)].norm();
        let wu = (bf.combiner.adjoint() * &u)[(0, 0)].norm();
        assert!((fv - 1.0).abs() < 1e-12);
        assert!((wu - 1.0).abs() < 1e-12);
    }

    #[test]
    fn precoder_power_and_combiner_orthonormality() {
        let ch = generate_channel(&params(3)).unwrap();
        let bf = optimal_digital_beamformers(&ch.matrix, 3, 7.5).unwrap();
        assert!((frob2(&bf.precoder) - 7.5).abs() < 1e-10);
        let g = bf.combiner.adjoint() * &bf.combiner;
        assert!((g - ComplexMat::identity(3, 3)).norm() < 1e-10);
        assert!(matches!(
            optimal_digital_beamformers(&ch.matrix, 5, 1.0),
            Err(Error::Dimension(_))
        ));
    }
}
