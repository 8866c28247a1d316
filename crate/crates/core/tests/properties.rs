use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use dfrc_core::altmin::{objective, solve_unitary};
use dfrc_core::array::{
    beampattern, build_radar_beamformer, covariance_of, steering_vector, AngleGrid, TargetScene,
    UlaConfig,
};
use dfrc_core::channel::{generate_channel, optimal_digital_beamformers, ChannelParams};
use dfrc_core::hybrid::{
    normalize_power, AnalogBeamformer, BasebandBeamformer, HybridBeamformer,
};
use dfrc_core::linalg::{
    complex_gaussian, frob2, hermitian_defect, hermitian_eigen, orthonormal_rows, svd_canonical,
};
use dfrc_core::metrics::{achievable_rate, fitting_errors};
use dfrc_core::rng::seeded;
use dfrc_core::ComplexMat;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn max_abs_diff(a: &ComplexMat, b: &ComplexMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn random_hybrid(seed: u64, nt: usize, nrf: usize, ns: usize) -> HybridBeamformer {
    let mut rng = seeded(seed, 7);
    let phases: Vec<f64> = complex_gaussian(&mut rng, nt, 1).iter().map(|z| z.arg()).collect();
    let analog = AnalogBeamformer::new(nrf, phases).unwrap();
    let bb = BasebandBeamformer::new(complex_gaussian(&mut rng, nrf, ns)).unwrap();
    HybridBeamformer::new(analog, bb).unwrap()
}

/// (N_t, N_RF) pairs with N_RF | N_t.
fn sub_array_dims() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=6, 1usize..=6).prop_map(|(nrf, k)| (nrf * k, nrf))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn steering_vector_has_unit_norm(n in 1usize..64, theta in -PI / 2.0..PI / 2.0, d in 0.1f64..2.0) {
        let cfg = UlaConfig::new(n, d).unwrap();
        let a = steering_vector(&cfg, theta);
        prop_assert!((a.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn covariance_is_hermitian_psd(seed in any::<u64>(), n in 1usize..12, k in 1usize..6) {
        let f = complex_gaussian(&mut seeded(seed, 0), n, k);
        let r = covariance_of(&f);
        prop_assert_eq!(hermitian_defect(&r), 0.0);
        let eig = hermitian_eigen(&r).unwrap();
        let scale = frob2(&f).max(1.0);
        prop_assert!(eig.eigenvalues[0] >= -1e-12 * scale);
    }

    #[test]
    fn beampattern_invariant_under_semi_unitary(seed in any::<u64>(), extra in 0usize..4) {
        let n = 24;
        let scene = TargetScene::from_degrees(&[-40.0, 10.0, 50.0], n).unwrap();
        let f_rad = build_radar_beamformer(&scene, 5.0).unwrap();
        let mut rng = seeded(seed, 3);
        let u1 = orthonormal_rows(&complex_gaussian(&mut rng, 3, 3 + extra)).unwrap();
        let u2 = orthonormal_rows(&complex_gaussian(&mut rng, 3, 3 + extra)).unwrap();
        let cfg = UlaConfig::half_wavelength(n).unwrap();
        let grid = AngleGrid { start: -90.0, stop: 90.0, step: 1.0 }.radians();
        let g0 = beampattern(&covariance_of(&f_rad), &cfg, &grid).unwrap();
        let g1 = beampattern(&covariance_of(&(&f_rad * &u1)), &cfg, &grid).unwrap();
        let g2 = beampattern(&covariance_of(&(&f_rad * &u2)), &cfg, &grid).unwrap();
        for ((a, b), d) in g0.iter().zip(&g1).zip(&g2) {
            prop_assert!((a - b).abs() <= 1e-9 && (a - d).abs() <= 1e-9);
        }
    }

    #[test]
    fn radiated_power_identity((nt, nrf) in sub_array_dims(), ns in 1usize..5, seed in any::<u64>(), p in 0.1f64..20.0) {
        let hb = random_hybrid(seed, nt, nrf, ns);
        let dense = hb.materialize();
        prop_assert!((frob2(&dense) - hb.radiated_power()).abs() <= 1e-10 * frob2(&dense));
        let bb = normalize_power(&hb.baseband, nt, nrf, p).unwrap();
        let scaled = HybridBeamformer::new(hb.analog.clone(), bb).unwrap();
        prop_assert!((frob2(&scaled.materialize()) - p).abs() <= 1e-9 * p);
    }

    #[test]
    fn materialize_is_linear((nt, nrf) in sub_array_dims(), ns in 1usize..4, seed in any::<u64>(), alpha in -3.0f64..3.0, beta in -3.0f64..3.0) {
        let mut rng = seeded(seed, 9);
        let phases: Vec<f64> = (0..nt).map(|i| (i as f64 * 0.7 + seed as f64 * 1e-3) % 6.0).collect();
        let analog = AnalogBeamformer::new(nrf, phases).unwrap();
        let x = complex_gaussian(&mut rng, nrf, ns);
        let y = complex_gaussian(&mut rng, nrf, ns);
        let combo = &x * c(alpha) + &y * c(beta);
        let mat = |m: &ComplexMat| HybridBeamformer::new(analog.clone(), BasebandBeamformer::new(m.clone()).unwrap()).unwrap().materialize();
        let lhs = mat(&combo);
        let rhs = mat(&x) * c(alpha) + mat(&y) * c(beta);
        prop_assert!(max_abs_diff(&lhs, &rhs) <= 1e-10);
    }

    #[test]
    fn radar_beamformer_has_target_rank(k in 1usize..5, m in 1usize..8, p in 0.5f64..10.0) {
        let n = k * m;
        let angles: Vec<f64> = (0..k).map(|i| -60.0 + 120.0 * i as f64 / k as f64).collect();
        let f = build_radar_beamformer(&TargetScene::from_degrees(&angles, n).unwrap(), p).unwrap();
        prop_assert!((frob2(&f) - p).abs() <= 1e-12 * p);
        let s = svd_canonical(&covariance_of(&f)).unwrap().singular_values;
        let rank = s.iter().filter(|v| **v > 1e-10 * s[0]).count();
        prop_assert_eq!(rank, k);
    }

    #[test]
    fn rate_monotone_in_snr(seed in any::<u64>(), lo in -20.0f64..20.0, step in 0.0f64..10.0) {
        let ch = generate_channel(&ChannelParams { num_tx: 8, num_rx: 3, num_paths: 4, rng_seed: seed }).unwrap();
        let f = complex_gaussian(&mut seeded(seed, 5), 8, 2);
        let w = complex_gaussian(&mut seeded(seed, 6), 3, 2);
        let a = achievable_rate(&ch.matrix, &f, &w, lo).unwrap();
        let b = achievable_rate(&ch.matrix, &f, &w, lo + step).unwrap();
        prop_assert!(b >= a - 1e-12 * a.max(1.0));
    }

    #[test]
    fn rate_of_svd_beamformers_is_sum_over_modes(seed in any::<u64>(), snr in -10.0f64..15.0) {
        let (ns, p) = (3usize, 4.0);
        let ch = generate_channel(&ChannelParams { num_tx: 16, num_rx: 4, num_paths: 6, rng_seed: seed }).unwrap();
        let d = optimal_digital_beamformers(&ch.matrix, ns, p).unwrap();
        let gamma = 10f64.powf(snr / 10.0);
        let expected: f64 = d.singular_values.iter()
            .map(|s| (1.0 + gamma / ns as f64 * p / ns as f64 * s * s).log2())
            .sum();
        let r = achievable_rate(&ch.matrix, &d.precoder, &d.combiner, snr).unwrap();
        prop_assert!((r - expected).abs() <= 1e-9 * expected.max(1.0), "{} vs {}", r, expected);
    }

    #[test]
    fn fitting_errors_are_affine_in_eta(seed in any::<u64>(), eta in 0.0f64..=1.0) {
        let (nt, nrf, ns) = (12, 4, 3);
        let hb = random_hybrid(seed, nt, nrf, ns);
        let mut rng = seeded(seed, 11);
        let f_com = complex_gaussian(&mut rng, nt, ns);
        let f_rad = build_radar_beamformer(&TargetScene::from_degrees(&[-20.0, 0.0, 20.0], nt).unwrap(), 3.0).unwrap();
        let u = solve_unitary(&f_rad, &hb.materialize()).unwrap();
        let f_rad_u = &f_rad * u.matrix();
        let e = fitting_errors(&hb.materialize(), &f_com, &f_rad_u, eta).unwrap();
        prop_assert!((e.weighted - (eta * e.comm + (1.0 - eta) * e.radar)).abs() <= 1e-12 * e.weighted.max(1.0));
        let obj = objective(&hb.analog, hb.baseband.matrix(), &u, &f_com, &f_rad, eta).unwrap();
        prop_assert!((obj - e.weighted).abs() <= 1e-10 * obj.max(1.0));
    }
}

#[test]
fn svd_combiner_is_orthonormal_and_precoder_spans_right_singular_space() {
    for seed in 0..20 {
        let ch = generate_channel(&ChannelParams {
            num_tx: 32,
            num_rx: 6,
            num_paths: 8,
            rng_seed: seed,
        })
        .unwrap();
        let d = optimal_digital_beamformers(&ch.matrix, 4, 6.0).unwrap();
        let gram = d.combiner.adjoint() * &d.combiner;
        assert!(max_abs_diff(&gram, &ComplexMat::identity(4, 4)) < 1e-12);
        let hh = ch.matrix.adjoint() * &ch.matrix;
        let scale = (6.0f64 / 4.0).sqrt();
        for (j, s) in d.singular_values.iter().enumerate() {
            let v = d.precoder.column(j) / c(scale);
            let hv = &hh * &v;
            let diff = (hv - &v * c(s * s)).norm();
            assert!(diff <= 1e-9 * s * s, "seed {seed} column {j}: {diff}");
        }
    }
}
