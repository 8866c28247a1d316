use std::ffi::CStr;
use std::ptr;

use dfrc_core::altmin::{taltmin, AltMinConfig};
use dfrc_core::array::{build_radar_beamformer, TargetScene};
use dfrc_core::channel::{generate_channel, optimal_digital_beamformers, ChannelParams};
use dfrc_core::linalg::to_row_major;
use dfrc_core::ComplexMat;
use dfrc_ffi::*;

fn read(m: *const DfrcMatrix) -> Vec<f64> {
    unsafe {
        let n = 2 * dfrc_matrix_rows(m) * dfrc_matrix_cols(m);
        let mut buf = vec![0.0; n];
        assert_eq!(dfrc_matrix_copy_to(m, buf.as_mut_ptr(), n), DfrcStatus::Ok);
        buf
    }
}

fn flat(m: &ComplexMat) -> Vec<f64> {
    to_row_major(m).into_iter().flat_map(|z| [z.re, z.im]).collect()
}

fn last_error() -> String {
    let n = dfrc_last_error_length();
    let mut buf = vec![0 as std::ffi::c_char; n + 1];
    unsafe {
        assert_eq!(dfrc_last_error_message(buf.as_mut_ptr(), n + 1), DfrcStatus::Ok);
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

#[test]
fn matrix_round_trip() {
    let data = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 11.0, 12.0];
    let mut m = ptr::null_mut();
    unsafe {
        assert_eq!(dfrc_matrix_new(2, 3, data.as_ptr(), &mut m), DfrcStatus::Ok);
        assert_eq!((dfrc_matrix_rows(m), dfrc_matrix_cols(m)), (2, 3));
        assert_eq!(read(m), data);
        let mut small = [0.0; 4];
        assert_eq!(dfrc_matrix_copy_to(m, small.as_mut_ptr(), 4), DfrcStatus::BufferTooSmall);
        dfrc_matrix_free(m);
        dfrc_matrix_free(ptr::null_mut());
    }
}

#[test]
fn null_arguments_are_reported() {
    unsafe {
        assert_eq!(dfrc_matrix_new(1, 1, ptr::null(), ptr::null_mut()), DfrcStatus::NullPointer);
        assert!(last_error().contains("out"));
        let mut out = ptr::null_mut();
        assert_eq!(dfrc_covariance(ptr::null(), &mut out), DfrcStatus::NullPointer);
        assert!(out.is_null());
        assert_eq!(dfrc_matrix_rows(ptr::null()), 0);
        assert!(!dfrc_report_converged(ptr::null()));
    }
}

#[test]
fn error_codes_follow_error_kind() {
    let angles = [0.3, -0.3];
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(
            dfrc_radar_beamformer(angles.as_ptr(), 2, 15, 1.0, &mut out),
            DfrcStatus::Dimension
        );
        assert!(last_error().contains("15"), "{}", last_error());
        assert_eq!(dfrc_channel_generate(4, 2, 0, 0, &mut out), DfrcStatus::InvalidArgument);
        let mut zero = ptr::null_mut();
        assert_eq!(dfrc_matrix_new(2, 2, ptr::null(), &mut zero), DfrcStatus::Ok);
        let mut bad = ptr::null_mut();
        let mut bad2 = ptr::null_mut();
        assert_eq!(dfrc_optimal_digital(zero, 3, 1.0, &mut bad, &mut bad2), DfrcStatus::Dimension);
        dfrc_matrix_free(zero);
    }
}

#[test]
fn pipeline_matches_core() {
    let (nt, nr, ns, nrf, p) = (24, 4, 3, 6, 4.0);
    let angles = [-0.4, 0.0, 0.5];
    let seed = 11;

    let ch = generate_channel(&ChannelParams {
        num_tx: nt,
        num_rx: nr,
        num_paths: 6,
        rng_seed: seed,
    })
    .unwrap();
    let dig = optimal_digital_beamformers(&ch.matrix, ns, p).unwrap();
    let f_rad = build_radar_beamformer(&TargetScene::new(angles.to_vec(), nt).unwrap(), p).unwrap();
    let mut cfg = AltMinConfig::new(0.6, p);
    cfg.rng_seed = seed;
    let report = taltmin(&dig.precoder, &f_rad, nrf, &cfg).unwrap();

    unsafe {
        let (mut h, mut fc, mut w, mut fr) =
            (ptr::null_mut(), ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
        assert_eq!(dfrc_channel_generate(nt, nr, 6, seed, &mut h), DfrcStatus::Ok);
        assert_eq!(read(h), flat(&ch.matrix));
        assert_eq!(dfrc_optimal_digital(h, ns, p, &mut fc, &mut w), DfrcStatus::Ok);
        assert_eq!(read(fc), flat(&dig.precoder));
        assert_eq!(dfrc_radar_beamformer(angles.as_ptr(), 3, nt, p, &mut fr), DfrcStatus::Ok);
        assert_eq!(read(fr), flat(&f_rad));

        let mut c = dfrc_altmin_config_default(0.6, p);
        assert!(c.relative_tolerance);
        assert_eq!(c.max_iterations, 100);
        c.rng_seed = seed;
        let mut rep = ptr::null_mut();
        assert_eq!(dfrc_taltmin(fc, fr, nrf, &c, &mut rep), DfrcStatus::Ok);
        assert_eq!(dfrc_report_iterations(rep), report.iterations_used);
        assert_eq!(dfrc_report_converged(rep), report.converged);
        let n = dfrc_report_trace_len(rep);
        let mut trace = vec![0.0; n];
        assert_eq!(dfrc_report_copy_trace(rep, trace.as_mut_ptr(), n), DfrcStatus::Ok);
        assert_eq!(trace, report.objective_trace);
        let mut phases = vec![0.0; dfrc_report_num_antennas(rep)];
        assert_eq!(
            dfrc_report_copy_phases(rep, phases.as_mut_ptr(), phases.len()),
            DfrcStatus::Ok
        );
        assert_eq!(phases, report.beamformer.analog.phases());

        let (mut f, mut bb, mut u) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
        assert_eq!(dfrc_report_precoder(rep, &mut f), DfrcStatus::Ok);
        assert_eq!(read(f), flat(&report.beamformer.materialize()));
        assert_eq!(dfrc_report_baseband(rep, &mut bb), DfrcStatus::Ok);
        assert_eq!((dfrc_matrix_rows(bb), dfrc_matrix_cols(bb)), (nrf, ns));
        assert_eq!(dfrc_report_unitary(rep, &mut u), DfrcStatus::Ok);
        assert_eq!(read(u), flat(report.unitary.matrix()));

        let mut rate = 0.0;
        assert_eq!(dfrc_achievable_rate(h, f, w, 0.0, &mut rate), DfrcStatus::Ok);
        let expected =
            dfrc_core::metrics::achievable_rate(&ch.matrix, &report.beamformer.materialize(), &dig.combiner, 0.0)
                .unwrap();
        assert_eq!(rate, expected);

        let mut r = ptr::null_mut();
        assert_eq!(dfrc_covariance(f, &mut r), DfrcStatus::Ok);
        let thetas = [-0.4, 0.0, 0.5, 1.2];
        let mut gains = [0.0; 4];
        assert_eq!(
            dfrc_beampattern(r, 0.5, thetas.as_ptr(), 4, gains.as_mut_ptr()),
            DfrcStatus::Ok
        );
        assert!(gains.iter().all(|g| *g >= 0.0));

        let mut json = ptr::null_mut();
        assert_eq!(dfrc_report_to_json(rep, &mut json), DfrcStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        dfrc_string_free(json);
        let back: dfrc_core::hybrid::HybridBeamformer = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report.beamformer);

        for m in [h, fc, w, fr, f, bb, u, r] {
            dfrc_matrix_free(m);
        }
        dfrc_report_free(rep);
    }
}

#[test]
fn version_is_package_version() {
    let v = unsafe { CStr::from_ptr(dfrc_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn errors_are_per_thread() {
    unsafe {
        let mut out = ptr::null_mut();
        dfrc_covariance(ptr::null(), &mut out);
    }
    let here = last_error();
    let other = std::thread::spawn(|| dfrc_last_error_length()).join().unwrap();
    assert!(!here.is_empty());
    assert_eq!(other, 0);
}
