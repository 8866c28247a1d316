//! C ABI over `dfrc-core`.
//!
//! Matrices cross the boundary as opaque `DfrcMatrix` handles built from
//! row-major interleaved `(re, im)` doubles. Every entry point returns a
//! `DfrcStatus`; on failure the message is kept per thread and can be read
//! with `dfrc_last_error_message`. Handles returned through `out` parameters
//! are owned by the caller and released with the matching `*_free`.

// Entry points null-check every pointer before use.
#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use dfrc_core::altmin::{taltmin, AltMinConfig, AltMinReport, Tolerance};
use dfrc_core::array::{
    beampattern, build_radar_beamformer, covariance_of, TargetScene, UlaConfig,
};
use dfrc_core::channel::{generate_channel, optimal_digital_beamformers, ChannelParams};
use dfrc_core::linalg::{from_row_major, to_row_major};
use dfrc_core::metrics::achievable_rate;
use dfrc_core::{ComplexMat, Error};
use num_complex::Complex64;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DfrcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Dimension = 3,
    Degenerate = 4,
    Solver = 5,
    BufferTooSmall = 6,
    Panic = 7,
    Internal = 8,
}

impl From<&Error> for DfrcStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Dimension(_) | Error::Structure(_) => DfrcStatus::Dimension,
            Error::Validation(_) | Error::Config { .. } | Error::Json(_) => {
                DfrcStatus::InvalidArgument
            }
            Error::Degenerate(_) => DfrcStatus::Degenerate,
            Error::LinearSolve(_) | Error::Solver(_) => DfrcStatus::Solver,
            Error::Trial { source, .. } => DfrcStatus::from(source.as_ref()),
            Error::Io(_) => DfrcStatus::Internal,
        }
    }
}

/// Opaque complex matrix.
pub struct DfrcMatrix(ComplexMat);

/// Opaque result of an alternating-minimization run.
pub struct DfrcReport(AltMinReport);

/// Plain-data solver settings. `relative_tolerance` selects
/// `epsilon = tolerance * (1 + f0)` instead of an absolute threshold.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct DfrcAltMinConfig {
    pub eta: f64,
    pub total_power: f64,
    pub tolerance: f64,
    pub relative_tolerance: bool,
    pub max_iterations: usize,
    pub rng_seed: u64,
}

impl From<&DfrcAltMinConfig> for AltMinConfig {
    fn from(c: &DfrcAltMinConfig) -> Self {
        AltMinConfig {
            eta: c.eta,
            total_power: c.total_power,
            tolerance: if c.relative_tolerance {
                Tolerance::Relative(c.tolerance)
            } else {
                Tolerance::Absolute(c.tolerance)
            },
            max_iterations: c.max_iterations,
            rng_seed: c.rng_seed,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

struct Fail(DfrcStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(DfrcStatus::from(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(DfrcStatus::NullPointer, format!("`{what}` is null"))
}

fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> DfrcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DfrcStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            DfrcStatus::Panic
        }
    }
}

unsafe fn mat_ref<'a>(m: *const DfrcMatrix, what: &str) -> Result<&'a ComplexMat, Fail> {
    m.as_ref().map(|m| &m.0).ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

unsafe fn copy_reals(src: &[f64], out: *mut f64, len: usize) -> Result<(), Fail> {
    if len < src.len() {
        return Err(Fail(
            DfrcStatus::BufferTooSmall,
            format!("buffer holds {len} doubles, {} needed", src.len()),
        ));
    }
    if !src.is_empty() {
        if out.is_null() {
            return Err(null("out"));
        }
        ptr::copy_nonoverlapping(src.as_ptr(), out, src.len());
    }
    Ok(())
}

fn interleave(m: &ComplexMat) -> Vec<f64> {
    to_row_major(m).into_iter().flat_map(|z| [z.re, z.im]).collect()
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dfrc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Length in bytes (without the terminator) of this thread's last error
/// message; 0 if there is none.
#[no_mangle]
pub extern "C" fn dfrc_last_error_length() -> usize {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(0, |c| c.as_bytes().len()))
}

/// Copies this thread's last error message, NUL-terminated, into `buf`.
/// Needs `dfrc_last_error_length() + 1` bytes.
#[no_mangle]
pub unsafe extern "C" fn dfrc_last_error_message(buf: *mut c_char, buf_len: usize) -> DfrcStatus {
    if buf.is_null() {
        return DfrcStatus::NullPointer;
    }
    LAST_ERROR.with(|slot| {
        let slot = slot.borrow();
        let bytes = slot.as_ref().map_or(&b"\0"[..], |c| c.as_bytes_with_nul());
        if buf_len < bytes.len() {
            return DfrcStatus::BufferTooSmall;
        }
        ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, bytes.len());
        DfrcStatus::Ok
    })
}

/// New `rows x cols` matrix from `2 * rows * cols` interleaved doubles in
/// row-major order. A null `data` gives the zero matrix.
#[no_mangle]
pub unsafe extern "C" fn dfrc_matrix_new(
    rows: usize,
    cols: usize,
    data: *const f64,
    out: *mut *mut DfrcMatrix,
) -> DfrcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let n = rows
            .checked_mul(cols)
            .ok_or_else(|| Fail(DfrcStatus::InvalidArgument, "matrix size overflows".into()))?;
        let m = if data.is_null() || n == 0 {
            ComplexMat::zeros(rows, cols)
        } else {
            let raw = slice::from_raw_parts(data, 2 * n);
            let entries: Vec<Complex64> =
                raw.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect();
            from_row_major(rows, cols, &entries)?
        };
        put(out, DfrcMatrix(m));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn dfrc_matrix_rows(m: *const DfrcMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.0.nrows())
}

#[no_mangle]
pub unsafe extern "C" fn dfrc_matrix_cols(m: *const DfrcMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.0.ncols())
}

/// Writes `2 * rows * cols` interleaved doubles, row-major.
#[no_mangle]
pub unsafe extern "C" fn dfrc_matrix_copy_to(
    m: *const DfrcMatrix,
    out: *mut f64,
    len: usize,
) -> DfrcStatus {
    guard(|| copy_reals(&interleave(mat_ref(m, "m")?), out, len))
}

#[no_mangle]
pub unsafe extern "C" fn dfrc_matrix_free(m: *mut DfrcMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Draws a Saleh-Valenzuela channel matrix (`num_rx x num_tx`).
#[no_mangle]
pub unsafe extern "C" fn dfrc_channel_generate(
    num_tx: usize,
    num_rx: usize,
    num_paths: usize,
    seed: u64,
    out: *mut *mut DfrcMatrix,
) -> DfrcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let ch = generate_channel(&ChannelParams {
            num_tx,
            num_rx,
            num_paths,
            rng_seed: seed,
        })?;
        put(out, DfrcMatrix(ch.matrix));
        Ok(())
    })
}

/// SVD precoder (`N_t x N_S`, power `total_power`) and combiner (`N_r x N_S`).
#[no_mangle]
pub unsafe extern "C" fn dfrc_optimal_digital(
    h: *const DfrcMatrix,
    num_streams: usize,
    total_power: f64,
    out_precoder: *mut *mut DfrcMatrix,
    out_combiner: *mut *mut DfrcMatrix,
) -> DfrcStatus {
    guard(|| {
        let h = mat_ref(h, "h")?;
        if out_precoder.is_null() || out_combiner.is_null() {
            return Err(null("out_precoder/out_combiner"));
        }
        let d = optimal_digital_beamformers(h, num_streams, total_power)?;
        put(out_precoder, DfrcMatrix(d.precoder));
        put(out_combiner, DfrcMatrix(d.combiner));
        Ok(())
    })
}

/// Sub-arrayed radar beamformer for targets at `angles_rad`.
#[no_mangle]
pub unsafe extern "C" fn dfrc_radar_beamformer(
    angles_rad: *const f64,
    num_targets: usize,
    num_antennas: usize,
    total_power: f64,
    out: *mut *mut DfrcMatrix,
) -> DfrcStatus {
    guard(|| {
        if angles_rad.is_null() && num_targets > 0 {
            return Err(null("angles_rad"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let angles = if num_targets == 0 {
            Vec::new()
        } else {
            slice::from_raw_parts(angles_rad, num_targets).to_vec()
        };
        let scene = TargetScene::new(angles, num_antennas)?;
        put(out, DfrcMatrix(build_radar_beamformer(&scene, total_power)?));
        Ok(())
    })
}

/// `F F^H`.
#[no_mangle]
pub unsafe extern "C" fn dfrc_covariance(
    f: *const DfrcMatrix,
    out: *mut *mut DfrcMatrix,
) -> DfrcStatus {
    guard(|| {
        let f = mat_ref(f, "f")?;
        if out.is_null() {
            return Err(null("out"));
        }
        put(out, DfrcMatrix(covariance_of(f)));
        Ok(())
    })
}

/// Evaluates `a(theta)^H R a(theta)` at `num_angles` angles (radians) for a
/// ULA with `spacing` in wavelengths; `r` must be Hermitian.
#[no_mangle]
pub unsafe extern "C" fn dfrc_beampattern(
    r: *const DfrcMatrix,
    spacing: f64,
    thetas: *const f64,
    num_angles: usize,
    out_gains: *mut f64,
) -> DfrcStatus {
    guard(|| {
        let r = mat_ref(r, "r")?;
        if num_angles == 0 {
            return Ok(());
        }
        if thetas.is_null() {
            return Err(null("thetas"));
        }
        let cfg = UlaConfig::new(r.nrows(), spacing)?;
        let gains = beampattern(r, &cfg, slice::from_raw_parts(thetas, num_angles))?;
        copy_reals(&gains, out_gains, num_angles)
    })
}

/// Spectral efficiency in bits/s/Hz of precoder `f` and combiner `w` over `h`.
#[no_mangle]
pub unsafe extern "C" fn dfrc_achievable_rate(
    h: *const DfrcMatrix,
    f: *const DfrcMatrix,
    w: *const DfrcMatrix,
    snr_db: f64,
    out_rate: *mut f64,
) -> DfrcStatus {
    guard(|| {
        let (h, f, w) = (mat_ref(h, "h")?, mat_ref(f, "f")?, mat_ref(w, "w")?);
        if out_rate.is_null() {
            return Err(null("out_rate"));
        }
        *out_rate = achievable_rate(h, f, w, snr_db)?;
        Ok(())
    })
}

/// Default settings: relative tolerance 1e-5, 100 iterations, seed 0.
#[no_mangle]
pub extern "C" fn dfrc_altmin_config_default(eta: f64, total_power: f64) -> DfrcAltMinConfig {
    let d = AltMinConfig::new(eta, total_power);
    let (tolerance, relative_tolerance) = match d.tolerance {
        Tolerance::Relative(v) => (v, true),
        Tolerance::Absolute(v) => (v, false),
    };
    DfrcAltMinConfig {
        eta: d.eta,
        total_power: d.total_power,
        tolerance,
        relative_tolerance,
        max_iterations: d.max_iterations,
        rng_seed: d.rng_seed,
    }
}

/// Hybrid design fitting `f_com` (`N_t x N_S`) and `f_rad` (`N_t x N_tar`)
/// with `num_rf_chains` sub-arrays.
#[no_mangle]
pub unsafe extern "C" fn dfrc_taltmin(
    f_com: *const DfrcMatrix,
    f_rad: *const DfrcMatrix,
    num_rf_chains: usize,
    cfg: *const DfrcAltMinConfig,
    out: *mut *mut DfrcReport,
) -> DfrcStatus {
    guard(|| {
        let (f_com, f_rad) = (mat_ref(f_com, "f_com")?, mat_ref(f_rad, "f_rad")?);
        let cfg = cfg.as_ref().ok_or_else(|| null("cfg"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let report = taltmin(f_com, f_rad, num_rf_chains, &AltMinConfig::from(cfg))?;
        put(out, DfrcReport(report));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn dfrc_report_iterations(r: *const DfrcReport) -> usize {
    r.as_ref().map_or(0, |r| r.0.iterations_used)
}

#[no_mangle]
pub unsafe extern "C" fn dfrc_report_converged(r: *const DfrcReport) -> bool {
    r.as_ref().is_some_and(|r| r.0.converged)
}

/// Number of recorded objective values, `iterations + 1`.
#[no_mangle]
pub unsafe extern "C" fn dfrc_report_trace_len(r: *const DfrcReport) -> usize {
    r.as_ref().map_or(0, |r| r.0.objective_trace.len())
}

#[no_mangle]
pub unsafe extern "C" fn dfrc_report_copy_trace(
    r: *const DfrcReport,
    out: *mut f64,
    len: usize,
) -> DfrcStatus {
    guard(|| {
        let r = r.as_ref().ok_or_else(|| null("r"))?;
        copy_reals(&r.0.objective_trace, out, len)
    })
}

#[no_mangle]
pub unsafe extern "C" fn dfrc_report_num_antennas(r: *const DfrcReport) -> usize {
    r.as_ref().map_or(0, |r| r.0.beamformer.analog.num_antennas())
}

/// Analog phases in `[0, 2 pi)`, one per antenna.
#[no_mangle]
pub unsafe extern "C" fn dfrc_report_copy_phases(
    r: *const DfrcReport,
    out: *mut f64,
    len: usize,
) -> DfrcStatus {
    guard(|| {
        let r = r.as_ref().ok_or_else(|| null("r"))?;
        copy_reals(r.0.beamformer.analog.phases(), out, len)
    })
}

/// Dense hybrid precoder `F_RF F_BB`.
#[no_mangle]
pub unsafe extern "C" fn dfrc_report_precoder(
    r: *const DfrcReport,
    out: *mut *mut DfrcMatrix,
) -> DfrcStatus {
    report_matrix(r, out, |r| r.beamformer.materialize())
}

#[no_mangle]
pub unsafe extern "C" fn dfrc_report_baseband(
    r: *const DfrcReport,
    out: *mut *mut DfrcMatrix,
) -> DfrcStatus {
    report_matrix(r, out, |r| r.beamformer.baseband.matrix().clone())
}

#[no_mangle]
pub unsafe extern "C" fn dfrc_report_unitary(
    r: *const DfrcReport,
    out: *mut *mut DfrcMatrix,
) -> DfrcStatus {
    report_matrix(r, out, |r| r.unitary.matrix().clone())
}

unsafe fn report_matrix(
    r: *const DfrcReport,
    out: *mut *mut DfrcMatrix,
    pick: impl FnOnce(&AltMinReport) -> ComplexMat,
) -> DfrcStatus {
    guard(|| {
        let r = r.as_ref().ok_or_else(|| null("r"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        put(out, DfrcMatrix(pick(&r.0)));
        Ok(())
    })
}

/// The final hybrid beamformer as a JSON document; release the string with
/// `dfrc_string_free`.
#[no_mangle]
pub unsafe extern "C" fn dfrc_report_to_json(
    r: *const DfrcReport,
    out: *mut *mut c_char,
) -> DfrcStatus {
    guard(|| {
        let r = r.as_ref().ok_or_else(|| null("r"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let text = serde_json::to_string(&r.0.beamformer).map_err(Error::from)?;
        let c = CString::new(text).map_err(|e| Fail(DfrcStatus::Internal, e.to_string()))?;
        *out = c.into_raw();
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn dfrc_report_free(r: *mut DfrcReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

#[no_mangle]
pub unsafe extern "C" fn dfrc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
