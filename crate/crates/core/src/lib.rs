//! Hybrid analog-digital beamforming for a millimeter-wave dual-function
//! radar-communication (DFRC) base station.
//!
//! The base station drives a partially-connected (sub-arrayed) hybrid
//! transmitter. Given the optimal fully digital communication precoder
//! `F_com` and a sub-arrayed radar beamformer `F_rad`, [`altmin::taltmin`]
//! designs the analog phases `F_RF` and the baseband matrix `F_BB` so that
//! `F_RF F_BB` approaches `F_com` and `F_rad U` at the same time, where `U`
//! is a free semi-unitary rotation that leaves the radar beampattern intact.
//!
//! Module map:
//!
//! - [`array`]: ULA steering vectors, radar beamformer, beampatterns.
//! - [`channel`]: Saleh-Valenzuela channel draws, SVD reference precoder.
//! - [`hybrid`]: block-diagonal analog stage and baseband stage.
//! - [`altmin`]: the three subproblem solvers and the alternating driver.
//! - [`metrics`]: rate, fitting errors, beam-pointing deviation.
//! - [`experiment`]: seeded Monte Carlo harness behind the `dfrc` binary.

pub mod altmin;
pub mod array;
pub mod channel;
pub mod error;
pub mod experiment;
pub mod hybrid;
pub mod linalg;
pub mod metrics;
pub mod rng;

pub use error::{Error, Result};

/// Dense complex matrix used throughout the crate.
pub type ComplexMat = nalgebra::DMatrix<num_complex::Complex64>;

pub use num_complex::Complex64;
