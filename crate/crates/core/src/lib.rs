//! Energy-efficiency modelling for near-field extra-large MIMO base stations.
//!
//! The crate covers the whole analysis chain: ULA geometry and near-field
//! channels ([`geometry`], [`channel`]), zero-forcing links ([`transceiver`]),
//! closed-form and Monte Carlo spectral efficiency ([`throughput`],
//! [`montecarlo`]), the parametric power model ([`power`]), energy-efficiency
//! scaling laws ([`ee`]) and the configuration/sweep plumbing used by the
//! command line ([`config`], [`sweep`]).

pub mod channel;
pub mod config;
pub mod ee;
pub mod error;
pub mod geometry;
pub mod montecarlo;
pub mod power;
pub mod scenario;
pub mod special;
pub mod sweep;
pub mod throughput;
pub mod transceiver;

pub use error::{Error, ErrorClass, Result};

pub use num_complex::Complex64;

/// Complex matrix type used for channels and beamformers.
pub type CMatrix = nalgebra::DMatrix<Complex64>;
/// Complex column vector.
pub type CVector = nalgebra::DVector<Complex64>;

/// Propagation speed used to turn carrier frequency into wavelength (m/s).
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

/// Thermal noise density of -174 dBm/Hz in W/Hz.
pub fn thermal_noise_density() -> f64 {
    dbm_per_hz_to_watts(-174.0)
}

pub fn dbm_per_hz_to_watts(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0) * 1e-3
}

pub fn watts_to_dbm_per_hz(watts: f64) -> f64 {
    10.0 * (watts * 1e3).log10()
}
