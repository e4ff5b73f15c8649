//! Core algorithms for differential non-coherent transmission over fading
//! channels: complex matrix kernels, DAPSK/QAM/PSK constellations, channel
//! models, multiple-symbol differential detection, space-time block codes
//! (orthogonal, quasi-orthogonal, unitary group codes) with their
//! differential encoders/decoders, and the design-analysis criteria
//! (diversity order, coding gain, min-det) used to rank codebooks.
//!
//! The crate is `no_std` (with `alloc`); everything that needs an OS lives
//! in the companion simulation crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod alphabets;
pub mod channels;
pub mod cxmat;
pub mod design_analysis;
pub mod diff_qostbc;
pub mod diff_stbc;
pub mod dustm;
pub mod siso_diff;
pub mod stcodes;

pub use num_complex::Complex64;

use core::fmt;

/// Centralized numeric tolerances. Every threshold the algorithms rely on
/// lives here so tests and callers agree on one set of constants.
pub mod tol {
    /// Relative tolerance on singular values when counting rank.
    pub const RANK_REL: f64 = 1e-9;
    /// Hermitian-symmetry check threshold (absolute, relative to scale).
    pub const HERMITIAN_CHECK: f64 = 1e-10;
    /// Condition-number guard above which `inverse` refuses to proceed.
    pub const CONDITION_MAX: f64 = 1e12;
    /// Off-diagonal mass at which Jacobi sweeps stop, relative to ‖A‖_F.
    pub const JACOBI_OFF: f64 = 1e-14;
    /// Diagonal jitter added when a Cholesky pivot degenerates.
    pub const CHOLESKY_JITTER: f64 = 1e-12;
    /// Relative threshold under which a determinant counts as zero.
    pub const DET_ZERO_REL: f64 = 1e-9;
}

/// Error type for recoverable numeric and configuration failures.
///
/// Shape mismatches (multiplying a 2×3 by a 2×2, indexing out of range)
/// are programming errors and panic instead.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Matrix expected to be Hermitian deviates beyond tolerance.
    NotHermitian,
    /// Matrix is singular or so ill-conditioned that inversion is refused.
    IllConditioned,
    /// Matrix has no Cholesky factorization even after jitter.
    NotPositiveDefinite,
    /// A candidate enumeration would exceed its guard bound.
    SearchSpaceTooLarge { requested: u64, limit: u64 },
    /// Configuration value outside its documented domain.
    InvalidParameter(&'static str),
    /// The requested symbol split degenerates (subsystem amplitude is zero).
    DegenerateSplit,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotHermitian => write!(f, "matrix is not Hermitian within tolerance"),
            Error::IllConditioned => write!(f, "matrix is singular or ill-conditioned"),
            Error::NotPositiveDefinite => write!(f, "matrix is not positive definite"),
            Error::SearchSpaceTooLarge { requested, limit } => {
                write!(f, "search space of {requested} exceeds limit {limit}")
            }
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::DegenerateSplit => {
                write!(f, "subsystem split degenerates: equivalent amplitude is zero")
            }
        }
    }
}

impl core::error::Error for Error {}

/// Convenience alias used across the crate.
pub type Result<T> = core::result::Result<T, Error>;
