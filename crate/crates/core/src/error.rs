//! Library-wide error type.
//!
//! Negative outcomes that are part of normal operation (no path found, the
//! step budget running out) are encoded in return values, not here.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A coordinate or index fell outside the addressed domain.
    #[error("out of range: {0}")]
    OutOfRange(String),

    /// A component supplied by the caller broke its contract (e.g. a denoiser
    /// returned the wrong shape).
    #[error("contract violation: {0}")]
    ContractViolation(String),

    /// A computation produced non-finite values.
    #[error("numeric failure: {0}")]
    NumericFailure(String),

    /// Two landscape directions were (numerically) parallel.
    #[error("degenerate direction: {0}")]
    DegenerateDirection(String),

    /// Not enough data to estimate a quantity (e.g. no quasi-static frames
    /// for the floor height).
    #[error("not estimable: {0}")]
    NotEstimable(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
