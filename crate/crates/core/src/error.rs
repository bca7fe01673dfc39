use thiserror::Error;

/// Errors raised by the numerical layer.
///
/// Variants split into two families: invalid input (caught before any work
/// is done) and numerical failure (the computation ran but could not meet its
/// accuracy contract). [`Error::is_numerical`] tells them apart.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite value {value} at x = {at}")]
    NonFinite { at: f64, value: f64 },

    #[error("quadrature did not converge: error estimate {estimate:e} > tolerance {tol:e} after {subdivisions} subdivisions")]
    QuadratureNonConvergence {
        estimate: f64,
        tol: f64,
        subdivisions: usize,
    },

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("periodization violated: |f| = {value:e} at the domain edge")]
    Periodization { value: f64 },

    #[error("mass check failed: integral = {mass}, expected 1 within {tol:e}")]
    MassCheck { mass: f64, tol: f64 },

    #[error("empty sample batch")]
    EmptyBatch,

    #[error("cdf is not monotone near x = {at}")]
    NonMonotoneCdf { at: f64 },

    #[error("rejection sampler would starve: expected acceptance exp(-{exponent}) with t*eta^alpha > 30")]
    AcceptanceStarvation { exponent: f64 },

    #[error("spectrum unresolved: {detail}")]
    SpectrumUnresolved { detail: String },

    #[error("grid too coarse: refining did not reduce the residual ({coarse:e} -> {fine:e})")]
    GridTooCoarse { coarse: f64, fine: f64 },

    #[error("residual {max_abs:e} exceeds threshold {threshold:e} for {tag}")]
    ThresholdExceeded {
        tag: String,
        max_abs: f64,
        threshold: f64,
    },
}

impl Error {
    /// `true` for failures of the computation itself, `false` for rejected input.
    pub fn is_numerical(&self) -> bool {
        !matches!(
            self,
            Error::InvalidParameter(_) | Error::EmptyBatch | Error::AcceptanceStarvation { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
