use thiserror::Error;

/// Errors produced by the calibration library.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A search target fell outside the attainable range of the function.
    #[error("target {target} outside function range [{f_lo}, {f_hi}]")]
    TargetOutOfRange { target: f64, f_lo: f64, f_hi: f64 },

    /// Bisection did not reach the requested tolerance within the iteration cap.
    #[error("bisection did not converge after {iterations} iterations (bracket width {width:e})")]
    NoConvergence { iterations: usize, width: f64 },

    /// A predictive system broke one of its behavioural guarantees.
    #[error("predictive-system contract violated: {0}")]
    ContractViolation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::ContractViolation(msg.into())
    }
}
