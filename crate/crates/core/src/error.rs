use thiserror::Error;

/// Errors produced anywhere in the crate.
///
/// `Domain` covers arguments outside the region where a quantity is defined
/// (poles, non-convergent integrals, an empty excised ensemble). `Integrity`
/// means a value that should hold by construction does not, e.g. a matrix
/// that is not in `SO(2N)`. `Convergence` means an iteration or quadrature
/// could not reach the requested tolerance.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("pole of {function} at {at}")]
    Pole { function: &'static str, at: String },
    #[error("integrity error: {0}")]
    Integrity(String),
    #[error("no convergence in {what}: estimate {estimate:e} exceeds tolerance {tolerance:e}")]
    Convergence {
        what: &'static str,
        estimate: f64,
        tolerance: f64,
    },
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn pole(function: &'static str, at: impl std::fmt::Display) -> Self {
        Error::Pole {
            function,
            at: at.to_string(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
