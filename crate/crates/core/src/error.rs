use thiserror::Error;

/// Errors raised by the numerical kernels and evaluators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A parameter set or selection spec violates its invariants.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A numerical procedure did not reach the requested accuracy.
    /// `estimate` carries the best value obtained so far.
    #[error("accuracy error in {context}: estimate {estimate:e}, error bound {error:e}")]
    Accuracy { context: String, estimate: f64, error: f64 },

    /// Configuration or dataset I/O failure.
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
