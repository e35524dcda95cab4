use thiserror::Error;

/// Failure modes shared by every module.
///
/// The variants are coarse on purpose: callers (the CLI in particular) map
/// them onto exit codes, while the message carries the specifics.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// An input violated a documented precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    /// A matrix failed one of its structural checks (unitary, Hermitian, density).
    #[error("validation failed: {what} (residual {residual:.3e} > tolerance {tolerance:.1e})")]
    Validation {
        what: String,
        residual: f64,
        tolerance: f64,
    },

    /// A numerical procedure lost too much accuracy to continue.
    #[error("ill-conditioned at step {step}: {detail} (residual {residual:.3e})")]
    Conditioning {
        step: usize,
        detail: String,
        residual: f64,
    },

    /// A requested construction exceeds the configured size limits.
    #[error("resource limit exceeded: {0}")]
    Resource(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn validation(what: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Error::Validation {
            what: what.into(),
            residual,
            tolerance,
        }
    }
}
