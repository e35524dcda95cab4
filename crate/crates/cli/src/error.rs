use serde_json::json;
use thiserror::Error;

/// Failures surfaced by the command-line driver.
#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] qppkit::Error),

    #[error("invalid arguments: {0}")]
    Usage(String),

    #[error("cannot parse {path}: {detail}")]
    Format { path: String, detail: String },

    #[error("i/o failure on {path}: {detail}")]
    Io { path: String, detail: String },
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn io(path: impl std::fmt::Display, err: impl std::fmt::Display) -> Self {
        CliError::Io { path: path.to_string(), detail: err.to_string() }
    }

    pub fn format(path: impl std::fmt::Display, detail: impl std::fmt::Display) -> Self {
        CliError::Format { path: path.to_string(), detail: detail.to_string() }
    }

    /// 1 for contract, validation and conditioning failures, 2 for resource
    /// limits, 3 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(qppkit::Error::Resource(_)) => 2,
            CliError::Io { .. } => 3,
            _ => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(qppkit::Error::Contract(_)) => "contract",
            CliError::Core(qppkit::Error::Validation { .. }) => "validation",
            CliError::Core(qppkit::Error::Conditioning { .. }) => "conditioning",
            CliError::Core(qppkit::Error::Resource(_)) => "resource",
            CliError::Usage(_) => "usage",
            CliError::Format { .. } => "format",
            CliError::Io { .. } => "io",
        }
    }

    /// Machine-readable form written to stderr.
    pub fn to_json(&self) -> serde_json::Value {
        let mut body = json!({
            "kind": self.kind(),
            "message": self.to_string(),
            "exit_code": self.exit_code(),
        });
        if let CliError::Core(qppkit::Error::Validation { what, residual, tolerance }) = self {
            body["what"] = json!(what);
            body["residual"] = json!(residual);
            body["tolerance"] = json!(tolerance);
        }
        json!({ "error": body })
    }
}
