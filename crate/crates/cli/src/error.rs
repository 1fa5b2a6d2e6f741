use std::path::PathBuf;

use superres_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error at {field}: {reason}")]
    Config { field: String, reason: String },

    #[error("{0}")]
    Convergence(CoreError),

    #[error("{0}")]
    Compute(CoreError),

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("image encoding failed for {}: {reason}", path.display())]
    Image { path: PathBuf, reason: String },
}

impl CliError {
    pub fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 for bad input, 3 for convergence failures, 4 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Compute(_) => 2,
            CliError::Convergence(_) => 3,
            CliError::Io { .. } | CliError::Image { .. } => 4,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidParameter { field, reason } => CliError::Config { field, reason },
            CoreError::UnsupportedOrder(_) => CliError::config("scan.order", e.to_string()),
            CoreError::Convergence { .. } => CliError::Convergence(e),
            other => CliError::Compute(other),
        }
    }
}
