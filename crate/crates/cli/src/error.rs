use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes.
pub mod exit {
    /// Success.
    pub const OK: i32 = 0;
    /// Unreadable file or malformed input.
    pub const IO: i32 = 1;
    /// Invalid configuration or arguments.
    pub const CONFIG: i32 = 2;
    /// The solver recommends not sampling.
    pub const ABSTAIN: i32 = 3;
    /// A certificate or oracle check failed.
    pub const VERIFICATION: i32 = 4;
}

/// Errors surfaced by the command layer.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] rad_core::Error),
}

impl CliError {
    /// Exit code for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Parse { .. } | CliError::Csv(_) => exit::IO,
            CliError::Json(e) if e.is_io() || e.is_syntax() || e.is_eof() => exit::IO,
            CliError::Json(_) | CliError::Config(_) | CliError::Core(_) => exit::CONFIG,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
