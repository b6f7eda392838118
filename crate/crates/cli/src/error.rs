use std::io;

use thiserror::Error;

/// Process exit statuses.
pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_VERIFICATION: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Library(#[from] cldiam::Error),

    #[error("{path}: {source}")]
    File { path: String, source: io::Error },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_VALIDATION,
            CliError::Library(e) => match e {
                cldiam::Error::Io(_) | cldiam::Error::Corrupt(_) => EXIT_IO,
                _ => EXIT_VALIDATION,
            },
            CliError::File { .. } | CliError::Io(_) | CliError::Json(_) | CliError::Csv(_) => EXIT_IO,
            CliError::Verification(_) => EXIT_VERIFICATION,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
