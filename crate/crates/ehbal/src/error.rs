use std::io;
use std::path::PathBuf;

/// Errors of the command-line layer. Each names the operation that failed.
#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error(transparent)]
    Core(#[from] ehbal_core::Error),
    #[error("{op}: {reason}")]
    Invalid { op: &'static str, reason: String },
    #[error("{op}: {}: {source}", path.display())]
    Io {
        op: &'static str,
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{op}: {source}")]
    Csv {
        op: &'static str,
        #[source]
        source: csv::Error,
    },
    #[error("{op}: {source}")]
    Json {
        op: &'static str,
        #[source]
        source: serde_json::Error,
    },
}

impl AppError {
    pub fn invalid(op: &'static str, reason: impl Into<String>) -> Self {
        AppError::Invalid { op, reason: reason.into() }
    }

    /// 2 for numerical non-convergence, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Core(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, AppError>;
