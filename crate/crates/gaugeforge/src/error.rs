use std::path::PathBuf;

use gaugeforge_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: malformed field file: {reason}")]
    Format { path: PathBuf, reason: String },
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 monitor breach, 3 solver failure, 4 I/O or configuration error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(CoreError::MonitorBreach { .. }) => 2,
            CliError::Core(
                CoreError::SolverDivergence { .. }
                | CoreError::SeriesGuard { .. }
                | CoreError::FarFromOrthogonal { .. },
            ) => 3,
            _ => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
