use thiserror::Error;

/// Failures surfaced by the harness, file formats and CLI.
///
/// [`AppError::exit_code`] fixes the process exit convention: 2 for input
/// and validation problems, 3 for geometry/numeric failures, 4 for I/O.
#[derive(Debug, Error)]
pub enum AppError {
    #[error("failed to parse {path}: {message}")]
    Parse { path: String, message: String },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("geometry failure: {0}")]
    Numeric(rssloc_core::Error),
    #[error("placement rejection budget exhausted after {attempts} attempts (setting {setting}, trial {trial})")]
    PlacementFailed {
        attempts: usize,
        setting: String,
        trial: usize,
    },
    #[error("empty result set")]
    EmptyAggregate,
    #[error("I/O failure on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("trial {trial} at {setting} failed: {source}")]
    Trial {
        setting: String,
        trial: usize,
        source: Box<AppError>,
    },
}

impl AppError {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        AppError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Parse { .. } | AppError::Invalid(_) | AppError::EmptyAggregate => 2,
            AppError::Numeric(_) | AppError::PlacementFailed { .. } => 3,
            AppError::Io { .. } => 4,
            AppError::Trial { source, .. } => source.exit_code(),
        }
    }
}

impl From<rssloc_core::Error> for AppError {
    fn from(e: rssloc_core::Error) -> Self {
        match e {
            rssloc_core::Error::InvalidParameter { .. }
            | rssloc_core::Error::DimensionMismatch { .. } => AppError::Invalid(e.to_string()),
            _ => AppError::Numeric(e),
        }
    }
}
