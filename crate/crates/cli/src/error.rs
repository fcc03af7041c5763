use std::io;
use std::path::PathBuf;

use squeeze_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("numeric: {0}")]
    Numeric(String),
    #[error("resource: {0}")]
    Resource(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{0} check(s) failed")]
    CheckFailed(usize),
}

impl CliError {
    /// 0 success, 1 I/O, 2 usage, 3 numeric, 4 resource.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Io { .. } => 1,
            Self::Usage(_) => 2,
            Self::Numeric(_) | Self::CheckFailed(_) => 3,
            Self::Resource(_) => 4,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let msg = e.to_string();
        match e {
            CoreError::Domain(_)
            | CoreError::InvalidSpec(_)
            | CoreError::DimensionMismatch { .. } => Self::Usage(msg),
            CoreError::Resource { .. } => Self::Resource(msg),
            _ => Self::Numeric(msg),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
