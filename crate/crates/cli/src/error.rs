use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Data { path: PathBuf, message: String },
    #[error("{context}: {source}")]
    Model {
        context: String,
        #[source]
        source: dlsm_core::Error,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn data(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        CliError::Data { path: path.into(), message: message.into() }
    }

    pub fn model(context: impl Into<String>, source: dlsm_core::Error) -> Self {
        CliError::Model { context: context.into(), source }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// 2 usage, 3 data, 4 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data { .. } | CliError::Io { .. } => 3,
            CliError::Model { source, .. } if source.is_numerical() => 4,
            CliError::Model { .. } => 3,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
