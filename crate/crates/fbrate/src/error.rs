use std::io;

use fbrate_core::Error as CoreError;

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Ok = 0,
    CheckFailed = 1,
    Usage = 2,
    Numerical = 3,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{context}: {source}")]
    Model {
        context: String,
        #[source]
        source: CoreError,
    },
    #[error("validation failed: {0}")]
    CheckFailed(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn model(context: impl Into<String>, source: CoreError) -> Self {
        CliError::Model {
            context: context.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::Usage,
            CliError::CheckFailed(_) => ExitCode::CheckFailed,
            CliError::Model { source, .. } => match source {
                CoreError::OutOfRange { .. }
                | CoreError::NonFinite { .. }
                | CoreError::UnknownPreset(_)
                | CoreError::PresetConflict { .. }
                | CoreError::InvalidArgument(_)
                | CoreError::UnresolvedShadowing => ExitCode::Usage,
                _ => ExitCode::Numerical,
            },
            CliError::Io(_) | CliError::Json(_) => ExitCode::CheckFailed,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
