use std::path::Path;

use foresight_core::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: Error,
    },
}

impl CliError {
    /// 2 for usage, configuration and format problems; 3 when the data itself
    /// defeats the numerics.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core { source, .. } if source.is_numerical() => 3,
            _ => 2,
        }
    }

    pub fn at(path: &Path, source: Error) -> Self {
        CliError::Core { context: path.display().to_string(), source }
    }

    pub fn during(context: impl Into<String>, source: Error) -> Self {
        CliError::Core { context: context.into(), source }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
