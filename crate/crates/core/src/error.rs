use thiserror::Error;

/// Errors raised across the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("invalid frame: {0}")]
    InvalidFrame(String),

    #[error("empty frame stream")]
    EmptyStream,

    #[error("stream too short: need more than {needed} frames, got {got}")]
    StreamTooShort { needed: usize, got: usize },

    #[error("history length mismatch: expected {expected} frames, got {got}")]
    HistoryLength { expected: usize, got: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("format error at byte {offset}: {message}")]
    Format { offset: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures caused by the data rather than by the caller's input
    /// (degenerate samples, solver breakdown).
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::DegenerateData(_) | Error::NoConvergence { .. })
    }

    pub(crate) fn format(offset: u64, message: impl Into<String>) -> Self {
        Error::Format { offset, message: message.into() }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        let offset = e.position().map(|p| p.byte()).unwrap_or(0);
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::Format { offset, message: format!("{other:?}") },
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
