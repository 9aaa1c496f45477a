use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the measurement chain.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular Y factor (Y = 1): hot and cold powers are indistinguishable")]
    SingularY,

    #[error("insufficient data: need {needed} samples, have {available}")]
    InsufficientData { needed: usize, available: usize },

    #[error("degenerate reference: {0}")]
    DegenerateReference(String),

    #[error("degenerate band: {0}")]
    DegenerateBand(String),

    #[error("unsupported capture format: {0}")]
    UnsupportedFormat(String),

    #[error("corrupt capture file: {0}")]
    CorruptFile(String),

    #[error("configuration error: {}", .0.join("; "))]
    Config(Vec<String>),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the command-line front end.
    ///
    /// 2 for configuration problems, 3 for file and format problems,
    /// 4 for numeric or degenerate-measurement problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidParameter { .. } => 2,
            Error::Io { .. } | Error::UnsupportedFormat(_) | Error::CorruptFile(_) => 3,
            Error::Shape(_)
            | Error::Domain(_)
            | Error::SingularY
            | Error::InsufficientData { .. }
            | Error::DegenerateReference(_)
            | Error::DegenerateBand(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
