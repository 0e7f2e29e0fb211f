use thiserror::Error;

/// Error type shared across the toolkit.
///
/// Variants map onto the CLI exit-code contract: `InvalidInput` → 2,
/// `Format` → 3, `Incompatible` → 4, IO errors → 3.
#[derive(Debug, Error)]
pub enum Error {
    /// Bad argument, parameter, or precondition violation.
    #[error("invalid-input: {0}")]
    InvalidInput(String),

    /// Malformed file contents (bad magic, truncated payload, unparsable table).
    #[error("format: {0}")]
    Format(String),

    /// Two otherwise-valid inputs that cannot be combined (dimension or
    /// frame-count mismatch between reference and result).
    #[error("incompatible-inputs: {0}")]
    Incompatible(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }

    pub fn incompatible(msg: impl Into<String>) -> Self {
        Error::Incompatible(msg.into())
    }

    /// Exit code for the CLI contract (0 = success is handled by the caller).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) => 2,
            Error::Format(_) | Error::Io(_) => 3,
            Error::Incompatible(_) => 4,
        }
    }

    /// Short machine-parsable code printed on stderr.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid-input",
            Error::Format(_) | Error::Io(_) => "format",
            Error::Incompatible(_) => "incompatible-inputs",
        }
    }
}
