use thiserror::Error;

/// Coarse classification of failures, used for process exit codes and the
/// C ABI status codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed input: unparsable files, inconsistent words, bad alphabets.
    Input,
    /// Well-formed input that violates an operation's precondition.
    Precondition,
    /// An iterative numeric method failed to reach its tolerance.
    NonConvergence,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("word length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("digit {digit} out of range for alphabet size {q}")]
    DigitOutOfRange { digit: u32, q: u32 },

    #[error("invalid code: {0}")]
    InvalidCode(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{0} is not prime")]
    NotPrime(u32),

    #[error("generator matrix rows are linearly dependent (rank {rank} < {rows})")]
    DependentRows { rank: usize, rows: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("minimum distance undefined for a code with fewer than two words")]
    DistanceUndefined,

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::LengthMismatch { .. }
            | Error::DigitOutOfRange { .. }
            | Error::InvalidCode(_)
            | Error::InvalidInput(_)
            | Error::Io(_)
            | Error::Json(_)
            | Error::Csv(_) => ErrorKind::Input,
            Error::NotPrime(_)
            | Error::DependentRows { .. }
            | Error::Precondition(_)
            | Error::DistanceUndefined => ErrorKind::Precondition,
            Error::NonConvergence { .. } => ErrorKind::NonConvergence,
        }
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
