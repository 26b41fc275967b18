//! Process error type carrying the exit-code contract:
//! 0 success, 2 user/input error, 3 I/O error, 4 internal invariant violation.

use std::fmt;

/// A failure with a defined process exit code.
#[derive(Debug)]
pub enum AppError {
    /// Bad arguments or bad input data (exit 2).
    Usage(String),
    /// Filesystem or serialization trouble (exit 3).
    Io(String),
    /// A violated internal invariant (exit 4).
    Internal(String),
}

impl AppError {
    /// The process exit code for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Usage(_) => 2,
            AppError::Io(_) => 3,
            AppError::Internal(_) => 4,
        }
    }

    /// Wraps an I/O-layer error with path context.
    pub fn io(context: &str, err: impl fmt::Display) -> Self {
        AppError::Io(format!("{context}: {err}"))
    }
}

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AppError::Usage(msg) => write!(f, "error: {msg}"),
            AppError::Io(msg) => write!(f, "i/o error: {msg}"),
            AppError::Internal(msg) => write!(f, "internal error: {msg}"),
        }
    }
}

impl std::error::Error for AppError {}
