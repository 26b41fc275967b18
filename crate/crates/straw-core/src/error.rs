//! Error type shared by all fallible operations in the crate.

use core::fmt;

/// Result alias using [`CoreError`].
pub type Result<T> = core::result::Result<T, CoreError>;

/// Validation and alignment failures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoreError {
    /// An input collection was empty where at least one element is required.
    Empty,
    /// Two aligned per-site inputs have different lengths.
    LengthMismatch { expected: usize, found: usize },
    /// Two sites (or a site and a lattice) live in different dimensions.
    DimensionMismatch { left: usize, right: usize },
    /// A lattice dimension outside the supported range 1..=3.
    InvalidDimension { dim: usize },
    /// A lattice extent of zero, or a site count overflowing `usize`.
    InvalidExtent,
    /// A site or linear index outside the lattice.
    OutOfBounds,
    /// A value outside `[0, 1]` (or NaN) where a probability is required.
    NotProbability { value: f64 },
    /// A scalar parameter outside its documented domain.
    InvalidParameter { name: &'static str },
}

impl fmt::Display for CoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoreError::Empty => write!(f, "input must not be empty"),
            CoreError::LengthMismatch { expected, found } => {
                write!(f, "length mismatch: expected {expected}, found {found}")
            }
            CoreError::DimensionMismatch { left, right } => {
                write!(f, "dimension mismatch: {left} vs {right}")
            }
            CoreError::InvalidDimension { dim } => {
                write!(f, "unsupported dimension {dim} (must be 1, 2, or 3)")
            }
            CoreError::InvalidExtent => write!(f, "lattice extents must be positive and fit in memory"),
            CoreError::OutOfBounds => write!(f, "site or index outside the lattice"),
            CoreError::NotProbability { value } => {
                write!(f, "value {value} is not a probability in [0, 1]")
            }
            CoreError::InvalidParameter { name } => {
                write!(f, "parameter `{name}` outside its valid domain")
            }
        }
    }
}

impl core::error::Error for CoreError {}
