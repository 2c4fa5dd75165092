//! Error type shared by all modules of the crate.

use std::io;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A matrix entry is NaN or infinite where a finite value is required.
    #[error("non-finite matrix entry")]
    NonFinite,

    /// A pivot or singular value fell below the rank tolerance.
    #[error("rank deficient at index {index}")]
    RankDeficient { index: usize },

    /// Givens rotation requested for the pair (0, 0).
    #[error("givens rotation undefined for (0, 0)")]
    DegenerateInput,

    /// Row or column index outside the matrix.
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    /// Extended gcd of (0, 0) is undefined.
    #[error("extended gcd undefined for (0, 0)")]
    BothZero,

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("zero diagonal entry at index {index}")]
    ZeroDiagonal { index: usize },

    /// The swap count exceeded the safety cap of the reduction loop.
    #[error("reduction did not converge within {cap} swaps")]
    NonConvergence { cap: u64 },

    /// The initial enumeration radius is not a positive number.
    #[error("initial enumeration radius is not positive")]
    RadiusUnderflow,

    #[error("dimension {n} exceeds supported limit {max}")]
    DimensionTooLarge { n: usize, max: usize },

    /// The enumeration node cap was reached before the search finished.
    #[error("search aborted after {nodes} nodes")]
    SearchAborted { nodes: u64 },

    /// A cooperative deadline expired inside a long-running call.
    #[error("deadline exceeded")]
    TimedOut,

    /// Basis expansion requires a vector whose entries have gcd 1.
    #[error("vector entries must have gcd 1")]
    NonPrimitiveVector,

    #[error("vector must be nonzero")]
    ZeroVector,

    #[error("delta {delta} outside (1/4, 1]")]
    InvalidDelta { delta: f64 },

    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
