use thiserror::Error;

/// Everything that can go wrong in the set calculus and the experiments
/// built on top of it.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("incompatible space: {0}")]
    IncompatibleSpace(String),

    #[error("incompatible set representations: {0}")]
    IncompatibleRepresentation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty set: every value must be non-empty")]
    EmptySet,

    #[error("E-set intervals overlap: [{0}] and [{1}]")]
    IntervalOverlap(String, String),

    #[error("interval endpoint {endpoint} is not aligned to a grid of {bins} bins")]
    NotBinAligned { endpoint: String, bins: u64 },

    #[error("materialized point count {count} exceeds the cap of {cap}")]
    TooManyPoints { count: usize, cap: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("tag {0} is outside the exact rational model")]
    InexactTag(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
