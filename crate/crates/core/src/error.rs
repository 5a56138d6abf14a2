use thiserror::Error;

/// Errors raised by the symstrat engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid colour vector: {0}")]
    InvalidColourVector(String),

    #[error("partitions have different totals ({left} vs {right})")]
    MismatchedTotal { left: u32, right: u32 },

    #[error("manifold dimension {0} is too small (need at least 2)")]
    DimensionTooSmall(u32),

    #[error("colour index {index} out of bounds for a vector with {len} colours")]
    IndexOutOfBounds { index: usize, len: usize },

    #[error("Euler characteristic {numerator}/{denominator} is not an integer")]
    NonIntegralResult { numerator: String, denominator: String },

    #[error("total weight {total} exceeds the size limit {limit}")]
    SizeLimitExceeded { total: u32, limit: u32 },

    #[error("d∘d is nonzero in degree {degree}")]
    DSquaredNonzero { degree: usize },

    #[error("allowed pattern set is not closed under splitting parts: {0}")]
    NotOpen(String),

    #[error("not a chain map: commutation fails in source degree {degree}")]
    NotAChainMap { degree: usize },

    #[error("filtration violated in degree {degree}: differential lowers the level")]
    FiltrationViolation { degree: usize },

    #[error("integral Poincaré duality is unavailable for symmetric-product complements; use rational coefficients")]
    IntegralDualityUnavailable,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid coefficients: {0}")]
    InvalidCoefficients(String),

    #[error("value does not fit in 64 bits: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;
