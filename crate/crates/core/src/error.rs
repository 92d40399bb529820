use thiserror::Error;

/// Errors raised by spectrum construction and the concentration computations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("spectrum has no strictly positive entry")]
    EmptySpectrum,

    #[error("spectrum sums to {sum}, expected 1 (pass renormalize to rescale)")]
    NotNormalized { sum: f64 },

    #[error("negative entry {value} at index {index}")]
    NegativeEntry { index: usize, value: f64 },

    #[error("non-finite entry at index {index}")]
    NonFiniteEntry { index: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("size {size} outside the admissible range [{min}, {max}]")]
    SizeOutOfRange { size: u64, min: u64, max: u64 },

    #[error("type enumeration would produce {count:.3e} items, above the limit {limit}")]
    TooManyTypes { count: f64, limit: u64 },

    #[error("rate {rate} outside the open interval ({lo}, {hi})")]
    RateOutOfRange { rate: f64, lo: f64, hi: f64 },

    #[error("exponent must be strictly positive, got {0}")]
    NonPositiveExponent(f64),

    #[error("dimension {dim} too large for the simplex oracle (max {max})")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("grid of {steps} steps is below the minimum {min}")]
    GridTooCoarse { steps: usize, min: usize },

    #[error("could not bracket the tilt solving F(s) = {target} below s = {cap}")]
    BracketExceeded { target: f64, cap: f64 },

    #[error("spectrum is uniform; the requested quantity is undefined")]
    DegenerateSpectrum,

    #[error("eps = {0} must satisfy 0 <= eps < 1/6")]
    EpsTooLarge(f64),

    #[error("target size {size} yields an empty output size")]
    SizeTooSmall { size: u64 },

    #[error("output size {small} exceeds target size {large}")]
    SizeOrder { small: u64, large: u64 },

    #[error("{name} = {value} is not a probability in the required range")]
    InvalidProbability { name: &'static str, value: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable tag for error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptySpectrum => "EmptySpectrum",
            Error::NotNormalized { .. } => "NotNormalized",
            Error::NegativeEntry { .. } => "NegativeEntry",
            Error::NonFiniteEntry { .. } => "NonFiniteEntry",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::SizeOutOfRange { .. } => "SizeOutOfRange",
            Error::TooManyTypes { .. } => "TooManyTypes",
            Error::RateOutOfRange { .. } => "RateOutOfRange",
            Error::NonPositiveExponent(_) => "NonPositiveExponent",
            Error::DimensionTooLarge { .. } => "DimensionTooLarge",
            Error::GridTooCoarse { .. } => "GridTooCoarse",
            Error::BracketExceeded { .. } => "BracketExceeded",
            Error::DegenerateSpectrum => "DegenerateSpectrum",
            Error::EpsTooLarge(_) => "EpsTooLarge",
            Error::SizeTooSmall { .. } => "SizeTooSmall",
            Error::SizeOrder { .. } => "SizeOrder",
            Error::InvalidProbability { .. } => "InvalidProbability",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::Io(_) => "Io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
