use thiserror::Error;

/// Errors produced by the estimation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("sequence length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("symbol {symbol} out of range for alphabet of size {alphabet_size}")]
    SymbolOutOfRange { symbol: u32, alphabet_size: usize },

    #[error("alphabet must have at least 2 symbols (got {0})")]
    AlphabetTooSmall(usize),

    #[error("sample must contain at least 2 points (got {0})")]
    SampleTooSmall(usize),

    #[error("neighbor order {k} exceeds the {available} available neighbors")]
    InsufficientNeighbors { k: usize, available: usize },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("transition matrix is not irreducible; no unique stationary distribution")]
    ReducibleChain,

    #[error("stationary solve failed: residual {residual} exceeds tolerance")]
    StationarySolveFailed { residual: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
