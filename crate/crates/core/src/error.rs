use thiserror::Error;

/// Errors raised while validating inputs or analysing chains.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("probability {name} = {value} is outside [0, 1]")]
    ProbabilityOutOfRange { name: &'static str, value: f64 },

    #[error("transition matrix must have at least 2 states, got {0}")]
    TooFewStates(usize),

    #[error("transition matrix row {row} has {len} entries, expected {expected}")]
    RaggedMatrix { row: usize, len: usize, expected: usize },

    #[error("transition matrix row {row} sums to {sum}, expected 1")]
    RowNotStochastic { row: usize, sum: f64 },

    #[error("state index {state} is out of range for {n} states")]
    StateOutOfRange { state: usize, n: usize },

    #[error("cost matrix entry [{row}][{col}] = {value} is invalid")]
    InvalidCost { row: usize, col: usize, value: f64 },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("distribution is invalid: {0}")]
    InvalidDistribution(String),

    #[error("logarithm base must be > 1, got {0}")]
    InvalidLogBase(f64),

    #[error("Renyi order must be positive, got {0}")]
    InvalidRenyiOrder(f64),

    #[error("Renyi order 1 is the Shannon limit; use weighted_entropy with unit weights")]
    RenyiOrderOne,

    #[error("{name} must be at least 1")]
    ZeroParameter { name: &'static str },

    #[error("sample generated at slot {gen_slot} delivered at earlier slot {now}")]
    SampleFromFuture { gen_slot: u64, now: u64 },

    #[error("no unique stationary distribution")]
    NoUniqueStationary,

    #[error("empty sequence")]
    Empty,
}

pub type Result<T> = std::result::Result<T, Error>;
