use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid qubit targets {targets:?} for a {n_qubits}-qubit register")]
    InvalidTargets {
        targets: Vec<usize>,
        n_qubits: usize,
    },

    #[error("matrix is not unitary (deviation {deviation:e})")]
    NonUnitary { deviation: f64 },

    #[error("zero-probability measurement outcome (p = {probability:e})")]
    ZeroProbabilityOutcome { probability: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("negative Pauli probability {value:e} for {pauli}")]
    NegativeProbability { pauli: String, value: f64 },

    #[error("bound channel invalid: {count} x p0 = {total:e} exceeds 1")]
    BoundChannelInvalid { count: usize, total: f64 },

    #[error("captured probability mass {captured:e} is below 1 - {budget:e}")]
    MassBudgetExceeded { captured: f64, budget: f64 },

    #[error("sampling requires a random number generator")]
    MissingRng,
}

pub type Result<T> = std::result::Result<T, Error>;
