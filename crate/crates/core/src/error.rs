use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max |A - A^dagger| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("qudit dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),

    #[error("mixer {name} is not defined for {detail}")]
    NameNotApplicable { name: String, detail: String },

    #[error("cubic has a repeated root (min root gap {gap:.3e})")]
    DegenerateCubic { gap: f64 },

    #[error("register of {qubits} qubits exceeds the limit of {limit}")]
    MemoryLimit { qubits: usize, limit: usize },

    #[error("noisy evolution requires a density-matrix input")]
    NoisyPureState,

    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(
        "support of the first state is not contained in the second (leaked weight {leak:.3e})"
    )]
    SupportViolation { leak: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
