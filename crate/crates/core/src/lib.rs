//! Feasible-subspace QAOA for truncated bosonic modes encoded on qubits.

pub mod bosonic;
pub mod encoding;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod mixers;
pub mod optim;
pub mod pauli;
pub mod qaoa;
pub mod state;
pub mod thermal;

pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
pub use state::{QuantumState, StateKind};
