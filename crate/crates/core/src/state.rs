use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, ComplexVector};

pub const STATE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StateKind {
    PureVector,
    DensityMatrix,
}

/// Pure vector (`2^K × 1`) or density matrix (`2^K × 2^K`) on `K` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    kind: StateKind,
    num_qubits: usize,
    data: ComplexMatrix,
}

impl QuantumState {
    pub fn pure(amplitudes: ComplexVector) -> Result<Self> {
        let num_qubits = qubit_count(amplitudes.len())?;
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("vector norm {norm}")));
        }
        let n = amplitudes.len();
        Ok(Self {
            kind: StateKind::PureVector,
            num_qubits,
            data: ComplexMatrix::from_column_slice(n, 1, amplitudes.as_slice()),
        })
    }

    /// Normalizes the input first.
    pub fn pure_normalized(amplitudes: ComplexVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Self::pure(amplitudes.unscale(norm))
    }

    pub fn density(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        let num_qubits = qubit_count(matrix.nrows())?;
        let tr = linalg::trace(&matrix);
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let eig = linalg::herm_eig(&matrix)?;
        if eig.values[0] < -STATE_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {}",
                eig.values[0]
            )));
        }
        Ok(Self {
            kind: StateKind::DensityMatrix,
            num_qubits,
            data: matrix,
        })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, limit: dim });
        }
        let mut v = ComplexVector::zeros(dim);
        v[index] = linalg::ONE;
        Self::pure(v)
    }

    pub fn maximally_mixed(num_qubits: usize) -> Self {
        let dim = 1usize << num_qubits;
        Self {
            kind: StateKind::DensityMatrix,
            num_qubits,
            data: linalg::identity(dim).unscale(dim as f64),
        }
    }

    /// Skips the eigenvalue check; for matrices produced by trace-preserving maps.
    pub(crate) fn density_unchecked(matrix: ComplexMatrix) -> Self {
        let num_qubits = matrix.nrows().trailing_zeros() as usize;
        Self {
            kind: StateKind::DensityMatrix,
            num_qubits,
            data: matrix,
        }
    }

    pub fn kind(&self) -> StateKind {
        self.kind
    }

    pub fn is_pure_vector(&self) -> bool {
        self.kind == StateKind::PureVector
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn data(&self) -> &ComplexMatrix {
        &self.data
    }

    /// Amplitudes for a pure state.
    pub fn vector(&self) -> Option<ComplexVector> {
        match self.kind {
            StateKind::PureVector => Some(self.data.column(0).into_owned()),
            StateKind::DensityMatrix => None,
        }
    }

    pub fn density_matrix(&self) -> ComplexMatrix {
        match self.kind {
            StateKind::PureVector => &self.data * self.data.adjoint(),
            StateKind::DensityMatrix => self.data.clone(),
        }
    }

    pub fn to_density(&self) -> Self {
        Self {
            kind: StateKind::DensityMatrix,
            num_qubits: self.num_qubits,
            data: self.density_matrix(),
        }
    }

    /// Reduced state on `keep` (others traced out).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let m = linalg::partial_trace_matrix(&self.density_matrix(), self.num_qubits, keep)?;
        Ok(Self::density_unchecked(m))
    }

    pub fn partial_transpose(&self, first_j: usize) -> Result<ComplexMatrix> {
        linalg::partial_transpose_matrix(&self.density_matrix(), self.num_qubits, first_j)
    }

    /// `⟨A⟩`, real part; errors on dimension mismatch.
    pub fn expectation(&self, op: &ComplexMatrix) -> Result<f64> {
        if op.nrows() != self.dim() || op.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: op.nrows(),
            });
        }
        let value = match self.kind {
            StateKind::PureVector => {
                let v = self.data.column(0);
                v.dotc(&(op * v))
            }
            StateKind::DensityMatrix => (op.component_mul(&self.data.transpose())).iter().sum(),
        };
        Ok(value.re)
    }

    /// Weight of the state outside the range of projector `p`.
    pub fn leakage(&self, projector: &ComplexMatrix) -> Result<f64> {
        let inside = self.expectation(projector)?;
        Ok((1.0 - inside).max(0.0))
    }
}

fn qubit_count(dim: usize) -> Result<usize> {
    linalg::qubits_for_dim(dim)
        .filter(|_| dim >= 1)
        .ok_or_else(|| Error::InvalidState(format!("dimension {dim} is not a power of two")))
}
