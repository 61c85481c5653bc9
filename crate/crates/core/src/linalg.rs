//! Dense complex linear algebra used throughout the crate.
//!
//! Qubit ordering is little-endian: qubit 0 is the least significant bit of a
//! basis index and therefore the rightmost factor of a Kronecker product.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

/// Max-entry tolerance for accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn r(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

/// Real matrix from row-major entries.
pub fn real_matrix(rows: usize, cols: usize, entries: &[f64]) -> ComplexMatrix {
    assert_eq!(rows * cols, entries.len());
    ComplexMatrix::from_row_iterator(rows, cols, entries.iter().map(|&x| r(x)))
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Kronecker product of a list; the first factor is the most significant.
pub fn kron_all(factors: &[&ComplexMatrix]) -> ComplexMatrix {
    let mut out = identity(1);
    for f in factors {
        out = out.kronecker(*f);
    }
    out
}

/// `I_high ⊗ op ⊗ I_low`, i.e. `op` acting on a contiguous qubit block whose
/// lowest qubit sits above `low_dim` basis states.
pub fn embed(op: &ComplexMatrix, low_dim: usize, high_dim: usize) -> ComplexMatrix {
    identity(high_dim).kronecker(&op.kronecker(&identity(low_dim)))
}

pub fn max_abs(a: &ComplexMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermiticity_deviation(a: &ComplexMatrix) -> f64 {
    if !a.is_square() {
        return f64::INFINITY;
    }
    max_abs(&(a - a.adjoint()))
}

pub fn check_hermitian(a: &ComplexMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    let deviation = hermiticity_deviation(a);
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b - b * a
}

pub fn trace(a: &ComplexMatrix) -> Complex64 {
    a.diagonal().iter().sum()
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermEig {
    pub values: DVector<f64>,
    /// Eigenvectors as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

impl HermEig {
    /// `V f(Λ) V†`.
    pub fn map<F: Fn(f64) -> Complex64>(&self, f: F) -> ComplexMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for k in 0..n {
            let w = f(self.values[k]);
            let mut col = scaled.column_mut(k);
            col *= w;
        }
        scaled * self.vectors.adjoint()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(r)
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }
}

pub fn herm_eig(h: &ComplexMatrix) -> Result<HermEig> {
    check_hermitian(h)?;
    let sym = (h + h.adjoint()).scale(0.5);
    let n = sym.nrows();
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(HermEig { values, vectors })
}

/// `exp(scale * h)` for Hermitian `h`.
pub fn expm_herm(h: &ComplexMatrix, scale: Complex64) -> Result<ComplexMatrix> {
    let eig = herm_eig(h)?;
    Ok(eig.map(|x| (scale * x).exp()))
}

/// Number of qubits for a power-of-two dimension.
pub fn qubits_for_dim(dim: usize) -> Option<usize> {
    if dim.is_power_of_two() {
        Some(dim.trailing_zeros() as usize)
    } else {
        None
    }
}

/// Spread the low bits of `value` onto the positions listed in `positions`.
fn scatter_bits(value: usize, positions: &[usize]) -> usize {
    positions
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &q)| acc | (((value >> i) & 1) << q))
}

/// Trace out every qubit not in `keep`. Kept qubits retain their relative
/// order, so the smallest kept index becomes qubit 0 of the result.
pub fn partial_trace_matrix(
    rho: &ComplexMatrix,
    num_qubits: usize,
    keep: &[usize],
) -> Result<ComplexMatrix> {
    let dim = 1usize << num_qubits;
    if rho.nrows() != dim || rho.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: rho.nrows(),
        });
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if let Some(&q) = kept.iter().find(|&&q| q >= num_qubits) {
        return Err(Error::IndexOutOfRange {
            index: q,
            limit: num_qubits,
        });
    }
    let traced: Vec<usize> = (0..num_qubits).filter(|q| !kept.contains(q)).collect();
    let keep_offsets: Vec<usize> = (0..1usize << kept.len())
        .map(|a| scatter_bits(a, &kept))
        .collect();
    let trace_offsets: Vec<usize> = (0..1usize << traced.len())
        .map(|t| scatter_bits(t, &traced))
        .collect();
    let n = keep_offsets.len();
    let mut out = ComplexMatrix::zeros(n, n);
    for (a, &ka) in keep_offsets.iter().enumerate() {
        for (b, &kb) in keep_offsets.iter().enumerate() {
            out[(a, b)] = trace_offsets.iter().map(|&t| rho[(ka | t, kb | t)]).sum();
        }
    }
    Ok(out)
}

/// Transpose on the leading (most significant) `first_j` qubits, i.e. the
/// left factor of the `2^j | 2^(K-j)` split.
pub fn partial_transpose_matrix(
    rho: &ComplexMatrix,
    num_qubits: usize,
    first_j: usize,
) -> Result<ComplexMatrix> {
    let dim = 1usize << num_qubits;
    if rho.nrows() != dim || rho.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: rho.nrows(),
        });
    }
    if first_j == 0 || first_j >= num_qubits {
        return Err(Error::IndexOutOfRange {
            index: first_j,
            limit: num_qubits,
        });
    }
    let low = 1usize << (num_qubits - first_j);
    let mut out = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        let (a, b) = (i / low, i % low);
        for j in 0..dim {
            let (ap, bp) = (j / low, j % low);
            out[(i, j)] = rho[(ap * low + b, a * low + bp)];
        }
    }
    Ok(out)
}

/// Apply a gate acting on `qubits` (listed from the gate's least significant
/// qubit upward) to the row index of `m`, i.e. compute `G m` in place.
pub fn apply_gate_rows(
    m: &mut ComplexMatrix,
    num_qubits: usize,
    qubits: &[usize],
    gate: &ComplexMatrix,
) {
    let k = qubits.len();
    let gdim = 1usize << k;
    debug_assert_eq!(gate.nrows(), gdim);
    let mask = qubits.iter().fold(0usize, |acc, &q| acc | (1 << q));
    let offsets: Vec<usize> = (0..gdim).map(|a| scatter_bits(a, qubits)).collect();
    let dim = 1usize << num_qubits;
    let mut buf = vec![ZERO; gdim];
    for col in 0..m.ncols() {
        for base in (0..dim).filter(|i| i & mask == 0) {
            for (a, &off) in offsets.iter().enumerate() {
                buf[a] = m[(base | off, col)];
            }
            for (a, &off) in offsets.iter().enumerate() {
                let mut acc = ZERO;
                for (b, &v) in buf.iter().enumerate() {
                    acc += gate[(a, b)] * v;
                }
                m[(base | off, col)] = acc;
            }
        }
    }
}

/// `G ρ G†` for a gate on a subset of qubits.
pub fn conjugate_local(
    rho: &ComplexMatrix,
    num_qubits: usize,
    qubits: &[usize],
    gate: &ComplexMatrix,
) -> ComplexMatrix {
    let mut left = rho.clone();
    apply_gate_rows(&mut left, num_qubits, qubits, gate);
    let mut both = left.adjoint();
    apply_gate_rows(&mut both, num_qubits, qubits, gate);
    both.adjoint()
}
