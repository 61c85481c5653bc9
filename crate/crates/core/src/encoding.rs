//! Qudit to multi-qubit encodings and feasible subspaces.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, r, ComplexMatrix, ComplexVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EncodingScheme {
    Binary,
    Symmetric,
    Unary,
}

impl EncodingScheme {
    pub const ALL: [EncodingScheme; 3] = [Self::Binary, Self::Symmetric, Self::Unary];

    /// Qubits needed for a `dim_d`-level qudit.
    pub fn num_qubits(self, dim_d: usize) -> usize {
        match self {
            Self::Binary => {
                let mut k = 0;
                while (1usize << k) < dim_d {
                    k += 1;
                }
                k
            }
            Self::Symmetric => dim_d - 1,
            Self::Unary => dim_d,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Binary => "binary",
            Self::Symmetric => "symmetric",
            Self::Unary => "unary",
        }
    }
}

impl fmt::Display for EncodingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EncodingScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "binary" | "b" => Ok(Self::Binary),
            "symmetric" | "s" => Ok(Self::Symmetric),
            "unary" | "u" => Ok(Self::Unary),
            other => Err(Error::InvalidConfig(format!("unknown encoding '{other}'"))),
        }
    }
}

/// Isometry `M` (`2^K × D`) taking qudit level `d` to its encoded state.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodingMap {
    pub scheme: EncodingScheme,
    pub dim_d: usize,
    pub num_qubits: usize,
    pub isometry: ComplexMatrix,
}

pub fn build_encoding(scheme: EncodingScheme, dim_d: usize) -> Result<EncodingMap> {
    if dim_d < 2 {
        return Err(Error::DimensionTooSmall(dim_d));
    }
    let k = scheme.num_qubits(dim_d);
    let rows = 1usize << k;
    let mut m = ComplexMatrix::zeros(rows, dim_d);
    match scheme {
        EncodingScheme::Binary => {
            for d in 0..dim_d {
                m[(d, d)] = linalg::ONE;
            }
        }
        EncodingScheme::Symmetric => {
            for d in 0..dim_d {
                let members: Vec<usize> =
                    (0..rows).filter(|b| b.count_ones() as usize == d).collect();
                let amp = r(1.0 / (members.len() as f64).sqrt());
                for b in members {
                    m[(b, d)] = amp;
                }
            }
        }
        EncodingScheme::Unary => {
            for d in 0..dim_d {
                m[(1usize << d, d)] = linalg::ONE;
            }
        }
    }
    Ok(EncodingMap {
        scheme,
        dim_d,
        num_qubits: k,
        isometry: m,
    })
}

impl EncodingMap {
    pub fn qubit_dim(&self) -> usize {
        self.isometry.nrows()
    }

    /// Encoded basis state `M|d⟩`.
    pub fn column(&self, d: usize) -> Result<ComplexVector> {
        if d >= self.dim_d {
            return Err(Error::IndexOutOfRange {
                index: d,
                limit: self.dim_d,
            });
        }
        Ok(self.isometry.column(d).into_owned())
    }

    pub fn encode_vector(&self, psi: &ComplexVector) -> Result<ComplexVector> {
        if psi.len() != self.dim_d {
            return Err(Error::DimensionMismatch {
                expected: self.dim_d,
                found: psi.len(),
            });
        }
        Ok(&self.isometry * psi)
    }
}

/// `M O M†`.
pub fn map_operator(op_qudit: &ComplexMatrix, map: &EncodingMap) -> Result<ComplexMatrix> {
    if op_qudit.nrows() != map.dim_d || op_qudit.ncols() != map.dim_d {
        return Err(Error::DimensionMismatch {
            expected: map.dim_d,
            found: op_qudit.nrows(),
        });
    }
    Ok(&map.isometry * op_qudit * map.isometry.adjoint())
}

/// `P = M M†`.
pub fn feasible_projector(map: &EncodingMap) -> ComplexMatrix {
    &map.isometry * map.isometry.adjoint()
}

/// Orthonormal basis (as columns) of a subspace of a `2^K` register.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    pub basis: ComplexMatrix,
}

impl Subspace {
    pub fn new(basis: ComplexMatrix) -> Result<Self> {
        let gram = basis.adjoint() * &basis;
        let dev = linalg::max_abs(&(gram - linalg::identity(basis.ncols())));
        if dev > 1e-10 {
            return Err(Error::InvalidState(format!(
                "subspace basis not orthonormal (deviation {dev:.3e})"
            )));
        }
        Ok(Self { basis })
    }

    /// Feasible subspace of a multi-mode register; mode 0 occupies the least
    /// significant qubit block.
    pub fn from_maps(maps: &[EncodingMap]) -> Self {
        let mut basis = linalg::identity(1);
        for m in maps.iter().rev() {
            basis = basis.kronecker(&m.isometry);
        }
        Self { basis }
    }

    pub fn full_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn projector(&self) -> ComplexMatrix {
        &self.basis * self.basis.adjoint()
    }

    /// `V† A V`.
    pub fn restrict(&self, op: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_full(op.nrows())?;
        Ok(self.basis.adjoint() * op * &self.basis)
    }

    /// `V a V†`.
    pub fn lift(&self, op: &ComplexMatrix) -> Result<ComplexMatrix> {
        if op.nrows() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: op.nrows(),
            });
        }
        Ok(&self.basis * op * self.basis.adjoint())
    }

    pub fn restrict_vector(&self, v: &ComplexVector) -> Result<ComplexVector> {
        self.check_full(v.len())?;
        Ok(self.basis.adjoint() * v)
    }

    pub fn lift_vector(&self, v: &ComplexVector) -> Result<ComplexVector> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        Ok(&self.basis * v)
    }

    /// Max entry of `(I - P) A V`; zero when `A` preserves the subspace.
    pub fn leakage_of(&self, op: &ComplexMatrix) -> f64 {
        let av = op * &self.basis;
        let inside = &self.basis * self.basis.ad_mul(&av);
        linalg::max_abs(&(av - inside))
    }

    fn check_full(&self, n: usize) -> Result<()> {
        if n != self.full_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.full_dim(),
                found: n,
            });
        }
        Ok(())
    }
}

/// Place a single-mode operator on mode `site` of a register whose mode `s`
/// spans `block_qubits[s]` qubits (mode 0 least significant).
pub fn site_operator(
    op: &ComplexMatrix,
    site: usize,
    block_qubits: &[usize],
) -> Result<ComplexMatrix> {
    if site >= block_qubits.len() {
        return Err(Error::IndexOutOfRange {
            index: site,
            limit: block_qubits.len(),
        });
    }
    let width = 1usize << block_qubits[site];
    if op.nrows() != width {
        return Err(Error::DimensionMismatch {
            expected: width,
            found: op.nrows(),
        });
    }
    let low: usize = block_qubits[..site].iter().sum();
    let high: usize = block_qubits[site + 1..].iter().sum();
    Ok(linalg::embed(op, 1 << low, 1 << high))
}

/// Same placement for qudit-space operators with per-mode dimension `dims`.
pub fn qudit_site_operator(
    op: &ComplexMatrix,
    site: usize,
    dims: &[usize],
) -> Result<ComplexMatrix> {
    if site >= dims.len() {
        return Err(Error::IndexOutOfRange {
            index: site,
            limit: dims.len(),
        });
    }
    if op.nrows() != dims[site] {
        return Err(Error::DimensionMismatch {
            expected: dims[site],
            found: op.nrows(),
        });
    }
    let low: usize = dims[..site].iter().product();
    let high: usize = dims[site + 1..].iter().product();
    Ok(linalg::embed(op, low, high))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kron, max_abs, pauli_x, pauli_y, pauli_z};

    fn id2() -> ComplexMatrix {
        linalg::identity(2)
    }

    fn number_op(d: usize) -> ComplexMatrix {
        ComplexMatrix::from_diagonal(&ComplexVector::from_iterator(
            d,
            (0..d).map(|k| r(k as f64)),
        ))
    }

    #[test]
    fn qubit_counts() {
        assert_eq!(EncodingScheme::Binary.num_qubits(3), 2);
        assert_eq!(EncodingScheme::Binary.num_qubits(4), 2);
        assert_eq!(EncodingScheme::Binary.num_qubits(5), 3);
        assert_eq!(EncodingScheme::Symmetric.num_qubits(3), 2);
        assert_eq!(EncodingScheme::Unary.num_qubits(3), 3);
    }

    #[test]
    fn rejects_small_dimension() {
        assert_eq!(
            build_encoding(EncodingScheme::Unary, 1).unwrap_err(),
            Error::DimensionTooSmall(1)
        );
    }

    #[test]
    fn d3_columns() {
        let b = build_encoding(EncodingScheme::Binary, 3).unwrap();
        for d in 0..3 {
            assert_eq!(b.isometry[(d, d)], linalg::ONE);
        }
        let s = build_encoding(EncodingScheme::Symmetric, 3).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(s.isometry[(0, 0)], linalg::ONE);
        assert!((s.isometry[(1, 1)].re - h).abs() < 1e-15);
        assert!((s.isometry[(2, 1)].re - h).abs() < 1e-15);
        assert_eq!(s.isometry[(3, 2)], linalg::ONE);
        let u = build_encoding(EncodingScheme::Unary, 3).unwrap();
        assert_eq!(u.isometry[(1, 0)], linalg::ONE);
        assert_eq!(u.isometry[(2, 1)], linalg::ONE);
        assert_eq!(u.isometry[(4, 2)], linalg::ONE);
    }

    #[test]
    fn mapped_identity_and_number() {
        let b = build_encoding(EncodingScheme::Binary, 3).unwrap();
        let id = map_operator(&linalg::identity(3), &b).unwrap();
        assert!(
            max_abs(
                &(id - linalg::real_matrix(
                    4,
                    4,
                    &[1., 0., 0., 0., 0., 1., 0., 0., 0., 0., 1., 0., 0., 0., 0., 0.,]
                ))
            ) < 1e-15
        );

        // 1/4 (3 II + IZ - ZI - 3 ZZ)
        let n = map_operator(&number_op(3), &b).unwrap();
        let ii = linalg::identity(4);
        let expected = (ii.scale(3.0) + kron(&id2(), &pauli_z())
            - kron(&pauli_z(), &id2())
            - kron(&pauli_z(), &pauli_z()).scale(3.0))
        .scale(0.25);
        assert!(max_abs(&(n - expected)) < 1e-14);

        // 1/4 (3 II - 2 IZ - 2 ZI + ZZ + XX + YY)
        let s = build_encoding(EncodingScheme::Symmetric, 3).unwrap();
        let n = map_operator(&number_op(3), &s).unwrap();
        let expected = (ii.scale(3.0)
            - kron(&id2(), &pauli_z()).scale(2.0)
            - kron(&pauli_z(), &id2()).scale(2.0)
            + kron(&pauli_z(), &pauli_z())
            + kron(&pauli_x(), &pauli_x())
            + kron(&pauli_y(), &pauli_y()))
        .scale(0.25);
        assert!(max_abs(&(n - expected)) < 1e-14);
        assert!(map_operator(&linalg::identity(2), &s).is_err());
    }

    #[test]
    fn projectors() {
        let b4 = build_encoding(EncodingScheme::Binary, 4).unwrap();
        assert!(max_abs(&(feasible_projector(&b4) - linalg::identity(4))) < 1e-15);

        let s = build_encoding(EncodingScheme::Symmetric, 3).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let anti = ComplexVector::from_vec(vec![r(0.0), r(h), r(-h), r(0.0)]);
        let expected = linalg::identity(4) - &anti * anti.adjoint();
        assert!(max_abs(&(feasible_projector(&s) - expected)) < 1e-15);

        let u = build_encoding(EncodingScheme::Unary, 3).unwrap();
        let p = feasible_projector(&u);
        for i in 0..8 {
            let want = if [1, 2, 4].contains(&i) { 1.0 } else { 0.0 };
            assert_eq!(p[(i, i)].re, want);
        }
    }

    #[test]
    fn subspace_from_two_modes() {
        let b = build_encoding(EncodingScheme::Binary, 3).unwrap();
        let sub = Subspace::from_maps(&[b.clone(), b.clone()]);
        assert_eq!(sub.dim(), 9);
        assert_eq!(sub.full_dim(), 16);
        // qudit index 3*n1 + n0 -> qubit index 4*n1 + n0
        assert_eq!(sub.basis[(4 + 2, 3 + 2)], linalg::ONE);
        let n0 = site_operator(&map_operator(&number_op(3), &b).unwrap(), 0, &[2, 2]).unwrap();
        let restricted = sub.restrict(&n0).unwrap();
        let qudit = qudit_site_operator(&number_op(3), 0, &[3, 3]).unwrap();
        assert!(max_abs(&(restricted - qudit)) < 1e-15);
    }
}
