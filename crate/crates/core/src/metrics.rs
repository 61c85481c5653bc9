//! Entanglement, distance and occupation measures.

use serde::{Deserialize, Serialize};

use crate::bosonic::site_number_operators;
use crate::encoding::EncodingMap;
use crate::error::{Error, Result};
use crate::linalg::{herm_eig, r, ComplexMatrix};
use crate::state::QuantumState;

/// Eigenvalues below this are treated as zero.
pub const EIGEN_FLOOR: f64 = 1e-12;

/// Weight outside the support of the second state tolerated by
/// `relative_entropy` before it reports a violation.
pub const SUPPORT_TOL: f64 = 1e-10;

/// Split of a register into its leading `first_j_qubits` (most significant)
/// and the remaining qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bipartition {
    pub first_j_qubits: usize,
    pub total_qubits: usize,
}

impl Bipartition {
    pub fn new(first_j_qubits: usize, total_qubits: usize) -> Result<Self> {
        if first_j_qubits == 0 || first_j_qubits >= total_qubits {
            return Err(Error::IndexOutOfRange {
                index: first_j_qubits,
                limit: total_qubits,
            });
        }
        Ok(Self {
            first_j_qubits,
            total_qubits,
        })
    }
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm(h: &ComplexMatrix) -> Result<f64> {
    Ok(herm_eig(h)?.values.iter().map(|x| x.abs()).sum())
}

/// `log2 ‖ρ^{T_A}‖₁` with the transpose on the leading qubits.
pub fn log_negativity(state: &QuantumState, cut: Bipartition) -> Result<f64> {
    if cut.total_qubits != state.num_qubits() {
        return Err(Error::DimensionMismatch {
            expected: state.num_qubits(),
            found: cut.total_qubits,
        });
    }
    let pt = state.partial_transpose(cut.first_j_qubits)?;
    let ln = trace_norm(&pt)?.log2();
    Ok(if ln.abs() <= 1e-10 { 0.0 } else { ln })
}

pub fn von_neumann_entropy(state: &QuantumState) -> Result<f64> {
    if state.is_pure_vector() {
        return Ok(0.0);
    }
    let eig = herm_eig(state.data())?;
    Ok(eig
        .values
        .iter()
        .filter(|&&p| p > EIGEN_FLOOR)
        .map(|&p| -p * p.ln())
        .sum())
}

/// `S(ρ₁‖ρ₂) = Tr ρ₁ ln ρ₁ - Tr ρ₁ ln ρ₂`, with an error when ρ₁ has weight
/// outside the support of ρ₂.
pub fn relative_entropy_checked(rho1: &QuantumState, rho2: &QuantumState) -> Result<f64> {
    if rho1.dim() != rho2.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho1.dim(),
            found: rho2.dim(),
        });
    }
    let e1 = herm_eig(&rho1.density_matrix())?;
    let e2 = herm_eig(&rho2.density_matrix())?;
    // |<v_i|w_j>|^2
    let overlaps = (e1.vectors.adjoint() * &e2.vectors).map(|z| z.norm_sqr());
    let mut self_term = 0.0;
    let mut cross = 0.0;
    let mut leak = 0.0;
    for (i, &p) in e1.values.iter().enumerate() {
        if p <= EIGEN_FLOOR {
            continue;
        }
        self_term += p * p.ln();
        for (j, &q) in e2.values.iter().enumerate() {
            let w = p * overlaps[(i, j)];
            if q <= EIGEN_FLOOR {
                leak += w;
            } else {
                cross += w * q.ln();
            }
        }
    }
    if leak > SUPPORT_TOL {
        return Err(Error::SupportViolation { leak });
    }
    Ok(self_term - cross)
}

/// Relative entropy in nats; `+∞` when the support condition fails.
pub fn relative_entropy(rho1: &QuantumState, rho2: &QuantumState) -> Result<f64> {
    match relative_entropy_checked(rho1, rho2) {
        Err(Error::SupportViolation { .. }) => Ok(f64::INFINITY),
        other => other,
    }
}

/// Matrix square root of a PSD matrix; small negative eigenvalues from
/// roundoff are clipped to zero.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = herm_eig(m)?;
    if eig.values[0] < -1e-10 {
        return Err(Error::InvalidState(format!(
            "matrix is not positive semidefinite (min eigenvalue {})",
            eig.values[0]
        )));
    }
    Ok(eig.map(|x| r(x.max(0.0).sqrt())))
}

/// Uhlmann fidelity `(Tr √(√ρ σ √ρ))²`; reduces to overlaps for pure input.
pub fn fidelity(rho: &QuantumState, sigma: &QuantumState) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    match (rho.vector(), sigma.vector()) {
        (Some(a), Some(b)) => Ok(a.dotc(&b).norm_sqr()),
        (Some(_), None) => Ok(rho.expectation(sigma.data())?.max(0.0)),
        (None, Some(_)) => Ok(sigma.expectation(rho.data())?.max(0.0)),
        (None, None) => {
            let s = psd_sqrt(rho.data())?;
            let inner = &s * sigma.data() * &s;
            let inner = (&inner + inner.adjoint()).scale(0.5);
            let eig = herm_eig(&inner)?;
            let t: f64 = eig.values.iter().map(|&x| x.max(0.0).sqrt()).sum();
            Ok(t * t)
        }
    }
}

/// `⟨n_ℓ⟩` for every mode of an encoded register.
pub fn mean_occupations(state: &QuantumState, maps: &[EncodingMap]) -> Result<Vec<f64>> {
    let qubits: usize = maps.iter().map(|m| m.num_qubits).sum();
    if qubits != state.num_qubits() {
        return Err(Error::DimensionMismatch {
            expected: state.num_qubits(),
            found: qubits,
        });
    }
    site_number_operators(maps)?
        .iter()
        .map(|n| state.expectation(n))
        .collect()
}

/// `‖ρ - σ‖₁`.
pub fn trace_distance(rho: &QuantumState, sigma: &QuantumState) -> Result<f64> {
    trace_norm(&(rho.density_matrix() - sigma.density_matrix()))
}

/// Probability weight outside `projector`.
pub fn infeasible_weight(state: &QuantumState, projector: &ComplexMatrix) -> Result<f64> {
    let inside = state.expectation(projector)?;
    Ok((1.0 - inside).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ComplexVector, ONE, ZERO};

    fn bell() -> QuantumState {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        QuantumState::pure(ComplexVector::from_vec(vec![r(s), ZERO, ZERO, r(s)])).unwrap()
    }

    fn w_state(k: usize) -> QuantumState {
        let mut v = ComplexVector::zeros(1 << k);
        for q in 0..k {
            v[1 << q] = ONE;
        }
        QuantumState::pure_normalized(v).unwrap()
    }

    #[test]
    fn bell_negativity() {
        let ln = log_negativity(&bell(), Bipartition::new(1, 2).unwrap()).unwrap();
        assert!((ln - 1.0).abs() < 1e-12);
    }

    #[test]
    fn w_state_negativity_matches_closed_form() {
        // log2(1 + 2 sqrt(j(K-j))/K)
        for k in 2..=6 {
            for j in 1..k {
                let ln = log_negativity(&w_state(k), Bipartition::new(j, k).unwrap()).unwrap();
                let jf = j as f64;
                let kf = k as f64;
                let want = (1.0 + 2.0 * (jf * (kf - jf)).sqrt() / kf).log2();
                assert!((ln - want).abs() < 1e-10, "K={k} j={j}");
            }
        }
    }

    #[test]
    fn product_state_has_no_negativity() {
        let s = QuantumState::basis(3, 5).unwrap();
        assert_eq!(
            log_negativity(&s, Bipartition::new(1, 3).unwrap()).unwrap(),
            0.0
        );
        assert!(Bipartition::new(3, 3).is_err());
    }

    #[test]
    fn entropy_values() {
        assert_eq!(von_neumann_entropy(&bell()).unwrap(), 0.0);
        assert!(von_neumann_entropy(&bell().to_density()).unwrap().abs() < 1e-10);
        let mm = QuantumState::maximally_mixed(3);
        assert!((von_neumann_entropy(&mm).unwrap() - 3.0 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn fidelity_basics() {
        let a = QuantumState::basis(1, 0).unwrap();
        let b = QuantumState::basis(1, 1).unwrap();
        assert_eq!(fidelity(&a, &b).unwrap(), 0.0);
        assert!((fidelity(&a.to_density(), &a.to_density()).unwrap() - 1.0).abs() < 1e-12);
        // pure vs mixed reduces to <psi|sigma|psi>
        let mm = QuantumState::maximally_mixed(1);
        assert!((fidelity(&a, &mm).unwrap() - 0.5).abs() < 1e-12);
        assert!((fidelity(&a.to_density(), &mm).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn relative_entropy_support() {
        let a = QuantumState::basis(1, 0).unwrap().to_density();
        let b = QuantumState::basis(1, 1).unwrap().to_density();
        assert_eq!(relative_entropy(&a, &b).unwrap(), f64::INFINITY);
        assert!(matches!(
            relative_entropy_checked(&a, &b),
            Err(Error::SupportViolation { .. })
        ));
        let mm = QuantumState::maximally_mixed(1);
        assert!((relative_entropy(&a, &mm).unwrap() - 2f64.ln()).abs() < 1e-12);
        assert!(relative_entropy(&mm, &mm).unwrap().abs() < 1e-12);
    }

    #[test]
    fn occupations_of_vacuum_and_fock() {
        let map =
            crate::encoding::build_encoding(crate::encoding::EncodingScheme::Symmetric, 3).unwrap();
        let maps = vec![map.clone(), map.clone()];
        let vac = crate::bosonic::encoded_fock_state(&maps, &[0, 0]).unwrap();
        assert_eq!(mean_occupations(&vac, &maps).unwrap(), vec![0.0, 0.0]);
        let s = crate::bosonic::encoded_fock_state(&maps, &[2, 1]).unwrap();
        let n = mean_occupations(&s, &maps).unwrap();
        assert!((n[0] - 2.0).abs() < 1e-12 && (n[1] - 1.0).abs() < 1e-12);
        assert!(mean_occupations(&s, &maps[..1]).is_err());
    }
}
