//! Gibbs states, thermofield doubles and mixer ground states.

use crate::encoding::Subspace;
use crate::error::{Error, Result};
use crate::linalg::{self, herm_eig, r, ComplexMatrix, ComplexVector};
use crate::mixers::{named_mixer, MixerName};
use crate::state::QuantumState;

/// Eigenvalues closer than this are treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// `e^{-βH}/Z`, optionally restricted to a subspace (the state is then
/// supported on that subspace only).
#[derive(Debug, Clone)]
pub struct GibbsSpec {
    pub hamiltonian: ComplexMatrix,
    pub beta: f64,
    pub subspace: Option<Subspace>,
}

impl GibbsSpec {
    pub fn new(hamiltonian: ComplexMatrix, beta: f64) -> Self {
        Self {
            hamiltonian,
            beta,
            subspace: None,
        }
    }

    pub fn restricted(hamiltonian: ComplexMatrix, beta: f64, subspace: Subspace) -> Self {
        Self {
            hamiltonian,
            beta,
            subspace: Some(subspace),
        }
    }
}

/// `e^{-βH}/Tr e^{-βH}` for any Hermitian matrix. The ground energy is
/// subtracted first so the largest Boltzmann weight is exactly one.
pub fn gibbs_matrix(h: &ComplexMatrix, beta: f64) -> Result<ComplexMatrix> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "beta must be finite and >= 0, got {beta}"
        )));
    }
    let eig = herm_eig(h)?;
    let shift = eig.values[0];
    let z: f64 = eig
        .values
        .iter()
        .map(|&e| (-beta * (e - shift)).exp())
        .sum();
    Ok(eig.map(|e| r((-beta * (e - shift)).exp() / z)))
}

pub fn gibbs_state(spec: &GibbsSpec) -> Result<QuantumState> {
    let rho = match &spec.subspace {
        None => gibbs_matrix(&spec.hamiltonian, spec.beta)?,
        Some(sub) => sub.lift(&gibbs_matrix(&sub.restrict(&spec.hamiltonian)?, spec.beta)?)?,
    };
    linalg::check_hermitian(&rho)?;
    if linalg::qubits_for_dim(rho.nrows()).is_none() {
        return Err(Error::InvalidState(format!(
            "dimension {} is not a qubit register",
            rho.nrows()
        )));
    }
    Ok(QuantumState::density_unchecked(rho))
}

/// Purification `Σ_j √Λ_j |j⟩_P |j⟩_A` over the eigenbasis of `h`. The
/// problem register occupies the low `K` qubits, the ancilla the high `K`.
pub fn thermofield_double(h_mixer: &ComplexMatrix, beta: f64) -> Result<QuantumState> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "beta must be finite and >= 0, got {beta}"
        )));
    }
    let eig = herm_eig(h_mixer)?;
    let dim = eig.dim();
    if linalg::qubits_for_dim(dim).is_none() {
        return Err(Error::InvalidState(format!(
            "dimension {dim} is not a qubit register"
        )));
    }
    let shift = eig.values[0];
    let weights: Vec<f64> = eig
        .values
        .iter()
        .map(|&e| (-beta * (e - shift)).exp())
        .collect();
    let z: f64 = weights.iter().sum();
    let mut phi = ComplexVector::zeros(dim * dim);
    for (j, w) in weights.iter().enumerate() {
        let v = eig.vectors.column(j);
        let amp = (w / z).sqrt();
        for a in 0..dim {
            let va = v[a] * amp;
            if va.norm() == 0.0 {
                continue;
            }
            for p in 0..dim {
                phi[a * dim + p] += va * v[p];
            }
        }
    }
    QuantumState::pure_normalized(phi)
}

/// `I⊗h + h⊗I` with `h = ½(IX + ZX)` on each of two two-qubit modes.
pub fn appendix_a_mixer() -> ComplexMatrix {
    let h1 = named_mixer(MixerName::BinaryH1, 3)
        .expect("D=3 mixer")
        .matrix;
    linalg::embed(&h1, 1, 4) + linalg::embed(&h1, 4, 1)
}

/// Full-register Gibbs state of the two-mode binary mixer.
pub fn mixer_gibbs_appendix_a(beta: f64) -> Result<QuantumState> {
    gibbs_state(&GibbsSpec::new(appendix_a_mixer(), beta))
}

#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    /// Pure ground vector, or the uniform mixture over a degenerate ground space.
    pub state: QuantumState,
    pub degeneracy: usize,
}

impl GroundState {
    pub fn is_degenerate(&self) -> bool {
        self.degeneracy > 1
    }
}

pub fn mixer_ground_state(h_mixer: &ComplexMatrix) -> Result<GroundState> {
    let eig = herm_eig(h_mixer)?;
    let e0 = eig.values[0];
    let g = eig
        .values
        .iter()
        .take_while(|&&e| e - e0 < DEGENERACY_TOL)
        .count();
    let state = if g == 1 {
        QuantumState::pure_normalized(eig.vectors.column(0).into_owned())?
    } else {
        let v = eig.vectors.columns(0, g);
        QuantumState::density_unchecked((&v * v.adjoint()).unscale(g as f64))
    };
    Ok(GroundState {
        energy: e0,
        state,
        degeneracy: g,
    })
}

/// True when the state equals the product of its single-qubit marginals.
pub fn is_uncorrelated(state: &QuantumState) -> Result<bool> {
    let k = state.num_qubits();
    let rho = state.density_matrix();
    let mut product = linalg::identity(1);
    for q in (0..k).rev() {
        let marginal = linalg::partial_trace_matrix(&rho, k, &[q])?;
        product = product.kronecker(&marginal);
    }
    Ok(linalg::max_abs(&(product - rho)) < 1e-9)
}
