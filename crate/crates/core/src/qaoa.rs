//! Alternating cost/mixer ansatz, its noisy gate-level variant and the
//! seeded multi-start optimizer.

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::encoding::Subspace;
use crate::error::{Error, Result};
use crate::linalg::{self, c, herm_eig, ComplexMatrix, ComplexVector};
use crate::optim::{nelder_mead, trust_region, Method, NelderMeadOptions, TrustRegionOptions};
use crate::pauli::{self, pauli_decompose, Gate, Pauli, PauliSum};
use crate::state::QuantumState;

/// Largest tolerated `(I-P) H P` entry for an operator declared to preserve
/// the working subspace.
pub const SUBSPACE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaConfig {
    pub layers_p: usize,
    pub gammas: Vec<f64>,
    pub nus: Vec<f64>,
    pub seed: u64,
    pub restarts: usize,
    pub max_evals: usize,
    pub tol: f64,
    #[serde(default)]
    pub method: Method,
}

impl QaoaConfig {
    /// `p` layers with all angles zero and the default optimizer budget.
    pub fn new(layers_p: usize) -> Self {
        Self {
            layers_p,
            gammas: vec![0.0; layers_p],
            nus: vec![0.0; layers_p],
            seed: 0,
            restarts: 16,
            max_evals: 5000,
            tol: 1e-6,
            method: Method::default(),
        }
    }

    pub fn with_angles(gammas: Vec<f64>, nus: Vec<f64>) -> Result<Self> {
        let mut cfg = Self::new(gammas.len());
        cfg.gammas = gammas;
        cfg.nus = nus;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.gammas.len() != self.layers_p || self.nus.len() != self.layers_p {
            return Err(Error::InvalidConfig(format!(
                "expected {} gammas and nus, got {} and {}",
                self.layers_p,
                self.gammas.len(),
                self.nus.len()
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "tol must be > 0, got {}",
                self.tol
            )));
        }
        Ok(())
    }

    /// `(γ_1..γ_p, ν_1..ν_p)`.
    pub fn theta(&self) -> Vec<f64> {
        self.gammas.iter().chain(&self.nus).copied().collect()
    }

    pub fn set_theta(&mut self, theta: &[f64]) -> Result<()> {
        if theta.len() != 2 * self.layers_p {
            return Err(Error::DimensionMismatch {
                expected: 2 * self.layers_p,
                found: theta.len(),
            });
        }
        let (g, n) = theta.split_at(self.layers_p);
        self.gammas = g.to_vec();
        self.nus = n.to_vec();
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    None,
    DepolarizedCnot,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    pub epsilon: f64,
}

impl NoiseModel {
    pub const NONE: NoiseModel = NoiseModel {
        kind: NoiseKind::None,
        epsilon: 0.0,
    };

    pub fn depolarized_cnot(epsilon: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&epsilon) {
            return Err(Error::InvalidConfig(format!(
                "depolarizing probability must lie in [0, 1), got {epsilon}"
            )));
        }
        Ok(Self {
            kind: NoiseKind::DepolarizedCnot,
            epsilon,
        })
    }

    pub fn is_noisy(&self) -> bool {
        self.kind == NoiseKind::DepolarizedCnot
    }
}

/// `(1-ε)ρ + ε/15 Σ_{P≠II} PρP` over the two-qubit Paulis on `(i, j)`.
pub fn apply_depolarizing_two_qubit(
    rho: &QuantumState,
    qubits: (usize, usize),
    epsilon: f64,
) -> Result<QuantumState> {
    if rho.is_pure_vector() {
        return Err(Error::NoisyPureState);
    }
    let k = rho.num_qubits();
    let (i, j) = qubits;
    for q in [i, j] {
        if q >= k {
            return Err(Error::IndexOutOfRange { index: q, limit: k });
        }
    }
    if i == j {
        return Err(Error::IndexOutOfRange { index: j, limit: k });
    }
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::InvalidConfig(format!(
            "depolarizing probability must lie in [0, 1], got {epsilon}"
        )));
    }
    Ok(QuantumState::density_unchecked(depolarize(
        rho.data(),
        k,
        i,
        j,
        epsilon,
    )))
}

fn depolarize(rho: &ComplexMatrix, k: usize, i: usize, j: usize, epsilon: f64) -> ComplexMatrix {
    if epsilon == 0.0 {
        return rho.clone();
    }
    let mut out = rho.scale(1.0 - epsilon);
    let w = epsilon / 15.0;
    for a in Pauli::ALL {
        for b in Pauli::ALL {
            if a == Pauli::I && b == Pauli::I {
                continue;
            }
            // gate-local bit 0 is qubit i
            let p = linalg::kron(&b.matrix(), &a.matrix());
            out += linalg::conjugate_local(rho, k, &[i, j], &p).scale(w);
        }
    }
    out
}

/// Precomputed spectral data for the noiseless ansatz, optionally confined
/// to a subspace that both Hamiltonians preserve.
#[derive(Debug, Clone)]
pub struct Ansatz {
    cost_values: Vec<f64>,
    cost_vectors: ComplexMatrix,
    mixer_values: Vec<f64>,
    /// `V_C† V_M`: mixer eigenvectors written in the cost eigenbasis.
    transfer: ComplexMatrix,
    subspace: Option<Subspace>,
}

impl Ansatz {
    pub fn new(
        h_cost: &ComplexMatrix,
        h_mixer: &ComplexMatrix,
        subspace: Option<Subspace>,
    ) -> Result<Self> {
        if h_cost.shape() != h_mixer.shape() {
            return Err(Error::DimensionMismatch {
                expected: h_cost.nrows(),
                found: h_mixer.nrows(),
            });
        }
        linalg::check_hermitian(h_cost)?;
        linalg::check_hermitian(h_mixer)?;
        let (hc, hm) = match &subspace {
            None => (h_cost.clone(), h_mixer.clone()),
            Some(sub) => {
                for (name, h) in [("cost", h_cost), ("mixer", h_mixer)] {
                    let leak = sub.leakage_of(h);
                    if leak > SUBSPACE_TOL {
                        return Err(Error::InvalidConfig(format!(
                            "{name} Hamiltonian leaks out of the working subspace ({leak:.3e})"
                        )));
                    }
                }
                (sub.restrict(h_cost)?, sub.restrict(h_mixer)?)
            }
        };
        let ec = herm_eig(&hc)?;
        let em = herm_eig(&hm)?;
        let transfer = ec.vectors.adjoint() * &em.vectors;
        Ok(Self {
            cost_values: ec.values.iter().copied().collect(),
            cost_vectors: ec.vectors,
            mixer_values: em.values.iter().copied().collect(),
            transfer,
            subspace,
        })
    }

    /// Dimension of the space the ansatz works in.
    pub fn dim(&self) -> usize {
        self.cost_values.len()
    }

    pub fn full_dim(&self) -> usize {
        self.subspace
            .as_ref()
            .map_or(self.dim(), Subspace::full_dim)
    }

    pub fn subspace(&self) -> Option<&Subspace> {
        self.subspace.as_ref()
    }

    pub fn cost_spectrum(&self) -> &[f64] {
        &self.cost_values
    }

    fn mixer_unitary(&self, nu: f64) -> ComplexMatrix {
        let mut scaled = self.transfer.clone();
        for (k, &e) in self.mixer_values.iter().enumerate() {
            let ph = c(0.0, -nu * e).exp();
            for v in scaled.column_mut(k).iter_mut() {
                *v *= ph;
            }
        }
        scaled * self.transfer.adjoint()
    }

    fn check_theta(&self, theta: &[f64]) -> Result<usize> {
        if !theta.len().is_multiple_of(2) {
            return Err(Error::InvalidConfig(format!(
                "theta must hold 2p angles, got {}",
                theta.len()
            )));
        }
        Ok(theta.len() / 2)
    }

    /// Full-register vector to cost-eigenbasis coordinates.
    fn to_cost_basis_vector(&self, v: &ComplexVector) -> Result<ComplexVector> {
        let local = match &self.subspace {
            None => v.clone(),
            Some(sub) => sub.restrict_vector(v)?,
        };
        Ok(self.cost_vectors.adjoint() * local)
    }

    fn to_cost_basis_matrix(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        let local = match &self.subspace {
            None => rho.clone(),
            Some(sub) => sub.restrict(rho)?,
        };
        Ok(self.cost_vectors.adjoint() * local * &self.cost_vectors)
    }

    fn from_cost_basis_vector(&self, v: &ComplexVector) -> Result<ComplexVector> {
        let local = &self.cost_vectors * v;
        match &self.subspace {
            None => Ok(local),
            Some(sub) => sub.lift_vector(&local),
        }
    }

    fn from_cost_basis_matrix(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        let local = &self.cost_vectors * rho * self.cost_vectors.adjoint();
        match &self.subspace {
            None => Ok(local),
            Some(sub) => sub.lift(&local),
        }
    }

    fn evolve_vector(&self, theta: &[f64], mut v: ComplexVector) -> ComplexVector {
        let p = theta.len() / 2;
        for l in 0..p {
            let gamma = theta[l];
            for (a, &e) in v.iter_mut().zip(&self.cost_values) {
                *a *= c(0.0, -gamma * e).exp();
            }
            // T diag(e^{-iνμ}) T† v
            let mut w = self.transfer.ad_mul(&v);
            for (a, &e) in w.iter_mut().zip(&self.mixer_values) {
                *a *= c(0.0, -theta[p + l] * e).exp();
            }
            v = &self.transfer * w;
        }
        v
    }

    fn evolve_matrix(&self, theta: &[f64], mut rho: ComplexMatrix) -> ComplexMatrix {
        let p = theta.len() / 2;
        let n = self.dim();
        for l in 0..p {
            let gamma = theta[l];
            let phases: Vec<_> = self
                .cost_values
                .iter()
                .map(|&e| c(0.0, -gamma * e).exp())
                .collect();
            for j in 0..n {
                for k in 0..n {
                    rho[(j, k)] *= phases[j] * phases[k].conj();
                }
            }
            let u = self.mixer_unitary(theta[p + l]);
            rho = &u * rho * u.adjoint();
        }
        rho
    }

    fn energy_of_vector(&self, v: &ComplexVector) -> f64 {
        v.iter()
            .zip(&self.cost_values)
            .map(|(a, e)| a.norm_sqr() * e)
            .sum()
    }

    fn energy_of_matrix(&self, rho: &ComplexMatrix) -> f64 {
        self.cost_values
            .iter()
            .enumerate()
            .map(|(k, e)| rho[(k, k)].re * e)
            .sum()
    }
}

#[derive(Debug, Clone)]
enum Prepared {
    Vector(ComplexVector),
    Matrix(ComplexMatrix),
}

/// Initial state, Hamiltonians and cached spectral data for repeated
/// evaluation of the ansatz.
#[derive(Debug)]
pub struct QaoaProblem {
    ansatz: Ansatz,
    initial: QuantumState,
    prepared: Prepared,
    h_cost: ComplexMatrix,
    h_mixer: ComplexMatrix,
    cost_full: OnceLock<linalg::HermEig>,
    mixer_pauli: OnceLock<PauliSum>,
}

impl QaoaProblem {
    pub fn new(
        initial: QuantumState,
        h_cost: ComplexMatrix,
        h_mixer: ComplexMatrix,
        subspace: Option<Subspace>,
    ) -> Result<Self> {
        if h_cost.nrows() != initial.dim() {
            return Err(Error::DimensionMismatch {
                expected: initial.dim(),
                found: h_cost.nrows(),
            });
        }
        if let Some(sub) = &subspace {
            let leak = initial.leakage(&sub.projector())?;
            if leak > 1e-10 {
                return Err(Error::InvalidState(format!(
                    "initial state has weight {leak:.3e} outside the working subspace"
                )));
            }
        }
        let ansatz = Ansatz::new(&h_cost, &h_mixer, subspace)?;
        let prepared = match initial.vector() {
            Some(v) => Prepared::Vector(ansatz.to_cost_basis_vector(&v)?),
            None => Prepared::Matrix(ansatz.to_cost_basis_matrix(initial.data())?),
        };
        Ok(Self {
            ansatz,
            initial,
            prepared,
            h_cost,
            h_mixer,
            cost_full: OnceLock::new(),
            mixer_pauli: OnceLock::new(),
        })
    }

    pub fn ansatz(&self) -> &Ansatz {
        &self.ansatz
    }

    pub fn initial(&self) -> &QuantumState {
        &self.initial
    }

    pub fn h_cost(&self) -> &ComplexMatrix {
        &self.h_cost
    }

    /// Pauli form of the mixer used by the gate-level noisy path.
    pub fn mixer_pauli(&self) -> Result<&PauliSum> {
        if let Some(p) = self.mixer_pauli.get() {
            return Ok(p);
        }
        let p = pauli_decompose(&self.h_mixer)?;
        Ok(self.mixer_pauli.get_or_init(|| p))
    }

    fn cost_eig(&self) -> Result<&linalg::HermEig> {
        if let Some(e) = self.cost_full.get() {
            return Ok(e);
        }
        let e = herm_eig(&self.h_cost)?;
        Ok(self.cost_full.get_or_init(|| e))
    }

    fn check_noise(&self, noise: &NoiseModel) -> Result<()> {
        if noise.is_noisy() && self.initial.is_pure_vector() {
            return Err(Error::NoisyPureState);
        }
        Ok(())
    }

    /// Final state on the full register.
    pub fn state(&self, theta: &[f64], noise: &NoiseModel) -> Result<QuantumState> {
        self.ansatz.check_theta(theta)?;
        self.check_noise(noise)?;
        if noise.is_noisy() {
            return Ok(QuantumState::density_unchecked(
                self.noisy_density(theta, noise.epsilon)?,
            ));
        }
        match &self.prepared {
            Prepared::Vector(v) => {
                let out = self.ansatz.evolve_vector(theta, v.clone());
                QuantumState::pure_normalized(self.ansatz.from_cost_basis_vector(&out)?)
            }
            Prepared::Matrix(m) => {
                let out = self.ansatz.evolve_matrix(theta, m.clone());
                let full = self.ansatz.from_cost_basis_matrix(&out)?;
                let full = (&full + full.adjoint()).scale(0.5);
                Ok(QuantumState::density_unchecked(full))
            }
        }
    }

    /// `⟨H_C⟩` of the final state.
    pub fn energy(&self, theta: &[f64], noise: &NoiseModel) -> Result<f64> {
        self.ansatz.check_theta(theta)?;
        self.check_noise(noise)?;
        if noise.is_noisy() {
            let rho = self.noisy_density(theta, noise.epsilon)?;
            return Ok(linalg::trace(&(&self.h_cost * rho)).re);
        }
        Ok(match &self.prepared {
            Prepared::Vector(v) => self
                .ansatz
                .energy_of_vector(&self.ansatz.evolve_vector(theta, v.clone())),
            Prepared::Matrix(m) => self
                .ansatz
                .energy_of_matrix(&self.ansatz.evolve_matrix(theta, m.clone())),
        })
    }

    fn noisy_density(&self, theta: &[f64], epsilon: f64) -> Result<ComplexMatrix> {
        let p = theta.len() / 2;
        let k = self.initial.num_qubits();
        let eig = self.cost_eig()?;
        let mixer = self.mixer_pauli()?;
        let mut rho = self.initial.density_matrix();
        for l in 0..p {
            let gamma = theta[l];
            let uc = eig.map(|e| c(0.0, -gamma * e).exp());
            rho = &uc * rho * uc.adjoint();
            for gate in pauli::compile_trotter_step(mixer, theta[p + l]) {
                let (qubits, m) = gate.local();
                rho = linalg::conjugate_local(&rho, k, &qubits, &m);
                if let Gate::Cnot { control, target } = gate {
                    rho = depolarize(&rho, k, control, target, epsilon);
                }
            }
        }
        Ok((&rho + rho.adjoint()).scale(0.5))
    }

    /// Seeded multi-start minimization of `⟨H_C⟩` over all `2p` angles.
    pub fn optimize(&self, config: &QaoaConfig, noise: &NoiseModel) -> Result<OptimizeResult> {
        config.validate()?;
        if config.layers_p == 0 {
            return Err(Error::InvalidConfig("optimization needs p >= 1".into()));
        }
        if config.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be >= 1".into()));
        }
        self.check_noise(noise)?;
        if noise.is_noisy() {
            self.cost_eig()?;
            self.mixer_pauli()?;
        }
        let n = 2 * config.layers_p;
        let nm = NelderMeadOptions {
            max_evals: config.max_evals,
            f_tol: config.tol,
            x_tol: config.tol,
            max_rebuilds: 1,
        };
        let tr = TrustRegionOptions {
            max_evals: config.max_evals,
            rho_end: config.tol,
            ..Default::default()
        };
        let runs: Vec<(RestartSummary, Vec<TraceRow>)> = (0..config.restarts)
            .into_par_iter()
            .map(|restart| {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                rng.set_stream(restart as u64);
                let start: Vec<f64> = (0..n)
                    .map(|_| rng.gen_range(0.0..std::f64::consts::PI))
                    .collect();
                let mut trace = Vec::new();
                let objective = |x: &[f64]| {
                    let e = self.energy(x, noise).unwrap_or(f64::INFINITY);
                    trace.push(TraceRow {
                        restart,
                        eval_index: trace.len(),
                        theta: x.to_vec(),
                        energy: e,
                    });
                    e
                };
                let result = match config.method {
                    Method::TrustRegion => trust_region(objective, &start, &tr),
                    Method::NelderMead => nelder_mead(objective, &start, &nm),
                };
                let summary = RestartSummary {
                    restart,
                    start,
                    theta: result.x,
                    energy: result.f,
                    evals: result.evals,
                    converged: result.converged,
                };
                (summary, trace)
            })
            .collect();

        let mut best = 0;
        for (i, (s, _)) in runs.iter().enumerate() {
            if s.energy < runs[best].0.energy {
                best = i;
            }
        }
        let best_summary = runs[best].0.clone();
        let mut restarts = Vec::with_capacity(runs.len());
        let mut trace = Vec::new();
        for (s, t) in runs {
            restarts.push(s);
            trace.extend(t);
        }
        Ok(OptimizeResult {
            best_theta: best_summary.theta.clone(),
            best_energy: best_summary.energy,
            best_restart: best_summary.restart,
            budget_exhausted: !best_summary.converged,
            restarts,
            trace,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub restart: usize,
    pub eval_index: usize,
    pub theta: Vec<f64>,
    pub energy: f64,
}

impl TraceRow {
    /// CSV header for `num_params` angles.
    pub fn header(num_params: usize) -> Vec<String> {
        let mut h = vec!["restart".to_string(), "eval_index".to_string()];
        h.extend((0..num_params).map(|i| format!("theta_{i}")));
        h.push("energy".into());
        h
    }

    pub fn record(&self) -> Vec<String> {
        let mut r = vec![self.restart.to_string(), self.eval_index.to_string()];
        r.extend(self.theta.iter().map(|t| t.to_string()));
        r.push(self.energy.to_string());
        r
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartSummary {
    pub restart: usize,
    pub start: Vec<f64>,
    pub theta: Vec<f64>,
    pub energy: f64,
    pub evals: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeResult {
    pub best_theta: Vec<f64>,
    pub best_energy: f64,
    pub best_restart: usize,
    /// The winning restart stopped on its evaluation budget, not on `tol`.
    pub budget_exhausted: bool,
    pub restarts: Vec<RestartSummary>,
    pub trace: Vec<TraceRow>,
}

/// Independent seed for sweep point or worker `index` under a global seed.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index.wrapping_add(1 << 32));
    rng.gen()
}

/// Apply the `p` layers of `config` to `initial` on the full register.
pub fn evolve(
    initial: &QuantumState,
    h_cost: &ComplexMatrix,
    h_mixer: &ComplexMatrix,
    config: &QaoaConfig,
    noise: &NoiseModel,
) -> Result<QuantumState> {
    config.validate()?;
    if noise.is_noisy() && initial.is_pure_vector() {
        return Err(Error::NoisyPureState);
    }
    if config.layers_p == 0 {
        return Ok(if noise.is_noisy() {
            initial.to_density()
        } else {
            initial.clone()
        });
    }
    QaoaProblem::new(initial.clone(), h_cost.clone(), h_mixer.clone(), None)?
        .state(&config.theta(), noise)
}

/// `⟨H⟩` of a state.
pub fn energy(state: &QuantumState, h_cost: &ComplexMatrix) -> Result<f64> {
    state.expectation(h_cost)
}

/// Full-register optimization; see [`QaoaProblem::optimize`].
pub fn optimize(
    initial: &QuantumState,
    h_cost: &ComplexMatrix,
    h_mixer: &ComplexMatrix,
    config: &QaoaConfig,
    noise: &NoiseModel,
) -> Result<OptimizeResult> {
    QaoaProblem::new(initial.clone(), h_cost.clone(), h_mixer.clone(), None)?
        .optimize(config, noise)
}
