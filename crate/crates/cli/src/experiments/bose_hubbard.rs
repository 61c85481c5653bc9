//! Bose-Hubbard ground states from the mixer ground state.

use qqa_core::bosonic::{
    build_bh, build_bh_qudit, encoded_fock_state, exact_ground_state, BhParams, TruncatedMode,
};
use qqa_core::encoding::{
    build_encoding, qudit_site_operator, site_operator, EncodingMap, Subspace,
};
use qqa_core::linalg::herm_eig;
use qqa_core::metrics::{fidelity, mean_occupations};
use qqa_core::mixers::{named_mixer, MixerName};
use qqa_core::qaoa::{derive_seed, NoiseModel, OptimizeResult, QaoaConfig, QaoaProblem};
use qqa_core::thermal::DEGENERACY_TOL;
use qqa_core::{ComplexMatrix, QuantumState};
use serde::Serialize;

use crate::config::BoseHubbardParams;
use crate::error::RunResult;
use crate::output::{fmt_f, Table};

pub fn bh_params(p: &BoseHubbardParams) -> BhParams {
    BhParams {
        sites_l: p.sites_l,
        hop_j: p.hop_j,
        onsite_u: p.onsite_u,
        chem_mu: p.chem_mu,
        cutoff_nc: p.cutoff_nc,
    }
}

/// Ground energy and per-site occupations from the bare qudit Hamiltonian.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactReference {
    pub energy: f64,
    pub occupations: Vec<f64>,
    /// Gap to the first excited level.
    pub gap: f64,
}

pub fn exact_reference(params: &BoseHubbardParams) -> RunResult<ExactReference> {
    let h = build_bh_qudit(&bh_params(params))?;
    let eig = herm_eig(&h)?;
    let v = eig.vectors.column(0);
    let mode = TruncatedMode::new(params.cutoff_nc)?;
    let dims = vec![mode.dim(); params.sites_l];
    let mut occupations = Vec::with_capacity(params.sites_l);
    for s in 0..params.sites_l {
        let n = qudit_site_operator(&mode.number, s, &dims)?;
        occupations.push(v.dotc(&(&n * v)).re);
    }
    Ok(ExactReference {
        energy: eig.values[0],
        occupations,
        gap: eig.values[1] - eig.values[0],
    })
}

/// Lowest eigenvector of `h` inside `sub`, lifted to the register, or the
/// uniform mixture over a degenerate ground space.
pub fn subspace_ground_state(
    h: &ComplexMatrix,
    sub: &Subspace,
) -> RunResult<(QuantumState, usize)> {
    let eig = herm_eig(&sub.restrict(h)?)?;
    let e0 = eig.values[0];
    let g = eig
        .values
        .iter()
        .take_while(|&&e| e - e0 < DEGENERACY_TOL)
        .count();
    if g == 1 {
        let v = sub.lift_vector(&eig.vectors.column(0).into_owned())?;
        return Ok((QuantumState::pure_normalized(v)?, 1));
    }
    let cols = eig.vectors.columns(0, g);
    let rho = (&cols * cols.adjoint()).unscale(g as f64);
    Ok((QuantumState::density(sub.lift(&rho)?)?, g))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BhRun {
    pub mixer: MixerName,
    pub layers_p: usize,
    pub seed: u64,
    pub optimum: OptimizeResult,
    /// `⟨n_ℓ⟩` after `l` layers of the optimal angles, `l = 0..=p`.
    pub layer_occupations: Vec<Vec<f64>>,
    pub layer_energies: Vec<f64>,
    pub fidelity_exact: f64,
    pub fidelity_vacuum: f64,
    pub mixer_cnots_per_layer: usize,
    pub initial_degeneracy: usize,
}

impl BhRun {
    pub fn final_occupations(&self) -> &[f64] {
        self.layer_occupations
            .last()
            .expect("layer 0 is always present")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BhOutcome {
    pub reference: ExactReference,
    pub runs: Vec<BhRun>,
}

struct BhSetup {
    maps: Vec<EncodingMap>,
    problem: QaoaProblem,
    exact: QuantumState,
    vacuum: QuantumState,
    degeneracy: usize,
    cnots: usize,
}

fn setup(params: &BoseHubbardParams, mixer: MixerName) -> RunResult<BhSetup> {
    let dim_d = params.cutoff_nc + 1;
    let map = build_encoding(mixer.scheme(), dim_d)?;
    let maps = vec![map.clone(); params.sites_l];
    let sub = Subspace::from_maps(&maps);
    let h_cost = build_bh(&bh_params(params), &map)?;
    let single = named_mixer(mixer, dim_d)?;
    let blocks = vec![map.num_qubits; params.sites_l];
    let mut h_mixer = ComplexMatrix::zeros(h_cost.nrows(), h_cost.ncols());
    for s in 0..params.sites_l {
        h_mixer += site_operator(&single.matrix, s, &blocks)?;
    }
    let (initial, degeneracy) = subspace_ground_state(&h_mixer, &sub)?;
    let (_, exact) = exact_ground_state(&h_cost, Some(&sub))?;
    let vacuum = encoded_fock_state(&maps, &vec![0; params.sites_l])?;
    let problem = QaoaProblem::new(initial, h_cost, h_mixer, Some(sub))?;
    Ok(BhSetup {
        maps,
        problem,
        exact,
        vacuum,
        degeneracy,
        cnots: params.sites_l * single.cost().total_cnots(),
    })
}

/// Truncate `(γ_1..γ_p, ν_1..ν_p)` to its first `l` layers.
pub fn first_layers(theta: &[f64], l: usize) -> Vec<f64> {
    let p = theta.len() / 2;
    theta[..l].iter().chain(&theta[p..p + l]).copied().collect()
}

pub fn run_mixer(params: &BoseHubbardParams, mixer: MixerName, seed: u64) -> RunResult<BhRun> {
    let s = setup(params, mixer)?;
    let mut cfg = QaoaConfig::new(params.layers_p);
    cfg.seed = seed;
    cfg.restarts = params.optimizer.restarts;
    cfg.max_evals = params.optimizer.max_evals;
    cfg.tol = params.optimizer.tol;
    cfg.method = params.optimizer.method;
    let optimum = s.problem.optimize(&cfg, &NoiseModel::NONE)?;
    let mut layer_occupations = Vec::with_capacity(params.layers_p + 1);
    let mut layer_energies = Vec::with_capacity(params.layers_p + 1);
    let mut last = None;
    for l in 0..=params.layers_p {
        let state = s
            .problem
            .state(&first_layers(&optimum.best_theta, l), &NoiseModel::NONE)?;
        layer_occupations.push(mean_occupations(&state, &s.maps)?);
        layer_energies.push(state.expectation(s.problem.h_cost())?);
        last = Some(state);
    }
    let last = last.expect("at least layer 0");
    Ok(BhRun {
        mixer,
        layers_p: params.layers_p,
        seed,
        fidelity_exact: fidelity(&last, &s.exact)?,
        fidelity_vacuum: fidelity(&last, &s.vacuum)?,
        optimum,
        layer_occupations,
        layer_energies,
        mixer_cnots_per_layer: s.cnots,
        initial_degeneracy: s.degeneracy,
    })
}

/// One optimization per mixer, seeded from (seed, mixer index). Mixers run
/// one after another; each uses the worker pool for its restarts.
pub fn bose_hubbard(params: &BoseHubbardParams) -> RunResult<BhOutcome> {
    params.validate()?;
    let reference = exact_reference(params)?;
    let runs = params
        .mixers
        .iter()
        .enumerate()
        .map(|(i, &m)| run_mixer(params, m, derive_seed(params.optimizer.seed, i as u64)))
        .collect::<RunResult<Vec<_>>>()?;
    Ok(BhOutcome { reference, runs })
}

pub fn summary_table(o: &BhOutcome, sites: usize) -> Table {
    let mut header: Vec<String> = [
        "scheme",
        "mixer",
        "layers_p",
        "energy",
        "exact_energy",
        "fidelity_exact",
        "fidelity_vacuum",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    header.extend((0..sites).map(|l| format!("n_{l}")));
    header.extend((0..sites).map(|l| format!("n_exact_{l}")));
    header.extend(["cnot_per_layer", "budget_exhausted"].map(String::from));
    let mut t = Table::with_header("summary", header);
    for r in &o.runs {
        let mut row = vec![
            r.mixer.scheme().to_string(),
            r.mixer.to_string(),
            r.layers_p.to_string(),
            fmt_f(r.optimum.best_energy),
            fmt_f(o.reference.energy),
            fmt_f(r.fidelity_exact),
            fmt_f(r.fidelity_vacuum),
        ];
        row.extend(r.final_occupations().iter().map(|&x| fmt_f(x)));
        row.extend(o.reference.occupations.iter().map(|&x| fmt_f(x)));
        row.push(r.mixer_cnots_per_layer.to_string());
        row.push(r.optimum.budget_exhausted.to_string());
        t.push(row);
    }
    t
}

pub fn layers_table(o: &BhOutcome, sites: usize) -> Table {
    let mut header = vec![
        "mixer".to_string(),
        "layer".to_string(),
        "energy".to_string(),
    ];
    header.extend((0..sites).map(|l| format!("n_{l}")));
    let mut t = Table::with_header("layers", header);
    for r in &o.runs {
        for (l, (occ, e)) in r
            .layer_occupations
            .iter()
            .zip(&r.layer_energies)
            .enumerate()
        {
            let mut row = vec![r.mixer.to_string(), l.to_string(), fmt_f(*e)];
            row.extend(occ.iter().map(|&x| fmt_f(x)));
            t.push(row);
        }
    }
    t
}
