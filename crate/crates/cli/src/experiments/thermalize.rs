//! Approximate thermalization of two coupled oscillators.

use qqa_core::bosonic::{build_cho, ChoParams};
use qqa_core::encoding::{build_encoding, site_operator, EncodingMap, Subspace};
use qqa_core::metrics::{fidelity, infeasible_weight, mean_occupations, relative_entropy};
use qqa_core::mixers::{named_mixer, MixerName};
use qqa_core::qaoa::{derive_seed, NoiseModel, OptimizeResult, QaoaConfig, QaoaProblem};
use qqa_core::thermal::{gibbs_state, GibbsSpec};
use qqa_core::{ComplexMatrix, QuantumState};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{OptimizerParams, ThermalizeParams};
use crate::error::RunResult;
use crate::output::{fmt_f, Table};

/// Operators and reference states of one (mixer, β) instance.
#[derive(Debug, Clone)]
pub struct ThermalSetup {
    pub maps: Vec<EncodingMap>,
    pub subspace: Subspace,
    pub h_cost: ComplexMatrix,
    pub h_mixer: ComplexMatrix,
    /// Gibbs state of the cost Hamiltonian on the feasible subspace.
    pub target: QuantumState,
    /// Gibbs state of the mixer on the feasible subspace at the same β.
    pub initial: QuantumState,
    pub mixer_cnots_per_layer: usize,
}

impl ThermalSetup {
    pub fn new(params: &ThermalizeParams, mixer: MixerName, beta: f64) -> RunResult<Self> {
        let dim_d = params.cutoff_nc + 1;
        let map = build_encoding(mixer.scheme(), dim_d)?;
        let maps = vec![map.clone(), map.clone()];
        let subspace = Subspace::from_maps(&maps);
        let h_cost = build_cho(
            &ChoParams {
                omega1: params.omega1,
                omega2: params.omega2,
                lambda: params.lambda,
                cutoff_nc: params.cutoff_nc,
            },
            &map,
        )?;
        let single = named_mixer(mixer, dim_d)?;
        let blocks = [map.num_qubits, map.num_qubits];
        let h_mixer =
            site_operator(&single.matrix, 0, &blocks)? + site_operator(&single.matrix, 1, &blocks)?;
        let target = gibbs_state(&GibbsSpec::restricted(
            h_cost.clone(),
            beta,
            subspace.clone(),
        ))?;
        let initial = gibbs_state(&GibbsSpec::restricted(
            h_mixer.clone(),
            beta,
            subspace.clone(),
        ))?;
        Ok(Self {
            maps,
            subspace,
            h_cost,
            h_mixer,
            target,
            initial,
            mixer_cnots_per_layer: 2 * single.cost().total_cnots(),
        })
    }

    pub fn problem(&self) -> RunResult<QaoaProblem> {
        Ok(QaoaProblem::new(
            self.initial.clone(),
            self.h_cost.clone(),
            self.h_mixer.clone(),
            Some(self.subspace.clone()),
        )?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaMode {
    /// Noiseless evaluation at the noiseless optimum.
    Noiseless,
    /// Noisy evaluation at the noiseless optimum.
    Frozen,
    /// Noisy evaluation at angles optimized under the same noise.
    Reoptimized,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateMetrics {
    pub fidelity: f64,
    pub rel_entropy: f64,
    /// Relative entropy after projecting onto the feasible subspace and
    /// renormalizing; finite even when noise leaks weight out.
    pub rel_entropy_feasible: f64,
    /// Fidelity of the same projected, renormalized state.
    pub fidelity_feasible: f64,
    pub infeasible_weight: f64,
    pub occupations: Vec<f64>,
    pub energy: f64,
}

pub fn state_metrics(setup: &ThermalSetup, rho: &QuantumState) -> RunResult<StateMetrics> {
    let proj = setup.subspace.projector();
    let leak = infeasible_weight(rho, &proj)?;
    let dm = rho.density_matrix();
    let inside = &proj * dm * &proj;
    let norm = qqa_core::linalg::trace(&inside).re;
    let projected = QuantumState::density(inside.unscale(norm))?;
    Ok(StateMetrics {
        fidelity: fidelity(rho, &setup.target)?,
        rel_entropy: relative_entropy(rho, &setup.target)?,
        rel_entropy_feasible: relative_entropy(&projected, &setup.target)?,
        fidelity_feasible: fidelity(&projected, &setup.target)?,
        infeasible_weight: leak,
        occupations: mean_occupations(rho, &setup.maps)?,
        energy: rho.expectation(&setup.h_cost)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThermalRow {
    pub epsilon: f64,
    pub theta_mode: ThetaMode,
    pub theta: Vec<f64>,
    pub metrics: StateMetrics,
    pub budget_exhausted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThermalPoint {
    pub mixer: MixerName,
    pub beta: f64,
    pub layers_p: usize,
    pub seed: u64,
    pub reference_occupations: Vec<f64>,
    pub initial_metrics: StateMetrics,
    pub mixer_cnots_per_layer: usize,
    pub optimum: OptimizeResult,
    pub rows: Vec<ThermalRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub density: Option<DensityDump>,
}

/// Real and imaginary parts, row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityDump {
    pub dim: usize,
    pub target_re: Vec<f64>,
    pub target_im: Vec<f64>,
    pub state_re: Vec<f64>,
    pub state_im: Vec<f64>,
}

fn dump(m: &ComplexMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = m.nrows();
    let mut re = Vec::with_capacity(n * n);
    let mut im = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            re.push(m[(i, j)].re);
            im.push(m[(i, j)].im);
        }
    }
    (re, im)
}

fn qaoa_config(opt: &OptimizerParams, layers_p: usize, seed: u64) -> QaoaConfig {
    let mut cfg = QaoaConfig::new(layers_p);
    cfg.seed = seed;
    cfg.restarts = opt.restarts;
    cfg.max_evals = opt.max_evals;
    cfg.tol = opt.tol;
    cfg.method = opt.method;
    cfg
}

/// Sweep points in deterministic order: mixer, then β, then p.
pub fn sweep_points(params: &ThermalizeParams) -> Vec<(MixerName, f64, usize)> {
    let mut pts = Vec::new();
    for &m in &params.mixers {
        for &b in &params.betas {
            for &p in &params.layers {
                pts.push((m, b, p));
            }
        }
    }
    pts
}

pub fn run_point(
    params: &ThermalizeParams,
    mixer: MixerName,
    beta: f64,
    layers_p: usize,
    seed: u64,
) -> RunResult<ThermalPoint> {
    let setup = ThermalSetup::new(params, mixer, beta)?;
    let problem = setup.problem()?;
    let cfg = qaoa_config(&params.optimizer, layers_p, seed);
    let optimum = problem.optimize(&cfg, &NoiseModel::NONE)?;
    let mut rows = Vec::new();
    let mut best_state = None;
    for &eps in &params.noise_eps {
        let noise = if eps == 0.0 {
            NoiseModel::NONE
        } else {
            NoiseModel::depolarized_cnot(eps)?
        };
        let state = problem.state(&optimum.best_theta, &noise)?;
        rows.push(ThermalRow {
            epsilon: eps,
            theta_mode: if eps == 0.0 {
                ThetaMode::Noiseless
            } else {
                ThetaMode::Frozen
            },
            theta: optimum.best_theta.clone(),
            metrics: state_metrics(&setup, &state)?,
            budget_exhausted: optimum.budget_exhausted,
        });
        if eps == 0.0 {
            best_state = Some(state);
        }
        if eps > 0.0 && params.reoptimize_under_noise {
            let noisy_opt = problem.optimize(&cfg, &noise)?;
            let state = problem.state(&noisy_opt.best_theta, &noise)?;
            rows.push(ThermalRow {
                epsilon: eps,
                theta_mode: ThetaMode::Reoptimized,
                theta: noisy_opt.best_theta.clone(),
                metrics: state_metrics(&setup, &state)?,
                budget_exhausted: noisy_opt.budget_exhausted,
            });
        }
    }
    let density = if params.dump_density {
        let state = match best_state {
            Some(s) => s,
            None => problem.state(&optimum.best_theta, &NoiseModel::NONE)?,
        };
        let (target_re, target_im) = dump(setup.target.data());
        let (state_re, state_im) = dump(state.data());
        Some(DensityDump {
            dim: state.dim(),
            target_re,
            target_im,
            state_re,
            state_im,
        })
    } else {
        None
    };
    Ok(ThermalPoint {
        mixer,
        beta,
        layers_p,
        seed,
        reference_occupations: mean_occupations(&setup.target, &setup.maps)?,
        initial_metrics: state_metrics(&setup, &setup.initial)?,
        mixer_cnots_per_layer: setup.mixer_cnots_per_layer,
        optimum,
        rows,
        density,
    })
}

/// Run every sweep point; points are seeded from (seed, point index) and
/// may execute in parallel, results keep sweep order.
pub fn thermalize_points(params: &ThermalizeParams) -> RunResult<Vec<ThermalPoint>> {
    params.validate()?;
    sweep_points(params)
        .into_par_iter()
        .enumerate()
        .map(|(i, (m, b, p))| {
            run_point(
                params,
                m,
                b,
                p,
                derive_seed(params.optimizer.seed, i as u64),
            )
        })
        .collect()
}

pub const SUMMARY_COLUMNS: [&str; 19] = [
    "scheme",
    "mixer",
    "beta",
    "layers_p",
    "epsilon",
    "theta_mode",
    "fidelity",
    "rel_entropy",
    "rel_entropy_feasible",
    "fidelity_feasible",
    "infeasible_weight",
    "n_1",
    "n_2",
    "n_ref_1",
    "n_ref_2",
    "energy",
    "cnot_per_layer",
    "cnot_total",
    "budget_exhausted",
];

pub fn summary_table(points: &[ThermalPoint]) -> Table {
    let mut t = Table::new("summary", &SUMMARY_COLUMNS);
    for pt in points {
        for row in &pt.rows {
            let m = &row.metrics;
            let mode = match row.theta_mode {
                ThetaMode::Noiseless => "noiseless",
                ThetaMode::Frozen => "frozen",
                ThetaMode::Reoptimized => "reoptimized",
            };
            t.push(vec![
                pt.mixer.scheme().to_string(),
                pt.mixer.to_string(),
                fmt_f(pt.beta),
                pt.layers_p.to_string(),
                fmt_f(row.epsilon),
                mode.to_string(),
                fmt_f(m.fidelity),
                fmt_f(m.rel_entropy),
                fmt_f(m.rel_entropy_feasible),
                fmt_f(m.fidelity_feasible),
                fmt_f(m.infeasible_weight),
                fmt_f(m.occupations[0]),
                fmt_f(m.occupations[1]),
                fmt_f(pt.reference_occupations[0]),
                fmt_f(pt.reference_occupations[1]),
                fmt_f(m.energy),
                pt.mixer_cnots_per_layer.to_string(),
                (pt.mixer_cnots_per_layer * pt.layers_p).to_string(),
                row.budget_exhausted.to_string(),
            ]);
        }
    }
    t
}
