//! Experiment configuration files and their per-experiment parameters.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use qqa_core::bosonic::MAX_QUBITS;
use qqa_core::encoding::EncodingScheme;
use qqa_core::mixers::MixerName;
use qqa_core::optim::Method;
use serde::{Deserialize, Serialize};

use crate::error::{config_err, RunResult};

/// Largest accepted inverse temperature.
pub const MAX_BETA: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum ExperimentKind {
    Table1,
    FigCnot,
    FigLn,
    Thermalize,
    BoseHubbard,
    AppendixBCheck,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Table1 => "table1",
            Self::FigCnot => "fig_cnot",
            Self::FigLn => "fig_ln",
            Self::Thermalize => "thermalize",
            Self::BoseHubbard => "bose_hubbard",
            Self::AppendixBCheck => "appendix_b_check",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Contents of a `--config` file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub parameters: serde_json::Value,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        Self {
            experiment,
            parameters: serde_json::Value::Null,
            output_dir: None,
        }
    }

    pub fn load(path: &Path) -> RunResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))
    }

    /// Typed parameters; a missing or null block gives the defaults.
    pub fn params<T: Default + for<'de> Deserialize<'de>>(&self) -> RunResult<T> {
        if self.parameters.is_null() {
            return Ok(T::default());
        }
        serde_json::from_value(self.parameters.clone())
            .map_err(|e| config_err(format!("{} parameters: {e}", self.experiment)))
    }
}

/// Command-line overrides applied on top of the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub restarts: Option<usize>,
    pub noise_eps: Option<f64>,
    pub reoptimize_under_noise: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerParams {
    pub seed: u64,
    pub restarts: usize,
    pub max_evals: usize,
    pub tol: f64,
    pub method: Method,
}

impl Default for OptimizerParams {
    fn default() -> Self {
        Self {
            seed: 20240901,
            restarts: 16,
            max_evals: 5000,
            tol: 1e-6,
            method: Method::default(),
        }
    }
}

impl OptimizerParams {
    fn apply(&mut self, o: &Overrides) {
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(r) = o.restarts {
            self.restarts = r;
        }
    }

    fn validate(&self) -> RunResult<()> {
        if self.restarts == 0 {
            return Err(config_err("restarts must be >= 1"));
        }
        if self.max_evals == 0 {
            return Err(config_err("max_evals must be >= 1"));
        }
        if !(self.tol > 0.0) {
            return Err(config_err("tol must be > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Table1Params {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FigCnotParams {
    pub dims: Vec<usize>,
    pub schemes: Vec<EncodingScheme>,
    /// Layer count used for the end-to-end budget column.
    pub layers_p: usize,
}

impl Default for FigCnotParams {
    fn default() -> Self {
        Self {
            dims: (3..=8).collect(),
            schemes: EncodingScheme::ALL.to_vec(),
            layers_p: 1,
        }
    }
}

impl FigCnotParams {
    pub fn validate(&self) -> RunResult<()> {
        for &d in &self.dims {
            if d < 2 {
                return Err(config_err(format!("D must be >= 2, got {d}")));
            }
            for &s in &self.schemes {
                if s.num_qubits(d) > MAX_QUBITS {
                    return Err(config_err(format!(
                        "{s} encoding of D={d} exceeds {MAX_QUBITS} qubits"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FigLnParams {
    pub max_qubits: usize,
}

impl Default for FigLnParams {
    fn default() -> Self {
        Self { max_qubits: 7 }
    }
}

impl FigLnParams {
    pub fn validate(&self) -> RunResult<()> {
        if !(2..=MAX_QUBITS).contains(&self.max_qubits) {
            return Err(config_err(format!(
                "max_qubits must lie in 2..={MAX_QUBITS}"
            )));
        }
        Ok(())
    }
}

fn check_beta(beta: f64) -> RunResult<()> {
    if !(0.0..=MAX_BETA).contains(&beta) {
        return Err(config_err(format!(
            "beta must lie in [0, {MAX_BETA}], got {beta}"
        )));
    }
    Ok(())
}

fn check_mixer(m: MixerName, dim_d: usize) -> RunResult<()> {
    qqa_core::mixers::named_mixer(m, dim_d).map_err(|e| config_err(format!("mixer {m}: {e}")))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ThermalizeParams {
    pub omega1: f64,
    pub omega2: f64,
    pub lambda: f64,
    pub cutoff_nc: usize,
    pub mixers: Vec<MixerName>,
    pub betas: Vec<f64>,
    pub layers: Vec<usize>,
    /// Noise strengths evaluated at the noiseless optimum (0 = noiseless).
    pub noise_eps: Vec<f64>,
    pub reoptimize_under_noise: bool,
    /// Include final density matrices in the JSON output.
    pub dump_density: bool,
    pub write_trace: bool,
    pub optimizer: OptimizerParams,
}

impl Default for ThermalizeParams {
    fn default() -> Self {
        Self {
            omega1: 2.0,
            omega2: 2.0,
            lambda: 1.0,
            cutoff_nc: 2,
            mixers: vec![MixerName::SymOpt, MixerName::BinaryH2],
            betas: vec![0.5],
            layers: vec![5],
            noise_eps: vec![0.0],
            reoptimize_under_noise: false,
            dump_density: false,
            write_trace: true,
            optimizer: OptimizerParams::default(),
        }
    }
}

impl ThermalizeParams {
    pub fn apply(&mut self, o: &Overrides) {
        self.optimizer.apply(o);
        if let Some(eps) = o.noise_eps {
            self.noise_eps = if eps == 0.0 {
                vec![0.0]
            } else {
                vec![0.0, eps]
            };
        }
        self.reoptimize_under_noise |= o.reoptimize_under_noise;
    }

    pub fn validate(&self) -> RunResult<()> {
        self.optimizer.validate()?;
        if self.cutoff_nc < 1 {
            return Err(config_err("cutoff_nc must be >= 1"));
        }
        let dim_d = self.cutoff_nc + 1;
        for &m in &self.mixers {
            check_mixer(m, dim_d)?;
            let q = 2 * m.scheme().num_qubits(dim_d);
            if q > MAX_QUBITS {
                return Err(config_err(format!("{m}: {q} qubits exceeds {MAX_QUBITS}")));
            }
        }
        for &b in &self.betas {
            check_beta(b)?;
        }
        if self.layers.iter().any(|&p| p == 0) {
            return Err(config_err("layers must be >= 1"));
        }
        for &e in &self.noise_eps {
            if !(0.0..1.0).contains(&e) {
                return Err(config_err(format!(
                    "noise epsilon must lie in [0, 1), got {e}"
                )));
            }
        }
        if self.mixers.is_empty() || self.betas.is_empty() || self.layers.is_empty() {
            return Err(config_err("mixers, betas and layers must be non-empty"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoseHubbardParams {
    pub sites_l: usize,
    pub hop_j: f64,
    pub onsite_u: f64,
    pub chem_mu: f64,
    pub cutoff_nc: usize,
    pub layers_p: usize,
    pub mixers: Vec<MixerName>,
    pub write_trace: bool,
    pub optimizer: OptimizerParams,
}

impl Default for BoseHubbardParams {
    fn default() -> Self {
        Self {
            sites_l: 4,
            hop_j: 1.0,
            onsite_u: 10.0,
            chem_mu: -0.5,
            cutoff_nc: 2,
            layers_p: 10,
            mixers: vec![MixerName::SymOpt, MixerName::BinaryH1, MixerName::BinaryH2],
            write_trace: true,
            optimizer: OptimizerParams::default(),
        }
    }
}

impl BoseHubbardParams {
    pub fn apply(&mut self, o: &Overrides) -> RunResult<()> {
        self.optimizer.apply(o);
        if o.noise_eps.is_some() || o.reoptimize_under_noise {
            return Err(config_err(
                "bose_hubbard runs pure states; noise options do not apply",
            ));
        }
        Ok(())
    }

    pub fn validate(&self) -> RunResult<()> {
        self.optimizer.validate()?;
        if self.sites_l < 1 || self.cutoff_nc < 1 || self.layers_p < 1 {
            return Err(config_err("sites_l, cutoff_nc and layers_p must be >= 1"));
        }
        if self.mixers.is_empty() {
            return Err(config_err("mixers must be non-empty"));
        }
        let dim_d = self.cutoff_nc + 1;
        for &m in &self.mixers {
            check_mixer(m, dim_d)?;
            let q = self.sites_l * m.scheme().num_qubits(dim_d);
            if q > MAX_QUBITS {
                return Err(config_err(format!("{m}: {q} qubits exceeds {MAX_QUBITS}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AppendixBParams {
    pub omega: f64,
    pub lambda: f64,
}

impl Default for AppendixBParams {
    fn default() -> Self {
        Self {
            omega: 2.0,
            lambda: 1.0,
        }
    }
}
