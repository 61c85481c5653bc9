//! Gate-count and entanglement tables, and the oscillator spectrum check.

use qqa_core::bosonic::{build_cho_qudit, cho_exact_spectrum, ChoParams};
use qqa_core::encoding::EncodingScheme;
use qqa_core::linalg::{herm_eig, ComplexVector, ONE};
use qqa_core::metrics::{log_negativity, Bipartition};
use qqa_core::mixers::{
    best_candidate_mixer, budget_breakdown, named_mixer, MixerName, MixerSpec, SearchMode,
};
use qqa_core::thermal::mixer_ground_state;
use qqa_core::QuantumState;
use serde::Serialize;

use crate::config::{AppendixBParams, FigCnotParams, FigLnParams};
use crate::error::RunResult;
use crate::output::{fmt_f, Table};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1Row {
    pub mixer: MixerName,
    pub scheme: EncodingScheme,
    pub pauli_form: String,
    pub cnot_nearest: usize,
    pub cnot_long_range: usize,
    /// `(j, LN)` for every cut of the mixer ground state.
    pub ln: Vec<(usize, f64)>,
    pub entangling_measurement: bool,
}

impl Table1Row {
    pub fn cnot_total(&self) -> usize {
        self.cnot_nearest + self.cnot_long_range
    }
}

pub fn pauli_form(spec: &MixerSpec) -> String {
    spec.pauli
        .terms
        .iter()
        .map(|t| format!("{}*{}", t.coeff, t.label()))
        .collect::<Vec<_>>()
        .join(" + ")
}

/// The ten D=3 mixers: per-layer CNOTs, ground-state negativity for every
/// cut and whether read-out needs entangling gates.
pub fn table1_rows() -> RunResult<Vec<Table1Row>> {
    let mut rows = Vec::new();
    for name in MixerName::table_rows() {
        let spec = named_mixer(name, 3)?;
        let cost = spec.cost();
        let k = spec.num_qubits();
        let ground = mixer_ground_state(&spec.matrix)?;
        let mut ln = Vec::new();
        for j in 1..k {
            ln.push((j, log_negativity(&ground.state, Bipartition::new(j, k)?)?));
        }
        rows.push(Table1Row {
            mixer: name,
            scheme: name.scheme(),
            pauli_form: pauli_form(&spec),
            cnot_nearest: cost.cnot_nearest,
            cnot_long_range: cost.cnot_long_range,
            ln,
            entangling_measurement: name.scheme() == EncodingScheme::Symmetric,
        });
    }
    Ok(rows)
}

pub fn table1_table(rows: &[Table1Row]) -> Table {
    let mut t = Table::new(
        "cnot",
        &[
            "scheme",
            "mixer",
            "pauli_form",
            "cnot_nearest",
            "cnot_long_range",
            "cnot_total",
            "ln_j1",
            "ln_j2",
            "entangling_measurement",
        ],
    );
    for r in rows {
        let ln_at = |j: usize| {
            r.ln.iter()
                .find(|(jj, _)| *jj == j)
                .map_or(String::new(), |(_, v)| fmt_f(*v))
        };
        t.push(vec![
            r.scheme.to_string(),
            r.mixer.to_string(),
            r.pauli_form.clone(),
            r.cnot_nearest.to_string(),
            r.cnot_long_range.to_string(),
            r.cnot_total().to_string(),
            ln_at(1),
            ln_at(2),
            r.entangling_measurement.to_string(),
        ]);
    }
    t
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CnotRow {
    pub scheme: EncodingScheme,
    pub dim_d: usize,
    pub num_qubits: usize,
    pub mode: SearchMode,
    pub pairs: String,
    pub cnot_nearest: usize,
    pub cnot_long_range: usize,
    pub preparation: usize,
    pub measurement: usize,
    pub budget_total: usize,
}

/// Cheapest feasible mixer per scheme and dimension, for both search modes,
/// with the end-to-end budget at `layers_p`.
pub fn fig_cnot_rows(params: &FigCnotParams) -> RunResult<Vec<CnotRow>> {
    let mut rows = Vec::new();
    for &scheme in &params.schemes {
        for &d in &params.dims {
            let budget = budget_breakdown(scheme, d, params.layers_p)?;
            for mode in [SearchMode::SingleTerm, SearchMode::ConnectedSet] {
                let (spec, cost) = best_candidate_mixer(scheme, d, mode)?;
                let pairs = spec
                    .pairs
                    .iter()
                    .map(|p| format!("{}-{}", p.d, p.d_prime))
                    .collect::<Vec<_>>()
                    .join(" ");
                let mut total = cost.times(params.layers_p).total_cnots();
                total += budget.preparation + budget.measurement;
                rows.push(CnotRow {
                    scheme,
                    dim_d: d,
                    num_qubits: spec.num_qubits(),
                    mode,
                    pairs,
                    cnot_nearest: cost.cnot_nearest,
                    cnot_long_range: cost.cnot_long_range,
                    preparation: budget.preparation,
                    measurement: budget.measurement,
                    budget_total: total,
                });
            }
        }
    }
    Ok(rows)
}

pub fn fig_cnot_table(rows: &[CnotRow]) -> Table {
    let mut t = Table::new(
        "cnot",
        &[
            "scheme",
            "dim_d",
            "num_qubits",
            "mode",
            "pairs",
            "cnot_nearest",
            "cnot_long_range",
            "cnot_total",
            "preparation",
            "measurement",
            "budget_total",
        ],
    );
    for r in rows {
        let mode = match r.mode {
            SearchMode::SingleTerm => "single_term",
            SearchMode::ConnectedSet => "connected_set",
        };
        t.push(vec![
            r.scheme.to_string(),
            r.dim_d.to_string(),
            r.num_qubits.to_string(),
            mode.to_string(),
            r.pairs.clone(),
            r.cnot_nearest.to_string(),
            r.cnot_long_range.to_string(),
            (r.cnot_nearest + r.cnot_long_range).to_string(),
            r.preparation.to_string(),
            r.measurement.to_string(),
            r.budget_total.to_string(),
        ]);
    }
    t
}

/// Uniform superposition of the weight-one strings of `k` qubits.
pub fn w_state(k: usize) -> RunResult<QuantumState> {
    let mut v = ComplexVector::zeros(1 << k);
    for q in 0..k {
        v[1 << q] = ONE;
    }
    Ok(QuantumState::pure_normalized(v)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LnRow {
    pub num_qubits: usize,
    pub j: usize,
    pub ln: f64,
}

pub fn fig_ln_rows(params: &FigLnParams) -> RunResult<Vec<LnRow>> {
    let mut rows = Vec::new();
    for k in 2..=params.max_qubits {
        let s = w_state(k)?;
        for j in 1..k {
            rows.push(LnRow {
                num_qubits: k,
                j,
                ln: log_negativity(&s, Bipartition::new(j, k)?)?,
            });
        }
    }
    Ok(rows)
}

pub fn fig_ln_table(rows: &[LnRow]) -> Table {
    let mut t = Table::new("ln", &["num_qubits", "dim_d", "j", "ln"]);
    for r in rows {
        t.push(vec![
            r.num_qubits.to_string(),
            (r.num_qubits + 1).to_string(),
            r.j.to_string(),
            fmt_f(r.ln),
        ]);
    }
    t
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AppendixBOutcome {
    /// Closed-form levels in the printed order.
    pub analytic: Vec<f64>,
    pub analytic_sorted: Vec<f64>,
    pub numeric_sorted: Vec<f64>,
    pub max_level_error: f64,
    /// Largest `|⟨v_i|v_j⟩ - δ_ij|` over the closed-form eigenvectors.
    pub orthonormality_error: f64,
    /// Largest `‖H v_k - E_k v_k‖`.
    pub residual: f64,
}

pub fn appendix_b(params: &AppendixBParams) -> RunResult<AppendixBOutcome> {
    let spec = cho_exact_spectrum(params.omega, params.lambda)?;
    let h = build_cho_qudit(&ChoParams {
        omega1: params.omega,
        omega2: params.omega,
        lambda: params.lambda,
        cutoff_nc: 2,
    })?;
    let numeric: Vec<f64> = herm_eig(&h)?.values.iter().copied().collect();
    let analytic_sorted = spec.sorted_values().to_vec();
    let max_level_error = numeric
        .iter()
        .zip(&analytic_sorted)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let mut orth = 0.0f64;
    for (i, vi) in spec.vectors.iter().enumerate() {
        for (j, vj) in spec.vectors.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            orth = orth.max((vi.dot(vj) - want).abs());
        }
    }
    let hr = h.map(|z| z.re);
    let residual = spec
        .vectors
        .iter()
        .zip(spec.values)
        .map(|(v, e)| (&hr * v - v * e).norm())
        .fold(0.0, f64::max);
    Ok(AppendixBOutcome {
        analytic: spec.values.to_vec(),
        analytic_sorted,
        numeric_sorted: numeric,
        max_level_error,
        orthonormality_error: orth,
        residual,
    })
}

pub fn appendix_b_table(o: &AppendixBOutcome) -> Table {
    let mut t = Table::new("levels", &["level", "analytic", "numeric", "abs_diff"]);
    for (k, (a, n)) in o.analytic_sorted.iter().zip(&o.numeric_sorted).enumerate() {
        t.push(vec![
            k.to_string(),
            fmt_f(*a),
            fmt_f(*n),
            fmt_f((a - n).abs()),
        ]);
    }
    t
}
