//! Runners turning a config into an [`ExperimentResult`].

pub mod bose_hubbard;
pub mod tables;
pub mod thermalize;

use std::time::Instant;

use qqa_core::qaoa::{OptimizeResult, TraceRow};
use serde::Serialize;

use crate::config::{
    AppendixBParams, BoseHubbardParams, ExperimentConfig, ExperimentKind, FigCnotParams,
    FigLnParams, Overrides, Table1Params, ThermalizeParams,
};
use crate::error::RunResult;
use crate::output::{ExperimentResult, Metadata, Table};

fn to_json<T: Serialize>(v: &T) -> RunResult<serde_json::Value> {
    Ok(serde_json::to_value(v)?)
}

/// Evaluation log of one optimization as a table.
pub fn trace_table(name: impl Into<String>, opt: &OptimizeResult) -> Table {
    let n = opt.best_theta.len();
    let mut t = Table::with_header(name, TraceRow::header(n));
    for r in &opt.trace {
        t.push(r.record());
    }
    t
}

fn finish(
    experiment: ExperimentKind,
    config: serde_json::Value,
    mut metadata: Metadata,
    tables: Vec<Table>,
    data: serde_json::Value,
    start: Instant,
) -> ExperimentResult {
    metadata.wall_time_s = start.elapsed().as_secs_f64();
    ExperimentResult {
        experiment,
        config,
        metadata,
        tables,
        data,
    }
}

pub fn run_table1() -> RunResult<ExperimentResult> {
    let start = Instant::now();
    let rows = tables::table1_rows()?;
    Ok(finish(
        ExperimentKind::Table1,
        to_json(&Table1Params {})?,
        Metadata::new(None),
        vec![tables::table1_table(&rows)],
        to_json(&rows)?,
        start,
    ))
}

pub fn run_fig_cnot(params: &FigCnotParams) -> RunResult<ExperimentResult> {
    let start = Instant::now();
    params.validate()?;
    let rows = tables::fig_cnot_rows(params)?;
    Ok(finish(
        ExperimentKind::FigCnot,
        to_json(params)?,
        Metadata::new(None),
        vec![tables::fig_cnot_table(&rows)],
        serde_json::Value::Null,
        start,
    ))
}

pub fn run_fig_ln(params: &FigLnParams) -> RunResult<ExperimentResult> {
    let start = Instant::now();
    params.validate()?;
    let rows = tables::fig_ln_rows(params)?;
    Ok(finish(
        ExperimentKind::FigLn,
        to_json(params)?,
        Metadata::new(None),
        vec![tables::fig_ln_table(&rows)],
        serde_json::Value::Null,
        start,
    ))
}

pub fn run_appendix_b(params: &AppendixBParams) -> RunResult<ExperimentResult> {
    let start = Instant::now();
    let o = tables::appendix_b(params)?;
    Ok(finish(
        ExperimentKind::AppendixBCheck,
        to_json(params)?,
        Metadata::new(None),
        vec![tables::appendix_b_table(&o)],
        to_json(&o)?,
        start,
    ))
}

pub fn run_thermalize(params: &ThermalizeParams) -> RunResult<ExperimentResult> {
    let start = Instant::now();
    let points = thermalize::thermalize_points(params)?;
    let mut meta = Metadata::new(Some(params.optimizer.seed));
    let mut tables = vec![thermalize::summary_table(&points)];
    for pt in &points {
        for r in &pt.rows {
            meta.budget_exhausted |= r.budget_exhausted;
        }
        if pt.rows.iter().any(|r| r.metrics.rel_entropy.is_infinite()) {
            meta.warnings.push(format!(
                "{} beta={} p={}: noisy state leaves the feasible subspace, relative entropy is infinite",
                pt.mixer, pt.beta, pt.layers_p
            ));
        }
        if params.write_trace {
            tables.push(trace_table(
                format!("trace_{}_b{}_p{}", pt.mixer, pt.beta, pt.layers_p),
                &pt.optimum,
            ));
        }
    }
    #[derive(Serialize)]
    struct PointData<'a> {
        mixer: String,
        beta: f64,
        layers_p: usize,
        seed: u64,
        best_theta: &'a [f64],
        best_energy: f64,
        best_restart: usize,
        reference_occupations: &'a [f64],
        initial_fidelity: f64,
        rows: &'a [thermalize::ThermalRow],
        #[serde(skip_serializing_if = "Option::is_none")]
        density: Option<&'a thermalize::DensityDump>,
    }
    let data: Vec<PointData> = points
        .iter()
        .map(|pt| PointData {
            mixer: pt.mixer.to_string(),
            beta: pt.beta,
            layers_p: pt.layers_p,
            seed: pt.seed,
            best_theta: &pt.optimum.best_theta,
            best_energy: pt.optimum.best_energy,
            best_restart: pt.optimum.best_restart,
            reference_occupations: &pt.reference_occupations,
            initial_fidelity: pt.initial_metrics.fidelity,
            rows: &pt.rows,
            density: pt.density.as_ref(),
        })
        .collect();
    Ok(finish(
        ExperimentKind::Thermalize,
        to_json(params)?,
        meta,
        tables,
        to_json(&data)?,
        start,
    ))
}

pub fn run_bose_hubbard(params: &BoseHubbardParams) -> RunResult<ExperimentResult> {
    let start = Instant::now();
    let outcome = bose_hubbard::bose_hubbard(params)?;
    let mut meta = Metadata::new(Some(params.optimizer.seed));
    if let Some(w) = bose_hubbard::bh_params(params).truncation_warning() {
        meta.warnings.push(w);
    }
    let mut tables = vec![
        bose_hubbard::summary_table(&outcome, params.sites_l),
        bose_hubbard::layers_table(&outcome, params.sites_l),
    ];
    for r in &outcome.runs {
        meta.budget_exhausted |= r.optimum.budget_exhausted;
        if r.initial_degeneracy > 1 {
            meta.warnings.push(format!(
                "{}: mixer ground space is {}-fold degenerate, started from the uniform mixture",
                r.mixer, r.initial_degeneracy
            ));
        }
        if params.write_trace {
            tables.push(trace_table(format!("trace_{}", r.mixer), &r.optimum));
        }
    }
    #[derive(Serialize)]
    struct RunData<'a> {
        mixer: String,
        seed: u64,
        best_theta: &'a [f64],
        best_energy: f64,
        fidelity_exact: f64,
        fidelity_vacuum: f64,
    }
    #[derive(Serialize)]
    struct Data<'a> {
        reference: &'a bose_hubbard::ExactReference,
        runs: Vec<RunData<'a>>,
    }
    let data = Data {
        reference: &outcome.reference,
        runs: outcome
            .runs
            .iter()
            .map(|r| RunData {
                mixer: r.mixer.to_string(),
                seed: r.seed,
                best_theta: &r.optimum.best_theta,
                best_energy: r.optimum.best_energy,
                fidelity_exact: r.fidelity_exact,
                fidelity_vacuum: r.fidelity_vacuum,
            })
            .collect(),
    };
    Ok(finish(
        ExperimentKind::BoseHubbard,
        to_json(params)?,
        meta,
        tables,
        to_json(&data)?,
        start,
    ))
}

/// Parse the parameters for `config.experiment`, apply overrides, validate
/// and run.
pub fn run(config: &ExperimentConfig, overrides: &Overrides) -> RunResult<ExperimentResult> {
    match config.experiment {
        ExperimentKind::Table1 => {
            let _: Table1Params = config.params()?;
            run_table1()
        }
        ExperimentKind::FigCnot => run_fig_cnot(&config.params()?),
        ExperimentKind::FigLn => run_fig_ln(&config.params()?),
        ExperimentKind::AppendixBCheck => run_appendix_b(&config.params()?),
        ExperimentKind::Thermalize => {
            let mut p: ThermalizeParams = config.params()?;
            p.apply(overrides);
            p.validate()?;
            run_thermalize(&p)
        }
        ExperimentKind::BoseHubbard => {
            let mut p: BoseHubbardParams = config.params()?;
            p.apply(overrides)?;
            p.validate()?;
            run_bose_hubbard(&p)
        }
    }
}
