//! Derivative-free local minimizers used by the QAOA multi-start driver.

mod nelder_mead;
mod trust_region;

use serde::{Deserialize, Serialize};

pub use nelder_mead::{nelder_mead, NelderMeadOptions};
pub use trust_region::{trust_region, TrustRegionOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Quadratic interpolation models in a trust region.
    #[default]
    TrustRegion,
    NelderMead,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
    /// False when the evaluation budget ran out first.
    pub converged: bool,
}

/// Counts calls and maps NaN to `+∞`.
pub(crate) struct Budgeted<'a, F> {
    f: &'a mut F,
    pub evals: usize,
    max_evals: usize,
}

impl<'a, F: FnMut(&[f64]) -> f64> Budgeted<'a, F> {
    pub fn new(f: &'a mut F, max_evals: usize) -> Self {
        Self {
            f,
            evals: 0,
            max_evals: max_evals.max(1),
        }
    }

    pub fn call(&mut self, x: &[f64]) -> f64 {
        self.evals += 1;
        let v = (self.f)(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }

    pub fn exhausted(&self) -> bool {
        self.evals >= self.max_evals
    }
}
