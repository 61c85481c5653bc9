//! Experiment runners for the `qqa` command: gate-count tables, entanglement
//! curves, thermalization sweeps and Bose-Hubbard ground-state searches.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

pub use config::{ExperimentConfig, ExperimentKind, Overrides};
pub use error::{RunError, RunResult};
pub use experiments::run;
pub use output::{ExperimentResult, Table};
