//! Result tables and their CSV/JSON files.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::ExperimentKind;
use crate::error::RunResult;

/// Bumped whenever a table's column set changes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&str]) -> Self {
        Self {
            name: name.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_header(name: impl Into<String>, header: Vec<String>) -> Self {
        Self {
            name: name.into(),
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len(), "table {}", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn to_csv(&self) -> RunResult<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        Ok(w.into_inner().map_err(|e| e.into_error())?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub version: String,
    pub schema_version: u32,
    pub seed: Option<u64>,
    pub wall_time_s: f64,
    pub budget_exhausted: bool,
    pub warnings: Vec<String>,
}

impl Metadata {
    pub fn new(seed: Option<u64>) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            schema_version: SCHEMA_VERSION,
            seed,
            wall_time_s: 0.0,
            budget_exhausted: false,
            warnings: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub experiment: ExperimentKind,
    /// Fully resolved parameters, defaults included.
    pub config: serde_json::Value,
    pub metadata: Metadata,
    #[serde(skip)]
    pub tables: Vec<Table>,
    /// Structured extras (optimal angles, matrices).
    pub data: serde_json::Value,
}

impl ExperimentResult {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    fn csv_name(&self, table: &Table) -> String {
        format!("{}_{}.csv", self.experiment, table.name)
    }

    /// Write one CSV per table plus `<experiment>.json` holding the config
    /// echo, metadata, extras and the CSV file list. Returns written paths.
    pub fn write(&self, out_dir: &Path) -> RunResult<Vec<PathBuf>> {
        std::fs::create_dir_all(out_dir)?;
        let mut written = Vec::new();
        let mut files = Vec::new();
        for t in &self.tables {
            let name = self.csv_name(t);
            let path = out_dir.join(&name);
            std::fs::write(&path, t.to_csv()?)?;
            files.push(name);
            written.push(path);
        }
        #[derive(Serialize)]
        struct Sidecar<'a> {
            #[serde(flatten)]
            result: &'a ExperimentResult,
            tables: Vec<String>,
        }
        let path = out_dir.join(format!("{}.json", self.experiment));
        let json = serde_json::to_string_pretty(&Sidecar {
            result: self,
            tables: files,
        })?;
        std::fs::write(&path, json)?;
        written.push(path);
        Ok(written)
    }
}

pub fn fmt_f(x: f64) -> String {
    x.to_string()
}

pub fn fmt_vec(xs: &[f64]) -> Vec<String> {
    xs.iter().map(|&x| fmt_f(x)).collect()
}
