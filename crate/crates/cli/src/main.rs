use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use qqa_cli::error::{EXIT_BUDGET, EXIT_CONFIG, EXIT_OK};
use qqa_cli::{run, ExperimentConfig, ExperimentKind, Overrides};

/// Reproduce the gate-count, entanglement, thermalization and
/// Bose-Hubbard experiments as CSV/JSON files.
#[derive(Debug, Parser)]
#[command(name = "qqa", version)]
struct Cli {
    experiment: ExperimentKind,
    /// JSON config; defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config's `output_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    restarts: Option<usize>,
    /// Depolarizing probability per mixer CNOT, evaluated at the noiseless optimum.
    #[arg(long)]
    noise_eps: Option<f64>,
    /// Also re-optimize the angles under noise.
    #[arg(long)]
    reoptimize_under_noise: bool,
}

fn init_pool() -> Result<(), String> {
    let Ok(v) = std::env::var("QQA_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .map_err(|_| format!("QQA_THREADS must be a positive integer, got '{v}'"))?;
    if n == 0 {
        return Err("QQA_THREADS must be >= 1".into());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_pool() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_CONFIG as u8);
    }
    let config = match &cli.config {
        Some(path) => match ExperimentConfig::load(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(e.exit_code() as u8);
            }
        },
        None => ExperimentConfig::new(cli.experiment),
    };
    if config.experiment != cli.experiment {
        eprintln!(
            "error: config describes '{}' but '{}' was requested",
            config.experiment, cli.experiment
        );
        return ExitCode::from(EXIT_CONFIG as u8);
    }
    let overrides = Overrides {
        seed: cli.seed,
        restarts: cli.restarts,
        noise_eps: cli.noise_eps,
        reoptimize_under_noise: cli.reoptimize_under_noise,
    };
    let out = cli
        .out
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("results"));
    let result = match run(&config, &overrides) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match result.write(&out) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    }
    for w in &result.metadata.warnings {
        eprintln!("warning: {w}");
    }
    if result.metadata.budget_exhausted {
        eprintln!("warning: optimizer budget exhausted before convergence");
        return ExitCode::from(EXIT_BUDGET as u8);
    }
    ExitCode::from(EXIT_OK as u8)
}
