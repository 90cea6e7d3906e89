//! `sofic`: run one experiment from a JSON config and write CSV artifacts
//! plus `summary.json` into the output directory.
//!
//! Exit codes: 0 success, 2 config error, 3 budget exhausted or partial
//! enumeration (artifacts are still written), 4 internal invariant failure.

mod config;
mod experiments;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use config::ExperimentConfig;
use output::Summary;

#[derive(Debug, Parser)]
#[command(name = "sofic", version, about = "Run a sofic-core experiment from a JSON config")]
struct Args {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on this.
    #[arg(long, env = "SOFIC_SHATTER_WORKERS")]
    workers: Option<usize>,
    /// Output directory; overrides the config `out`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("partial result: {0}")]
    Partial(String),
    #[error("internal invariant failed: {0}")]
    Internal(String),
    #[error("i/o error on {path}: {message}")]
    Io { path: PathBuf, message: String },
}

impl CliError {
    pub fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError::Io { path: path.to_path_buf(), message: e.to_string() }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Partial(_) => 3,
            CliError::Internal(_) | CliError::Io { .. } => 4,
        }
    }
}

impl From<sofic_core::Error> for CliError {
    fn from(e: sofic_core::Error) -> Self {
        use sofic_core::Error as E;
        match e {
            E::BudgetExceeded { .. } | E::EnumerationInfeasible(_) | E::TruncationInfeasible { .. } => CliError::Partial(e.to_string()),
            E::Postcondition(_) | E::NotPartition(_) => CliError::Internal(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

fn load(args: &Args) -> Result<(ExperimentConfig, PathBuf, usize), CliError> {
    let text = std::fs::read_to_string(&args.config).map_err(|e| CliError::Config(format!("cannot read {}: {e}", args.config.display())))?;
    let mut cfg: ExperimentConfig = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", args.config.display())))?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let out = args.out.clone().or_else(|| cfg.out.clone()).ok_or_else(|| CliError::Config("no output directory: pass --out or set \"out\"".into()))?;
    let workers = args.workers.or(cfg.workers).unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if workers == 0 {
        return Err(CliError::Config("workers must be >= 1".into()));
    }
    cfg.out = Some(out.clone());
    cfg.workers = Some(workers);
    cfg.experiment.validate()?;
    Ok((cfg, out, workers))
}

fn run(args: &Args) -> Result<(), CliError> {
    let (cfg, out, workers) = load(args)?;
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().map_err(|e| CliError::Internal(e.to_string()))?;
    let outcome = pool.install(|| experiments::run(&cfg.experiment, cfg.seed))?;
    std::fs::create_dir_all(&out).map_err(|e| CliError::io(&out, e))?;
    let mut artifacts = Vec::new();
    for t in &outcome.tables {
        let path = t.write(&out)?;
        artifacts.push(path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default());
    }
    // the echo leaves out the run-local fields so that it is identical across machines
    let mut echo = cfg.clone();
    echo.out = None;
    echo.workers = None;
    let summary = Summary {
        experiment: cfg.experiment.name(),
        version: env!("CARGO_PKG_VERSION"),
        core_version: sofic_core::VERSION,
        seed: cfg.seed,
        workers,
        status: if outcome.complete { "ok" } else { "partial" },
        config: serde_json::to_value(&echo).map_err(|e| CliError::Internal(e.to_string()))?,
        artifacts,
        results: outcome.results,
        wall_time_secs: start.elapsed().as_secs_f64(),
    };
    output::write_summary(&out, &summary)?;
    if !outcome.complete {
        return Err(CliError::Partial(format!("budget reached; partial artifacts in {}", out.display())));
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sofic: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
