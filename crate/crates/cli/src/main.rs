use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod analyze;
mod oracle;
mod run;
mod sweep;

/// Deadline-constrained random access simulator.
#[derive(Debug, Parser)]
#[command(name = "csra", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate one configuration and write its metrics row.
    Run(RunArgs),
    /// Run every compared policy over a swept parameter.
    Sweep(SweepArgs),
    /// Evaluate the closed-form success, queueing and deadline formulas.
    Analyze(analyze::AnalyzeArgs),
    /// Cross-check the formulas against Monte Carlo and exhaustive search.
    Oracle(oracle::OracleArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Config file (`key = value` lines).
    pub config: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub horizon: Option<u64>,
    /// Override the configured policy (dnn, mab, rch, fixed:<index>).
    #[arg(long)]
    pub policy: Option<String>,
    /// Directory for `metrics.csv`.
    #[arg(long, default_value = "out")]
    pub out_dir: PathBuf,
    /// Write the per-slot protocol event log to this file.
    #[arg(long)]
    pub event_log: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Sweep file: a config plus `sweep`, `values` and `replications`.
    pub config: PathBuf,
    #[arg(long, default_value = "out")]
    pub out_dir: PathBuf,
    /// Parallel runs; defaults to the number of CPUs.
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub horizon: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

/// A failure with the process exit status it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    pub fn runtime(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<csra_core::Error> for CliError {
    fn from(e: csra_core::Error) -> Self {
        use csra_core::Error as E;
        let code = match &e {
            E::InvalidConfig(_) | E::Parse { .. } | E::Domain(_) | E::IndexOutOfRange { .. } => 2,
            E::DimensionMismatch { .. } | E::Infeasible(_) | E::Unstable { .. } => 2,
            _ => 1,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::runtime(e.to_string())
    }
}

/// Fail with exit status 2 unless `path` is a readable file.
pub fn require_file(path: &std::path::Path) -> Result<(), CliError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::usage(format!(
            "cannot read file: {}",
            path.display()
        )))
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run::run(&args),
        Command::Sweep(args) => sweep::sweep(&args),
        Command::Analyze(args) => analyze::analyze(&args),
        Command::Oracle(args) => oracle::oracle(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
