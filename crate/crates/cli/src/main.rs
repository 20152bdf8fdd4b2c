//! `solitonchain`: run one experiment, write CSV plus a JSON manifest.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 config error, 3 numerical failure.

mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::Experiment;

const THREADS_ENV: &str = "SOLITONCHAIN_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "solitonchain",
    version,
    about = "Entanglement generation on dimerized spin chains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fidelity and EoF traces of the clean chain.
    Dynamics(Common),
    /// Disorder-averaged EoF at t_M and over a window.
    DisorderSweep(Common),
    /// EoF at t_M against a delayed second injection.
    AsyncSweep(Common),
    /// Entangle, decouple the centre defect, keep evolving.
    Storage(Common),
    /// Disorder-averaged spectrum.
    Spectrum(Common),
    /// Numerical trimer against its closed form.
    TrimerOracle(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// JSON config document.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Base seed for disorder streams.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Dot-path overrides, e.g. `disorder.kind=diagonal`.
    #[arg(value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl Command {
    fn split(self) -> (Experiment, Common) {
        match self {
            Command::Dynamics(c) => (Experiment::Dynamics, c),
            Command::DisorderSweep(c) => (Experiment::DisorderSweep, c),
            Command::AsyncSweep(c) => (Experiment::AsyncSweep, c),
            Command::Storage(c) => (Experiment::Storage, c),
            Command::Spectrum(c) => (Experiment::Spectrum, c),
            Command::TrimerOracle(c) => (Experiment::TrimerOracle, c),
        }
    }
}

fn thread_count() -> Result<usize, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(0),
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("{THREADS_ENV}: `{v}` is not a worker count"))),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (experiment, common) = cli.command.split();
    let threads = thread_count()?;
    let mut cfg = config::load(experiment, common.config.as_deref(), &common.overrides)?;
    if let Some(seed) = common.seed {
        cfg.base_seed = seed;
    }
    if let Some(out) = common.out {
        cfg.output = out;
    }
    let resolved = config::resolve(cfg)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Config(format!("{THREADS_ENV}: {e}")))?;
    let artifacts = pool.install(|| run::execute(&resolved))?;

    let written = run::write_artifacts(&resolved.config.output, &resolved, &artifacts)?;
    for path in written {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("solitonchain: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
