//! `mcmc-certify`: bounds, simulations and table reproduction from a JSON
//! run configuration.

mod commands;
mod config;
mod render;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use config::{Format, RunConfig, Task};

#[derive(Debug, Parser)]
#[command(name = "mcmc-certify", version, about = "Nonasymptotic MSE bounds and confidence plans for MCMC")]
struct Cli {
    #[arg(value_enum)]
    task: Task,
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    threads: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug)]
pub enum CliError {
    /// Malformed or inconsistent configuration; exit code 2.
    Config(String),
    /// Numerical or model failure; exit code 3.
    Runtime(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<mcmc_certify::Error> for CliError {
    fn from(e: mcmc_certify::Error) -> Self {
        use mcmc_certify::Error as E;
        match e {
            E::InvalidInput(_)
            | E::InvalidParameter { .. }
            | E::UnsupportedRegime(_)
            | E::InvalidExponent { .. }
            | E::InadmissibleSmallSet(_)
            | E::MomentUnavailable { .. } => CliError::Config(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = RunConfig::load(&cli.config)?;
    if let Some(t) = cfg.task {
        if t != cli.task {
            return Err(CliError::Config(format!(
                "config is for task `{t:?}` but `{:?}` was requested",
                cli.task
            )));
        }
    }
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    let output = cfg.output.clone();
    let format = cli
        .format
        .or(output.as_ref().and_then(|o| o.format))
        .unwrap_or(match cli.task {
            Task::Table => Format::Text,
            Task::Simulate | Task::Sweep => Format::Csv,
            _ => Format::Json,
        });
    let seed = cli.seed.or(cfg.seed).unwrap_or(1);
    let text = commands::dispatch(cli.task, &cfg, seed, format)?;
    match cli.out.or(output.and_then(|o| o.path)) {
        Some(path) => std::fs::write(&path, text)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Runtime(e.to_string())),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code())
        }
    }
}
