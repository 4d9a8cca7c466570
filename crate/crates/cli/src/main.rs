//! Command-line interface for the local Fourier analysis engine.
//!
//! Subcommands produce CSV or JSON from a flat key=value config file:
//! operator symbol spectra, smoother spectra, two-grid convergence factors,
//! parameter sweeps, published-table reproduction, and periodic-oracle
//! validation runs.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use config::AnalysisConfig;
use lfa_core::TableId;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Numerical(msg) => write!(f, "numerical failure: {msg}"),
            CliError::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl From<lfa_core::Error> for CliError {
    fn from(err: lfa_core::Error) -> CliError {
        match err {
            lfa_core::Error::InvalidArgument(_) | lfa_core::Error::DimensionMismatch(_) => {
                CliError::Config(err.to_string())
            }
            lfa_core::Error::SingularDiagonal
            | lfa_core::Error::EigenFailure
            | lfa_core::Error::AllFrequenciesExcluded => CliError::Numerical(err.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Parser)]
#[command(
    name = "lfa",
    about = "Local Fourier analysis of p-multigrid for high-order finite elements",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Flat key=value config file; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output path; stdout when omitted.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Output format; each command has a natural default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Frequency-grid resolution override per dimension.
    #[arg(long, global = true)]
    resolution: Option<usize>,

    /// Worker threads for frequency sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues of the operator symbol over the frequency grid (CSV).
    Symbol,
    /// Eigenvalues of the smoother-preconditioned operator symbol (CSV).
    SmootherSpectrum,
    /// Two-grid convergence factor (JSON summary or CSV per-frequency table).
    TwoGrid,
    /// Convergence-factor curve over omega (Jacobi) or order (Chebyshev).
    Sweep,
    /// Reproduce a published convergence-factor table (t1..t9).
    Table {
        /// Table id; may also come from the 'table' config key.
        id: Option<String>,
    },
    /// Compare the LFA prediction against the periodic-grid oracle (JSON).
    Validate,
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(threads) = cli.threads {
        // ignore failure if a global pool already exists
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }

    let mut config = match &cli.config {
        Some(path) => AnalysisConfig::from_file(path)?,
        None => AnalysisConfig::default(),
    };
    if let Some(resolution) = cli.resolution {
        config.resolution = Some(resolution);
    }

    let output = cli.output.as_deref();
    match cli.command {
        Command::Symbol => {
            commands::cmd_symbol(&config, output, cli.format.unwrap_or(Format::Csv))
        }
        Command::SmootherSpectrum => {
            commands::cmd_smoother_spectrum(&config, output, cli.format.unwrap_or(Format::Csv))
        }
        Command::TwoGrid => {
            commands::cmd_two_grid(&config, output, cli.format.unwrap_or(Format::Json))
        }
        Command::Sweep => commands::cmd_sweep(&config, output, cli.format.unwrap_or(Format::Csv)),
        Command::Table { id } => {
            let id = match id {
                Some(text) => Some(
                    text.parse::<TableId>()
                        .map_err(|e| CliError::Config(e.to_string()))?,
                ),
                None => None,
            };
            commands::cmd_table(
                &config,
                id,
                cli.resolution,
                output,
                cli.format.unwrap_or(Format::Csv),
            )
        }
        Command::Validate => {
            commands::cmd_validate(&config, output, cli.format.unwrap_or(Format::Json))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{err}");
            match err {
                CliError::Config(_) => ExitCode::from(2),
                CliError::Numerical(_) => ExitCode::from(3),
                CliError::Io(_) => ExitCode::from(1),
            }
        }
    }
}
