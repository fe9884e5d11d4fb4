//! `spincert`: infrared-bound certificates of long-range order for
//! quantum spin systems with reflection-positive couplings, plus the
//! exact-diagonalization battery that checks every inequality the
//! certificates rest on.
//!
//! Exit codes: 0 all checks pass (or the certificate proves order),
//! 1 at least one check fails (or the certificate is inconclusive),
//! 2 configuration or I/O error.

mod commands;
mod config;
mod output;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use crate::config::RunConfig;
use crate::output::{CommandOutput, Format};

/// Errors that abort a run before any report exists: exit code 2.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config: {msg}"),
            CliError::Io(msg) => write!(f, "io: {msg}"),
        }
    }
}

impl From<spincert_core::Error> for CliError {
    fn from(err: spincert_core::Error) -> Self {
        CliError::Config(err.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "spincert",
    version,
    about = "Long-range-order certificates for quantum spin systems, with an exact-diagonalization check battery"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// JSON config file describing the model, grid, and tolerances.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for every randomized check (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Report format; each subcommand has its natural default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Recompute the reference lattice constants by extrapolation.
    Table1,
    /// Produce a long-range-order certificate for one model.
    Certify,
    /// Sweep certificate bounds over a parameter grid.
    Scan,
    /// Run the exact-diagonalization inequality battery.
    Verify,
    /// Check reflection positivity of a coupling table.
    RpCheck,
}

fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    match &cli.config {
        None => Ok(RunConfig::default()),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|err| CliError::Io(format!("reading {}: {err}", path.display())))?;
            RunConfig::parse(&text)
        }
    }
}

fn run(cli: &Cli) -> Result<CommandOutput, CliError> {
    let config = load_config(cli)?;
    let seed = cli
        .seed
        .or(config.seed)
        .unwrap_or(spincert_core::DEFAULT_SEED);
    match cli.command {
        Cmd::Table1 => commands::table1::run(&config, seed),
        Cmd::Certify => commands::certify::run(&config, seed),
        Cmd::Scan => commands::scan::run(&config, seed),
        Cmd::Verify => commands::verify::run(&config, seed),
        Cmd::RpCheck => commands::rp_check::run(&config, seed),
    }
}

fn main() -> ExitCode {
    let started = Instant::now();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let body = out.body(cli.format);
            if let Some(path) = &cli.out {
                if let Err(err) = std::fs::write(path, body.as_bytes()) {
                    eprintln!("error: io: writing {}: {err}", path.display());
                    return ExitCode::from(2);
                }
            } else {
                print!("{body}");
            }
            // Timing goes to stderr so reports stay byte-identical.
            eprintln!("completed in {} ms", started.elapsed().as_millis());
            ExitCode::from(out.exit as u8)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
