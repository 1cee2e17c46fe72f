//! `pfunctional` command-line front end.
//!
//! Every command writes its data as CSV and a `<out>.manifest.json` run
//! manifest next to it. `pfunctional replay <manifest>` re-runs a command
//! from its manifest.

mod commands;
mod manifest;

use std::process::ExitCode;

use clap::Parser;

use commands::Cli;

/// Failure classes mapped onto process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Invalid flags or parameter combinations (exit code 2).
    Usage(String),
    /// Numerical or I/O failure (exit code 1).
    Failure(anyhow::Error),
}

impl From<pfunctional::Error> for CliError {
    fn from(e: pfunctional::Error) -> Self {
        use pfunctional::Error as E;
        match e {
            E::InvalidParameter(_) | E::TimeOrderViolation { .. } | E::DimensionMismatch { .. } => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Failure(other.into()),
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Failure(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failure(e.into())
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse_from(&argv);
    match commands::run(cli, &argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
