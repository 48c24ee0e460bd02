//! Front end for the `rtmetro` binary.
//!
//! Every subcommand reads its settings from flags, optionally backed by a
//! flat `key = value` config file (`--config`); flags win over the file.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage or configuration error.

pub mod config;
pub mod format;
pub mod simulate;
pub mod surface;
pub mod sweep;
pub mod verify;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Core(#[from] rtmetro::Error),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: io::Error },
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(rtmetro::Error::Domain { .. })
            | CliError::Core(rtmetro::Error::InvalidParameter(_)) => 2,
            CliError::Core(_) | CliError::Io { .. } => 1,
        }
    }
}

/// Result of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    CheckFailed,
}

impl Outcome {
    pub fn code(self) -> u8 {
        match self {
            Outcome::Success => 0,
            Outcome::CheckFailed => 1,
        }
    }

    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Outcome::Success
        } else {
            Outcome::CheckFailed
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "rtmetro", version, about = "Generalized Fisher information and estimation-error toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check every closed form against quadrature and run the invariant suite.
    Verify(verify::VerifyArgs),
    /// Tabulate one quantity over an (alpha, q) grid at fixed energy.
    Sweep(sweep::SweepArgs),
    /// Monte Carlo single-shot estimation run.
    Simulate(simulate::SimulateArgs),
    /// Density P(x) over an (alpha, x) grid at fixed energy.
    Surface(surface::SurfaceArgs),
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Flat key = value file supplying defaults for any flag.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Verify(a) => verify::run(a),
        Command::Sweep(a) => sweep::run(a),
        Command::Simulate(a) => simulate::run(a),
        Command::Surface(a) => surface::run(a),
    }
}

pub(crate) fn write_output(out: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, contents).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => io::stdout()
            .write_all(contents.as_bytes())
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}
