//! `lpq`: command-line front end for the local period simulator.
//!
//! Exit codes: 0 success, 2 invalid input, 3 no period candidate,
//! 4 verification failed.

mod commands;
mod config;
mod render;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::Flags;

#[derive(Debug, Parser)]
#[command(name = "lpq", version, about = "Amplified Fourier sampling on the local period problem")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Per-y probability table, closed form beside simulation.
    Spectrum,
    /// Amplified versus QFT/QHS ratios with their bounds.
    Compare,
    /// Continued-fraction recovery of the period from --y.
    Recover,
    /// Recover the offset s given a putative period.
    FindOffset,
    /// Expected trials and work factors, optionally by Monte-Carlo.
    Trials,
    /// Work factors over N = 2^j; one file per N under --out.
    Sweep,
}

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    NoCandidate,
    Verification(String),
}

impl From<lpq::Error> for CliError {
    fn from(e: lpq::Error) -> Self {
        match e {
            lpq::Error::VerificationFailed { .. } | lpq::Error::NonTermination { .. } => {
                CliError::Verification(e.to_string())
            }
            e => CliError::Validation(e.to_string()),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::NoCandidate => 3,
            CliError::Verification(_) => 4,
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let config = cli.flags.resolve()?;
    match cli.command {
        Command::Spectrum => commands::spectrum(&config),
        Command::Compare => commands::compare(&config),
        Command::Recover => commands::recover(&config),
        Command::FindOffset => commands::find_offset(&config),
        Command::Trials => commands::trials(&config),
        Command::Sweep => commands::sweep(&config),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Validation(msg) => eprintln!("error: {msg}"),
                CliError::NoCandidate => eprintln!("no convergent passed the acceptance test"),
                CliError::Verification(msg) => eprintln!("verification failed: {msg}"),
            }
            ExitCode::from(e.exit_code())
        }
    }
}
