// Copyright 2026 The balance-lab Authors
// SPDX-License-Identifier: Apache-2.0

//! `balance-lab`: check couplings, channels and balance of finite quantum
//! systems from JSON files.

mod commands;
mod formats;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use balance_lab::Error;

/// Exit status of a run that produced a report.
pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_MISMATCH: u8 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Unreadable, malformed or ill-shaped input.
    #[error("input error: {0}")]
    Input(String),
    /// Well-formed input describing an invalid object.
    #[error("validation failure: {0}")]
    Invalid(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Invalid(_) => EXIT_INVALID,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::DimensionMismatch(_)
            | Error::BadFactorization { .. }
            | Error::InvalidScenario(_)
            | Error::CycleTooShort(_)
            | Error::NegativeTime(_) => CliError::Input(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "balance-lab", version, about = "Balance and couplings of finite quantum systems")]
pub struct Cli {
    /// Numerical tolerance for every verdict.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,

    /// Seed for the randomized sub-checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Also write the report to this file.
    #[arg(long, global = true)]
    pub json_out: Option<PathBuf>,

    /// Worker threads for scenario grids (output order does not depend on it).
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a state, channel, generator, system or coupling file.
    Validate {
        file: PathBuf,
        /// State a channel or generator must preserve.
        #[arg(long)]
        state: Option<PathBuf>,
    },
    /// Write the channel E_ω of a coupling.
    ExtractChannel {
        #[arg(long)]
        coupling: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the coupling induced by a state-preserving u.c.p. channel.
    CouplingFromChannel {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        state_a: PathBuf,
        #[arg(long)]
        state_b: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decide whether A ω B holds.
    CheckBalance(BalanceArgs),
    /// Compose two couplings.
    Compose {
        #[arg(long)]
        omega: PathBuf,
        #[arg(long)]
        psi: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether the composition of two couplings is the product coupling.
    CheckOrthogonal {
        #[arg(long)]
        omega: PathBuf,
        #[arg(long)]
        psi: PathBuf,
    },
    /// Standard quantum detailed balance with respect to a reversing operation.
    Sqdb {
        #[arg(long)]
        system: PathBuf,
        /// Unitary U of the reversing operation a ↦ U aᵀ U*; plain transpose if absent.
        #[arg(long)]
        theta_unitary: Option<PathBuf>,
    },
    /// Fixed points, ergodicity and the identity-system witness.
    Ergodic {
        #[arg(long)]
        system: PathBuf,
    },
    /// Convergence of B on the image of E_ω when A converges.
    Convergence {
        #[command(flatten)]
        balance: BalanceArgs,
        /// Times at which to sample the deviation.
        #[arg(long, value_delimiter = ',', default_value = "0,1,5")]
        times: Vec<f64>,
    },
    /// Cycle scenarios.
    #[command(subcommand)]
    Scenario(ScenarioCommand),
}

#[derive(Debug, Args)]
pub struct BalanceArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long)]
    pub coupling: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum ScenarioCommand {
    /// Build one scenario, predict its verdict and check it numerically.
    Run {
        spec: PathBuf,
        /// Also write coupling.json, system_a.json and system_b.json here.
        #[arg(long)]
        write_dir: Option<PathBuf>,
    },
    /// The same for a JSON array of scenarios.
    Grid { specs: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok((report, code)) => {
            let text = report::to_json(&report);
            print!("{text}");
            if let Some(path) = &cli.json_out {
                if let Err(e) = std::fs::write(path, &text) {
                    eprintln!("input error: cannot write {}: {e}", path.display());
                    return ExitCode::from(EXIT_INPUT);
                }
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
