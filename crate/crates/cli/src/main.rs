//! `llab`: solve for complete hyperbolic metrics, extract the boundary
//! coefficient `c₃` and check the integral identities it satisfies.
//!
//! Exit codes: 0 success or all checks pass, 2 a check fails or the
//! solver diverges, 3 a check is inconclusive, 64 usage or parameter
//! error, 65 malformed input data, 66 missing input file, 70 internal
//! error, 74 output error.

mod commands;
mod manifest;
mod source;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

use llab_core::conformal::ConformalError;
use llab_core::expansion::ExpansionError;
use llab_core::solver::SolverError;
use llab_core::verify::VerifyError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("malformed input: {0}")]
    Data(String),
    #[error("cannot read input: {0}")]
    NoInput(String),
    #[error("cannot write output: {0}")]
    Output(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("{0}")]
    Failed(String),
    #[error("{0}")]
    Inconclusive(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 64,
            CliError::Data(_) => 65,
            CliError::NoInput(_) => 66,
            CliError::Output(_) => 74,
            CliError::Internal(_) => 70,
            CliError::Failed(_) => 2,
            CliError::Inconclusive(_) => 3,
        }
    }

    pub fn from_solver(e: SolverError) -> Self {
        match e {
            SolverError::InvalidConfig(_) | SolverError::Resolution(_) => {
                Self::Usage(e.to_string())
            }
            SolverError::Format(_) => Self::Data(e.to_string()),
            _ => Self::Failed(e.to_string()),
        }
    }

    pub fn from_expansion(e: ExpansionError) -> Self {
        match e {
            ExpansionError::InvalidConfig(_) => Self::Usage(e.to_string()),
            _ => Self::Inconclusive(e.to_string()),
        }
    }

    pub fn from_verify(e: VerifyError) -> Self {
        match e {
            VerifyError::Precondition(_) | VerifyError::Model(_) => Self::Usage(e.to_string()),
            VerifyError::Expansion(e) => Self::from_expansion(e),
            VerifyError::Conformal(
                ConformalError::Parse(_)
                | ConformalError::InvalidMap(_)
                | ConformalError::NotUnivalent(_),
            ) => Self::Data(e.to_string()),
            _ => Self::Inconclusive(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "llab",
    version,
    about = "Complete hyperbolic metrics and the boundary coefficient c3"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form solutions: printed coefficients and sampled fields.
    Models(commands::ModelsArgs),
    /// Solve on a domain spec and write the nodal field.
    Solve(commands::SolveArgs),
    /// Extract c3 along every boundary curve.
    Extract(commands::ExtractArgs),
    /// Run one identity or inequality check.
    Verify(commands::VerifyArgs),
    /// Compare the Schwarzian domain integral with extraction on f(B_R).
    Corollary(commands::CorollaryArgs),
}

/// Caps the global thread pool from `LLAB_THREADS`.
fn configure_threads() -> Result<(), CliError> {
    let Ok(text) = std::env::var("LLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = text.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Usage(format!(
            "LLAB_THREADS must be a positive integer, got {text}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Internal(e.to_string()))
}

fn run(cli: Cli) -> Result<i32, CliError> {
    configure_threads()?;
    match &cli.command {
        Command::Models(a) => commands::models(a),
        Command::Solve(a) => commands::solve_cmd(a),
        Command::Extract(a) => commands::extract(a),
        Command::Verify(a) => commands::verify(a),
        Command::Corollary(a) => commands::corollary(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("llab: {e}");
            ExitCode::from(e.code())
        }
    }
}
