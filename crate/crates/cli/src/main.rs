//! `quartic`: eigenvalues, asymptotic comparisons and algebra checks for
//! `y⁗ + (py′)′ + qy = λy` on [0, 1].

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "quartic", version, about = "Fourth-order spectral engine")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Problem configuration (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Expansion order for `asymptote` and `compare`.
    #[arg(long, global = true, value_enum)]
    pub order: Option<OrderArg>,
    #[arg(long, global = true, value_enum)]
    pub precision: Option<PrecisionArg>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<FormatArg>,
    /// Worker threads; overrides QUARTIC_THREADS and the config file.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Compute eigenvalues for the configured index range.
    Solve,
    /// Tabulate the asymptotic expansions.
    Asymptote,
    /// Fit the decay of numeric-minus-asymptotic residuals.
    Compare,
    /// Check the Birkhoff-reduction identities exactly.
    VerifyAlgebra {
        /// Alternative constants table.
        #[arg(long)]
        constants: Option<PathBuf>,
    },
    /// Report per-disk root intervals and winding numbers.
    Localize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderArg {
    Rough,
    #[value(name = "L1", alias = "l1")]
    L1,
    P1,
    P2,
    #[value(name = "p3_full")]
    P3Full,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrecisionArg {
    Double,
    Extended,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormatArg {
    Csv,
    Json,
}

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    IdentityFailure = 1,
    ConfigError = 2,
    SpectralMismatch = 3,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exit = commands::run(&cli);
    ExitCode::from(exit as u8)
}
