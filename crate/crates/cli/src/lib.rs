//! Command-line front end of the aggregation model: argument parsing,
//! scenario files, CSV output and the figure recipes.

pub mod commands;
pub mod config;
pub mod recipes;
pub mod table;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use recipes::CliScheme;

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const VALIDATION: u8 = 1;
    pub const NON_CONVERGENCE: u8 = 2;
    pub const IO: u8 = 3;
}

#[derive(Debug, Parser)]
#[command(
    name = "mmtc-agg",
    version,
    about = "Hybrid OMA-NOMA aggregation for massive MTC: analysis, simulation and sweeps"
)]
pub struct Cli {
    /// JSON scenario file; unknown keys are rejected.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Base seed (overrides the scenario file; default 42).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Simulated epochs per point.
    #[arg(long, global = true, default_value_t = 100_000)]
    pub replications: u64,
    /// Output directory for CSV files; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "rrs")]
    pub scheme: CliScheme,
    /// Skip the Monte Carlo columns of a sweep.
    #[arg(long, global = true)]
    pub no_sim: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form success probabilities and served-device distribution.
    Analyze,
    /// Monte Carlo run of the configured scenario.
    Simulate,
    /// Run a named figure recipe.
    Sweep {
        /// One of fig-searchspace, fig-served-vs-N, fig-served-vs-phi2,
        /// fig-a1-vs-phi1, fig-served-vs-delta, fig-served-vs-mu, validate-all.
        recipe: String,
    },
    /// Power-split optimization.
    Optimize,
    /// Size of the exhaustive scheduling search space.
    Searchspace,
    /// Analytic-vs-simulation acceptance checks.
    Validate,
}

/// Exit code for an error: 2 when a quadrature failed to converge, 3 for
/// I/O failures, 1 for everything else.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<mmtc_core::Error>() {
            return match e {
                mmtc_core::Error::NonConvergence { .. } => exit::NON_CONVERGENCE,
                _ => exit::VALIDATION,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return exit::IO;
        }
        if let Some(e) = cause.downcast_ref::<csv::Error>() {
            if matches!(e.kind(), csv::ErrorKind::Io(_)) {
                return exit::IO;
            }
        }
        if let Some(e) = cause.downcast_ref::<serde_json::Error>() {
            return if e.is_io() { exit::IO } else { exit::VALIDATION };
        }
    }
    exit::VALIDATION
}
