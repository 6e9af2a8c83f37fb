use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use mmtc_cli::commands::{self, Inputs};
use mmtc_cli::{exit, exit_code, table, Cli};

const THREADS_VAR: &str = "MMTC_AGG_THREADS";

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else { return Ok(()) };
    let threads: usize = raw.trim().parse().ok().filter(|&n| n >= 1).ok_or_else(|| {
        mmtc_core::Error::InvalidConfig(format!("{THREADS_VAR} must be a positive integer, got {raw:?}"))
    })?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().context("starting worker threads")?;
    Ok(())
}

fn run(cli: &Cli) -> Result<u8> {
    configure_threads()?;
    let inputs = Inputs::from_cli(cli)?;
    let outcome = commands::run(&cli.command, &inputs)?;
    table::emit(&outcome.tables, cli.out.as_deref())?;
    Ok(outcome.code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::VALIDATION } else { exit::OK });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
