//! `durrmeyer`: evaluate operators, verify moment identities, run convergence
//! studies and bound checks, and chart the resulting tables.

mod args;
mod commands;
mod output;
mod plot;

use std::process::ExitCode;

use clap::Parser;
use durrmeyer_core::Error;

use crate::args::Cli;

const THREADS_VAR: &str = "DURRMEYER_THREADS";

/// Exit code for configuration, constraint and name errors.
const EXIT_CONFIG: u8 = 2;
/// Exit code for numerical failures during a run.
const EXIT_NUMERIC: u8 = 3;

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(
            Error::BezierBase { .. }
            | Error::InsufficientData(_)
            | Error::ZeroPolynomial
            | Error::MissingEntry(_),
        ) => EXIT_NUMERIC,
        Some(_) => EXIT_CONFIG,
        None if err.is::<args::ConfigError>() => EXIT_CONFIG,
        None => 1,
    }
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|&t| t > 0).ok_or_else(|| {
        args::ConfigError(format!("{THREADS_VAR}={raw:?} is not a positive integer"))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| commands::run(cli));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
