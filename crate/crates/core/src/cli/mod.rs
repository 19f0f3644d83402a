//! Command-line front end.
//!
//! Exit statuses: 0 success, 2 usage or validation error, 3 solver
//! non-convergence, 4 nonexistent state selected, 5 oracle disagreement,
//! 6 invariant failure.

mod args;
mod commands;
mod output;

use std::ffi::OsString;

use thiserror::Error;

pub use args::{parse_args, parse_grid, parse_sigmas, Command, Format, OracleOptions, OutputOptions, RunConfig, ScanParam, ScanSpec, WavefunctionSpec};
pub use commands::{
    run, run_oracle, run_scan, run_solve, run_verify, run_wavefunction, Report, ORACLE_COLUMNS, ORACLE_SLACK,
    SCAN_COLUMNS, SOLVE_COLUMNS, VERIFY_COLUMNS, WAVEFUNCTION_COLUMNS,
};
pub use output::{format_float, round_significant, Cell, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NO_CONVERGENCE: i32 = 3;
pub const EXIT_BAD_SELECTOR: i32 = 4;
pub const EXIT_ORACLE_DISAGREEMENT: i32 = 5;
pub const EXIT_INVARIANT_FAILURE: i32 = 6;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}", clap_reason(.0))]
    Clap(clap::Error),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Solver(#[from] crate::Error),
    #[error("{0}")]
    BadSelector(String),
    #[error("{0}")]
    OracleDisagreement(String),
    #[error("{0}")]
    InvariantFailure(String),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

fn clap_reason(e: &clap::Error) -> String {
    let text = e.to_string();
    let first = text.lines().next().unwrap_or("invalid arguments");
    first.trim_start_matches("error: ").to_string()
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use crate::Error as E;
        match self {
            CliError::Clap(e) if !e.use_stderr() => EXIT_OK,
            CliError::Clap(_) | CliError::Usage(_) => EXIT_USAGE,
            CliError::Solver(E::InvalidParameter(_) | E::Domain { .. } | E::DegenerateKappa { .. }) => EXIT_USAGE,
            CliError::Solver(_) => EXIT_NO_CONVERGENCE,
            CliError::Io(_) => EXIT_USAGE,
            CliError::BadSelector(_) => EXIT_BAD_SELECTOR,
            CliError::OracleDisagreement(_) => EXIT_ORACLE_DISAGREEMENT,
            CliError::InvariantFailure(_) => EXIT_INVARIANT_FAILURE,
        }
    }
}

fn fail(e: &CliError) -> i32 {
    eprintln!("delta-shell: {e}");
    e.exit_code()
}

/// Parse, run and emit; returns the process exit status.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match parse_args(argv) {
        Ok(cfg) => cfg,
        Err(CliError::Clap(e)) if !e.use_stderr() => {
            let _ = e.print();
            return EXIT_OK;
        }
        Err(e) => return fail(&e),
    };
    let report = match run(&cfg) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    let meta = serde_json::to_value(&cfg).expect("config serializes");
    if let Err(e) = report.table.emit(meta, &cfg.output) {
        return fail(&CliError::Io(e));
    }
    match &report.failure {
        Some(e) => fail(e),
        None => EXIT_OK,
    }
}
