//! `sng`: command-line front end.
//!
//! Exit codes: 0 success, 1 a `--assert` check failed, 2 bad flags or
//! arguments, 3 a file could not be read or written.

mod args;
mod commands;
mod theory;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("check failed: {0}")]
    Assert(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Assert(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<sng_dbscan::Error> for CliError {
    fn from(e: sng_dbscan::Error) -> Self {
        use sng_dbscan::Error as E;
        match e {
            E::Io { .. } => CliError::Io(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

/// Errors while reading a data file are input failures, whatever the cause.
pub fn input_error(e: sng_dbscan::Error) -> CliError {
    use sng_dbscan::Error as E;
    match e {
        E::Io { .. } | E::Parse { .. } | E::EmptyInput(_) => CliError::Io(e.to_string()),
        other => other.into(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(2),
            };
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon_threads(t as usize) {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match cli.command {
        Command::Cluster(a) => commands::cluster(a),
        Command::Score(a) => commands::score(a),
        Command::Gen(a) => commands::gen(a),
        Command::Bench(a) => commands::bench(a),
        Command::Theory(a) => theory::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn rayon_threads(n: usize) -> Result<(), String> {
    sng_dbscan::set_threads(n).map_err(|e| e.to_string())
}
