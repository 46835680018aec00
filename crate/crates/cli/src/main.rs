//! `charsum`: reproducible experiments on tails of mixed character sums.

mod args;
mod commands;
mod manifest;
mod svg;
mod verify;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;

/// Exit status: 0 ok, 1 a check failed, 2 usage or configuration error.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Check(String),
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(format!("i/o error: {e}"))
    }
}

impl From<charsum::Error> for Failure {
    fn from(e: charsum::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Usage(format!("json error: {e}"))
    }
}

pub type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let raw: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&raw) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match commands::run(cli, &raw[1..]) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
