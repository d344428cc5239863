//! `noonsim` command-line tool.
//!
//! Exit codes: 0 success, 1 configuration or validation error, 2 verification
//! mismatch.

mod cli;
mod commands;
mod error;
mod format;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use cli::{merged_args, Cli, Command};
use commands::Outcome;
use error::CliResult;

const EXIT_CONFIG: u8 = 1;
const EXIT_MISMATCH: u8 = 2;

fn dispatch(cli: &Cli) -> CliResult<Outcome> {
    match &cli.command {
        Command::Generate(a) => commands::generate(a),
        Command::Sweep(a) => commands::sweep_cmd(a),
        Command::Verify(a) => commands::verify(a),
        Command::Resources(a) => commands::resources(a),
    }
}

fn main() -> ExitCode {
    let args = match merged_args(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let informational =
                matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = e.print();
            return if informational {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_CONFIG)
            };
        }
    };
    match dispatch(&cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Mismatch) => ExitCode::from(EXIT_MISMATCH),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
