//! `svad`: file pipeline and simulation campaigns.
//!
//! Exit codes: 0 success, 1 usage, 2 I/O, 3 malformed data.

mod args;
mod commands;
mod fail;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let outcome = match &cli.command {
        Command::Encode(a) => commands::encode(a),
        Command::Corrupt(a) => commands::corrupt(a),
        Command::Decode(a) => commands::decode(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::NtcStudy(a) => commands::ntc_study(a),
        Command::Trellis(a) => commands::trellis(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            failure.exit_code()
        }
    }
}
