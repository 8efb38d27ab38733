mod args;
mod commands;
mod error;
mod output;
mod spec;

use args::{Cli, Command};
use clap::error::ErrorKind;
use clap::Parser;
use error::CliError;
use std::process::ExitCode;

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Coeffs(a) => commands::coeffs(a),
        Command::Rates(a) => commands::rates(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Sim(a) => commands::sim(a),
        Command::Nalpha(a) => commands::nalpha(a),
        Command::Spiky(a) => commands::spiky(a),
        Command::Compare(a) => commands::compare(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::config(vec![e.render().to_string().trim().to_string()]);
            eprintln!("{}", err.record());
            return err.exit_code();
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.record());
            e.exit_code()
        }
    }
}
