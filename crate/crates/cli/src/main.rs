mod args;
mod commands;
mod config;

use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches};

use crate::args::Cli;
use crate::commands::Failure;

fn parse_cli() -> Result<Cli, Failure> {
    let argv = config::expand(std::env::args().collect()).map_err(Failure::Usage)?;
    let command = Cli::command().mut_subcommands(|s| s.args_override_self(true).allow_negative_numbers(true));
    let matches = command.try_get_matches_from(argv).map_err(Failure::Clap)?;
    Cli::from_arg_matches(&matches).map_err(Failure::Clap)
}

fn main() -> ExitCode {
    let result = parse_cli().and_then(|cli| commands::run(cli.command));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Clap(e)) => {
            let _ = e.print();
            ExitCode::from(if e.use_stderr() { 2 } else { 0 })
        }
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}
