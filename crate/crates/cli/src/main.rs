mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;
use ebd_core::Error;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => 3,
        Error::Numeric(_) => 4,
        Error::Domain(_)
        | Error::NotIdentifiable { .. }
        | Error::UnsupportedOrder(_)
        | Error::Range(_)
        | Error::Json(_) => 2,
    }
}

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
