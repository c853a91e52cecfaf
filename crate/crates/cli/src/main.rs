//! `eecn` command-line front end.
//!
//! Exit status: 0 on success, 1 for any configuration or usage error (including
//! unreadable scenario files and unwritable outputs), 2 if the simulator hits an
//! internal assertion.

mod args;
mod commands;
mod table;

use std::panic;
use std::process::ExitCode;

use clap::Parser;

const EXIT_CONFIG: u8 = 1;
const EXIT_INTERNAL: u8 = 2;

fn main() -> ExitCode {
    let cli = match args::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match panic::catch_unwind(|| commands::dispatch(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_CONFIG)
        }
        // The panic hook has already printed the message.
        Err(_) => ExitCode::from(EXIT_INTERNAL),
    }
}
