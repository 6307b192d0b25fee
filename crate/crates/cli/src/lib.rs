//! Command-line front end for `wrlat-core`.

pub mod args;
pub mod commands;
pub mod error;
pub mod manifest;
pub mod output;
pub mod verify;

use args::{Cli, Command};
use clap::Parser;
use commands::Outcome;
pub use error::{CliError, Result};

fn dispatch(cli: &Cli, argv: &[String]) -> Result<(Outcome, Option<std::path::PathBuf>)> {
    Ok(match &cli.command {
        Command::FieldInfo(a) => (commands::field_info(a, argv)?, a.output.out.clone()),
        Command::Lattice(a) => (commands::lattice(a, argv)?, a.output.out.clone()),
        Command::Scan(a) => (commands::scan(a, argv)?, a.output.out.clone()),
        Command::Verify(a) => (verify::verify(a, argv)?, a.output.out.clone()),
    })
}

/// Parses `argv`, runs the command and returns the exit code.
pub fn run(argv: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(&cli, &argv) {
        Ok((outcome, out)) => {
            if let Err(e) = output::emit(&outcome.text, out.as_deref()) {
                eprintln!("error: {e}");
                return e.exit_code();
            }
            if let Some(d) = outcome.diagnostics {
                eprintln!("{d}");
            }
            outcome.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
