use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use levy_escape_cli::{dispatch, Cli, Outcome};

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(Outcome::Printed(text)) => {
            // A closed pipe is not worth a panic.
            let _ = std::io::stdout().write_all(text.as_bytes());
            ExitCode::SUCCESS
        }
        Ok(Outcome::Written(paths)) => {
            for p in paths {
                eprintln!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
