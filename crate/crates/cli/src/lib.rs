//! Command-line front end: configuration, single solves, sweeps over the
//! figure parameter grids, density tables and Monte Carlo runs.
//!
//! Configuration files hold one `key = value` per line with `#` comments;
//! the keys are those of [`config::KEYS`] plus `preset`, `output` and
//! `format`. Result headers use the same keys, so any result file can be
//! replayed.

pub mod args;
pub mod config;
pub mod error;
pub mod output;
pub mod presets;
pub mod run;

pub use args::{build_config, replay_config, Action, Cli, ReplayArgs, RunArgs};
pub use config::{Axis, Command, Format, Problem, RunConfig};
pub use error::CliError;
pub use output::ResultTable;
pub use run::{compute, execute, Outcome};

/// Run a parsed command line; returns what to print on success.
pub fn dispatch(cli: Cli) -> Result<Outcome, CliError> {
    let (command, args) = match cli.action {
        Action::Met(a) => (Command::Met, a),
        Action::Escape(a) => (Command::Escape, a),
        Action::Sweep(a) => (Command::Sweep, a),
        Action::Pdf(a) => (Command::Pdf, a),
        Action::Simulate(a) => (Command::Simulate, a),
        Action::Potential(a) => (Command::Potential, a),
        Action::Replay(a) => return execute(&replay_config(&a)?),
        Action::Presets => {
            let lines: Vec<String> = presets::PRESETS
                .iter()
                .map(|(name, text)| format!("{name:<6} {}\n", presets::describe(text)))
                .collect();
            return Ok(Outcome::Printed(lines.concat()));
        }
    };
    execute(&build_config(command, &args)?)
}
