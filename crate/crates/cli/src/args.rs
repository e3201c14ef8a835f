//! Command-line surface and how it merges with presets and config files.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{parse_pairs, Command, Format, RunConfig};
use crate::error::CliError;
use crate::output::ResultTable;
use crate::presets::preset_pairs;

#[derive(Debug, Parser)]
#[command(
    name = "levy-escape",
    version,
    about = "Mean exit time and escape probability under asymmetric stable Levy noise"
)]
pub struct Cli {
    #[command(subcommand)]
    pub action: Action,
}

#[derive(Debug, Subcommand)]
pub enum Action {
    /// Mean exit time u(x) on the interior grid.
    Met(RunArgs),
    /// Probability p(x) of leaving through (-inf, a].
    Escape(RunArgs),
    /// One result file per parameter tuple plus a manifest.
    Sweep(RunArgs),
    /// Density of the standard stable law on an x range.
    Pdf(RunArgs),
    /// Monte Carlo exit statistics from x0.
    Simulate(RunArgs),
    /// Potential U(x) and drift f(x) on an x range.
    Potential(RunArgs),
    /// Re-run the configuration recorded in a result file's header.
    Replay(ReplayArgs),
    /// List the figure presets.
    Presets,
}

/// Every flag is optional; unset flags fall back to the config file, the
/// preset and finally the defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub d: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<String>,
    /// tumor or zero.
    #[arg(long)]
    pub drift: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub h: Option<String>,
    /// none, symmetric or full.
    #[arg(long)]
    pub correction: Option<String>,
    /// Per-file problem of a sweep: met, escape or pdf.
    #[arg(long)]
    pub problem: Option<String>,
    /// Comma-separated sweep values.
    #[arg(long, allow_hyphen_values = true)]
    pub alphas: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub betas: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub ds: Option<String>,
    /// Axis drawn as columns of one file: alpha, beta, d or none.
    #[arg(long)]
    pub curves: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<String>,
    #[arg(long)]
    pub paths: Option<String>,
    #[arg(long)]
    pub dt: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub max_steps: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub x_min: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub x_max: Option<String>,
    #[arg(long)]
    pub x_step: Option<String>,
    /// Named figure preset (fig1 ... fig12).
    #[arg(long)]
    pub preset: Option<String>,
    /// `key = value` configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Result file, or directory for sweeps; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    pub format: Option<String>,
}

impl RunArgs {
    fn flag_pairs(&self) -> Vec<(&'static str, String)> {
        let fields: [(&'static str, &Option<String>); 24] = [
            ("alpha", &self.alpha),
            ("beta", &self.beta),
            ("d", &self.d),
            ("theta", &self.theta),
            ("gamma", &self.gamma),
            ("drift", &self.drift),
            ("a", &self.a),
            ("b", &self.b),
            ("h", &self.h),
            ("correction", &self.correction),
            ("problem", &self.problem),
            ("alphas", &self.alphas),
            ("betas", &self.betas),
            ("ds", &self.ds),
            ("curves", &self.curves),
            ("x0", &self.x0),
            ("paths", &self.paths),
            ("dt", &self.dt),
            ("seed", &self.seed),
            ("max_steps", &self.max_steps),
            ("x_min", &self.x_min),
            ("x_max", &self.x_max),
            ("x_step", &self.x_step),
            ("format", &self.format),
        ];
        fields
            .into_iter()
            .filter_map(|(k, v)| v.clone().map(|v| (k, v)))
            .collect()
    }
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    /// A CSV or JSON result file.
    pub file: PathBuf,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub format: Option<String>,
}

/// Defaults, then the preset, then the config file, then flags. The
/// subcommand always decides the command.
pub fn build_config(command: Command, args: &RunArgs) -> Result<RunConfig, CliError> {
    let file_pairs = match &args.config {
        Some(path) => parse_pairs(&fs::read_to_string(path).map_err(|e| CliError::io(path, e))?)?,
        None => Vec::new(),
    };
    let preset = args
        .preset
        .clone()
        .or_else(|| file_pairs.iter().find(|(k, _)| k == "preset").map(|(_, v)| v.clone()));

    let mut cfg = RunConfig::default();
    if let Some(name) = preset {
        cfg.apply_pairs(preset_pairs(&name)?.iter().map(|(k, v)| (k.as_str(), v.as_str())))?;
    }
    cfg.apply_pairs(
        file_pairs
            .iter()
            .filter(|(k, _)| k != "preset" && k != "command")
            .map(|(k, v)| (k.as_str(), v.as_str())),
    )?;
    for (k, v) in args.flag_pairs() {
        cfg.set(k, &v)?;
    }
    if let Some(out) = &args.output {
        cfg.output = Some(out.clone());
    }
    cfg.command = command;
    Ok(cfg)
}

/// The configuration recorded in a result file, with a new destination.
/// The format follows the input file unless overridden.
pub fn replay_config(args: &ReplayArgs) -> Result<RunConfig, CliError> {
    let table = ResultTable::read(&args.file)?;
    let mut cfg = RunConfig::default();
    cfg.apply_pairs(table.config_pairs())?;
    let json = fs::read_to_string(&args.file)
        .map_err(|e| CliError::io(&args.file, e))?
        .trim_start()
        .starts_with('{');
    cfg.format = if json { Format::Json } else { Format::Csv };
    if let Some(f) = &args.format {
        cfg.set("format", f)?;
    }
    cfg.output = args.output.clone();
    Ok(cfg)
}
