//! Run configuration: defaults, `key = value` files, presets and flag
//! overrides, plus validation of everything before any computation starts.

use std::fmt;
use std::path::PathBuf;
use std::sync::Arc;

use levy_escape::{
    DriftField, Grid, LevyIncrements, QuadratureCorrection, SimConfig, StableNoiseParams, TumorDrift, TumorParams,
    ZeroDrift,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::output::fmt_f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Met,
    Escape,
    Sweep,
    Pdf,
    Simulate,
    Potential,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::Met,
        Command::Escape,
        Command::Sweep,
        Command::Pdf,
        Command::Simulate,
        Command::Potential,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Met => "met",
            Command::Escape => "escape",
            Command::Sweep => "sweep",
            Command::Pdf => "pdf",
            Command::Simulate => "simulate",
            Command::Potential => "potential",
        }
    }
}

/// What each file of a sweep contains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Problem {
    Met,
    Escape,
    Pdf,
}

impl Problem {
    pub fn name(self) -> &'static str {
        match self {
            Problem::Met => "met",
            Problem::Escape => "escape",
            Problem::Pdf => "pdf",
        }
    }

    pub fn command(self) -> Command {
        match self {
            Problem::Met => Command::Met,
            Problem::Escape => Command::Escape,
            Problem::Pdf => Command::Pdf,
        }
    }
}

/// A parameter that can be swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Alpha,
    Beta,
    D,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::Alpha, Axis::Beta, Axis::D];

    pub fn name(self) -> &'static str {
        match self {
            Axis::Alpha => "alpha",
            Axis::Beta => "beta",
            Axis::D => "d",
        }
    }

    /// Key of the value list for this axis.
    pub fn list_key(self) -> &'static str {
        match self {
            Axis::Alpha => "alphas",
            Axis::Beta => "betas",
            Axis::D => "ds",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriftKind {
    Tumor,
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    /// Per-file problem of a sweep.
    pub problem: Problem,
    pub alpha: f64,
    pub beta: f64,
    pub d: f64,
    pub drift: DriftKind,
    pub theta: f64,
    pub gamma: f64,
    pub a: f64,
    pub b: f64,
    pub h: f64,
    pub correction: QuadratureCorrection,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub ds: Vec<f64>,
    /// Axis whose values become columns of one file.
    pub curves: Option<Axis>,
    pub x0: f64,
    pub dt: f64,
    pub paths: u64,
    pub seed: u64,
    pub max_steps: u64,
    pub x_min: f64,
    pub x_max: f64,
    pub x_step: f64,
    #[serde(skip)]
    pub output: Option<PathBuf>,
    #[serde(skip, default = "default_format")]
    pub format: Format,
}

fn default_format() -> Format {
    Format::Csv
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: Command::Met,
            problem: Problem::Met,
            alpha: 1.9,
            beta: 0.0,
            d: 0.0,
            drift: DriftKind::Tumor,
            theta: 0.1,
            gamma: 3.0,
            a: 0.0,
            b: 5.0,
            h: 0.05,
            correction: QuadratureCorrection::Full,
            alphas: Vec::new(),
            betas: Vec::new(),
            ds: Vec::new(),
            curves: None,
            x0: 2.5,
            dt: 1e-3,
            paths: 100_000,
            seed: 1,
            max_steps: levy_escape::montecarlo::DEFAULT_MAX_STEPS,
            x_min: -5.0,
            x_max: 5.0,
            x_step: 0.05,
            output: None,
            format: Format::Csv,
        }
    }
}

/// Keys written to result headers, in order. `output`, `format` and
/// `preset` are accepted in files but describe where results go, not what
/// they are.
pub const KEYS: [&str; 24] = [
    "command",
    "problem",
    "alpha",
    "beta",
    "d",
    "drift",
    "theta",
    "gamma",
    "a",
    "b",
    "h",
    "correction",
    "alphas",
    "betas",
    "ds",
    "curves",
    "x0",
    "dt",
    "paths",
    "seed",
    "max_steps",
    "x_min",
    "x_max",
    "x_step",
];

fn parse_f64(key: &str, value: &str) -> Result<f64, CliError> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::Validation(format!("{key} = {value:?} is not a number")))
}

fn parse_u64(key: &str, value: &str) -> Result<u64, CliError> {
    let v = value.trim();
    // Accept 1e5-style counts as long as they are exact integers.
    v.parse::<u64>()
        .ok()
        .or_else(|| {
            v.parse::<f64>()
                .ok()
                .filter(|f| f.fract() == 0.0 && *f >= 0.0 && *f <= u64::MAX as f64)
                .map(|f| f as u64)
        })
        .ok_or_else(|| CliError::Validation(format!("{key} = {value:?} is not a non-negative integer")))
}

pub fn parse_list(key: &str, value: &str) -> Result<Vec<f64>, CliError> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_f64(key, s))
        .collect()
}

fn join(values: &[f64]) -> String {
    values.iter().map(|&v| fmt_f64(v)).collect::<Vec<_>>().join(",")
}

fn choice<T: Copy>(key: &str, value: &str, options: &[(&str, T)]) -> Result<T, CliError> {
    let v = value.trim();
    options
        .iter()
        .find(|(name, _)| *name == v)
        .map(|(_, t)| *t)
        .ok_or_else(|| {
            let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
            CliError::Validation(format!("{key} = {value:?} must be one of {}", names.join(", ")))
        })
}

impl RunConfig {
    /// Set one field from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "command" => {
                let options: Vec<(&str, Command)> = Command::ALL.iter().map(|c| (c.name(), *c)).collect();
                self.command = choice(key, value, &options)?;
            }
            "problem" => {
                self.problem = choice(
                    key,
                    value,
                    &[
                        ("met", Problem::Met),
                        ("escape", Problem::Escape),
                        ("pdf", Problem::Pdf),
                    ],
                )?
            }
            "alpha" => self.alpha = parse_f64(key, value)?,
            "beta" => self.beta = parse_f64(key, value)?,
            "d" => self.d = parse_f64(key, value)?,
            "drift" => self.drift = choice(key, value, &[("tumor", DriftKind::Tumor), ("zero", DriftKind::Zero)])?,
            "theta" => self.theta = parse_f64(key, value)?,
            "gamma" => self.gamma = parse_f64(key, value)?,
            "a" => self.a = parse_f64(key, value)?,
            "b" => self.b = parse_f64(key, value)?,
            "h" => self.h = parse_f64(key, value)?,
            "correction" => {
                self.correction = QuadratureCorrection::parse(value.trim()).ok_or_else(|| {
                    CliError::Validation(format!("correction = {value:?} must be one of none, symmetric, full"))
                })?
            }
            "alphas" => self.alphas = parse_list(key, value)?,
            "betas" => self.betas = parse_list(key, value)?,
            "ds" => self.ds = parse_list(key, value)?,
            "curves" => {
                self.curves = choice(
                    key,
                    value,
                    &[
                        ("none", None),
                        ("alpha", Some(Axis::Alpha)),
                        ("beta", Some(Axis::Beta)),
                        ("d", Some(Axis::D)),
                    ],
                )?
            }
            "x0" => self.x0 = parse_f64(key, value)?,
            "dt" => self.dt = parse_f64(key, value)?,
            "paths" => self.paths = parse_u64(key, value)?,
            "seed" => self.seed = parse_u64(key, value)?,
            "max_steps" => self.max_steps = parse_u64(key, value)?,
            "x_min" => self.x_min = parse_f64(key, value)?,
            "x_max" => self.x_max = parse_f64(key, value)?,
            "x_step" => self.x_step = parse_f64(key, value)?,
            "output" => self.output = Some(PathBuf::from(value.trim())),
            "format" => self.format = choice(key, value, &[("csv", Format::Csv), ("json", Format::Json)])?,
            _ => return Err(CliError::Validation(format!("unknown configuration key {key:?}"))),
        }
        Ok(())
    }

    /// Textual form of a header key.
    pub fn get(&self, key: &str) -> Option<String> {
        Some(match key {
            "command" => self.command.name().to_string(),
            "problem" => self.problem.name().to_string(),
            "alpha" => fmt_f64(self.alpha),
            "beta" => fmt_f64(self.beta),
            "d" => fmt_f64(self.d),
            "drift" => match self.drift {
                DriftKind::Tumor => "tumor".into(),
                DriftKind::Zero => "zero".into(),
            },
            "theta" => fmt_f64(self.theta),
            "gamma" => fmt_f64(self.gamma),
            "a" => fmt_f64(self.a),
            "b" => fmt_f64(self.b),
            "h" => fmt_f64(self.h),
            "correction" => self.correction.label().to_string(),
            "alphas" => join(&self.alphas),
            "betas" => join(&self.betas),
            "ds" => join(&self.ds),
            "curves" => self.curves.map_or("none", Axis::name).to_string(),
            "x0" => fmt_f64(self.x0),
            "dt" => fmt_f64(self.dt),
            "paths" => self.paths.to_string(),
            "seed" => self.seed.to_string(),
            "max_steps" => self.max_steps.to_string(),
            "x_min" => fmt_f64(self.x_min),
            "x_max" => fmt_f64(self.x_max),
            "x_step" => fmt_f64(self.x_step),
            _ => return None,
        })
    }

    /// All header keys with their values.
    pub fn pairs(&self) -> Vec<(String, String)> {
        KEYS.iter()
            .map(|k| (k.to_string(), self.get(k).expect("known key")))
            .collect()
    }

    pub fn apply_pairs<'a>(&mut self, pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<(), CliError> {
        for (k, v) in pairs {
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn axis_values(&self, axis: Axis) -> &[f64] {
        match axis {
            Axis::Alpha => &self.alphas,
            Axis::Beta => &self.betas,
            Axis::D => &self.ds,
        }
    }

    fn axis_values_mut(&mut self, axis: Axis) -> &mut Vec<f64> {
        match axis {
            Axis::Alpha => &mut self.alphas,
            Axis::Beta => &mut self.betas,
            Axis::D => &mut self.ds,
        }
    }

    pub fn value(&self, axis: Axis) -> f64 {
        match axis {
            Axis::Alpha => self.alpha,
            Axis::Beta => self.beta,
            Axis::D => self.d,
        }
    }

    pub fn set_value(&mut self, axis: Axis, v: f64) {
        match axis {
            Axis::Alpha => self.alpha = v,
            Axis::Beta => self.beta = v,
            Axis::D => self.d = v,
        }
    }

    /// Values along the curve axis, or the single fixed value.
    pub fn curve_points(&self) -> Vec<Option<(Axis, f64)>> {
        match self.curves {
            Some(axis) => self.axis_values(axis).iter().map(|&v| Some((axis, v))).collect(),
            None => vec![None],
        }
    }

    /// Copy with one curve value fixed.
    pub fn at(&self, point: Option<(Axis, f64)>) -> RunConfig {
        let mut c = self.clone();
        if let Some((axis, v)) = point {
            c.set_value(axis, v);
        }
        c
    }

    /// Swept axes that are split into separate files.
    pub fn file_axes(&self) -> Vec<Axis> {
        Axis::ALL
            .into_iter()
            .filter(|&ax| Some(ax) != self.curves && !self.axis_values(ax).is_empty())
            .collect()
    }

    /// Single-run configurations, one per sweep file, in axis order.
    pub fn sweep_tuples(&self) -> Vec<(Vec<(Axis, f64)>, RunConfig)> {
        let mut base = self.clone();
        base.command = self.problem.command();
        let axes = self.file_axes();
        for &ax in &axes {
            base.axis_values_mut(ax).clear();
        }
        let mut out = vec![(Vec::new(), base)];
        for ax in axes {
            out = out
                .into_iter()
                .flat_map(|(tuple, cfg)| {
                    self.axis_values(ax).iter().map(move |&v| {
                        let mut t = tuple.clone();
                        t.push((ax, v));
                        let mut c = cfg.clone();
                        c.set_value(ax, v);
                        (t, c)
                    })
                })
                .collect();
        }
        out
    }

    pub fn drift_field(&self) -> Result<Arc<dyn DriftField>, CliError> {
        Ok(match self.drift {
            DriftKind::Tumor => Arc::new(TumorDrift(TumorParams::new(self.theta, self.gamma)?)),
            DriftKind::Zero => Arc::new(ZeroDrift),
        })
    }

    pub fn noise(&self) -> Result<StableNoiseParams, CliError> {
        Ok(StableNoiseParams::new(self.alpha, self.beta, self.d)?)
    }

    pub fn grid(&self) -> Result<Grid, CliError> {
        Ok(Grid::new(self.a, self.b, self.h)?)
    }

    pub fn sim_config(&self) -> Result<SimConfig, CliError> {
        Ok(SimConfig::new(self.dt, self.paths, self.seed)?.with_max_steps(self.max_steps)?)
    }

    /// Abscissae of pdf and potential tables.
    pub fn table_abscissae(&self) -> Vec<f64> {
        let n = ((self.x_max - self.x_min) / self.x_step + 1e-9).floor() as usize;
        // With an integral 1/step and x_min on the lattice, divide to get
        // correctly rounded abscissae such as 0.3 rather than 0.30000000000000004.
        let unit = (1.0 / self.x_step).round();
        let first = (self.x_min * unit).round();
        if (unit * self.x_step - 1.0).abs() < 1e-12 && (self.x_min * unit - first).abs() < 1e-9 {
            (0..=n).map(|i| (first + i as f64) / unit).collect()
        } else {
            (0..=n).map(|i| self.x_min + i as f64 * self.x_step).collect()
        }
    }

    /// Checks every invariant the run depends on, for every tuple and curve.
    pub fn validate(&self) -> Result<(), CliError> {
        for ax in Axis::ALL {
            if self.axis_values(ax).iter().any(|v| !v.is_finite()) {
                return Err(CliError::Validation(format!(
                    "{} must contain finite numbers",
                    ax.list_key()
                )));
            }
        }
        if let Some(ax) = self.curves {
            if self.axis_values(ax).is_empty() {
                return Err(CliError::Validation(format!(
                    "curves = {} needs a non-empty {} list",
                    ax.name(),
                    ax.list_key()
                )));
            }
        }
        match self.command {
            Command::Sweep => {
                if Axis::ALL.iter().all(|&ax| self.axis_values(ax).is_empty()) {
                    return Err(CliError::Validation(
                        "sweep needs at least one sweep axis (alphas, betas or ds)".into(),
                    ));
                }
                if self.output.is_none() {
                    return Err(CliError::Validation("sweep needs --output <directory>".into()));
                }
                for (tuple, cfg) in self.sweep_tuples() {
                    cfg.validate_single().map_err(|e| e.in_tuple(&tuple))?;
                }
                Ok(())
            }
            _ => self.validate_single(),
        }
    }

    fn validate_single(&self) -> Result<(), CliError> {
        for ax in Axis::ALL {
            if Some(ax) != self.curves && !self.axis_values(ax).is_empty() {
                return Err(CliError::Validation(format!(
                    "{} is only used by sweep or with curves = {}",
                    ax.list_key(),
                    ax.name()
                )));
            }
        }
        for point in self.curve_points() {
            self.at(point).validate_point()?;
        }
        Ok(())
    }

    fn validate_point(&self) -> Result<(), CliError> {
        match self.command {
            Command::Met | Command::Escape => {
                self.noise()?;
                let grid = self.grid()?;
                let drift = self.drift_field()?;
                for x in grid.interior_abscissae() {
                    drift.eval(x)?;
                }
            }
            Command::Pdf => {
                if self.d != 0.0 {
                    return Err(CliError::Validation(format!(
                        "pdf needs d = 0 (the pure stable law), got d = {}",
                        self.d
                    )));
                }
                if self.alpha != 2.0 {
                    self.noise()?;
                } else if !(-1.0..=1.0).contains(&self.beta) {
                    return Err(CliError::Validation(format!(
                        "beta = {} violates -1 <= beta <= 1",
                        self.beta
                    )));
                }
                self.validate_range()?;
            }
            Command::Potential => {
                self.validate_range()?;
                let drift = self.drift_field()?;
                for x in self.table_abscissae() {
                    drift.eval(x)?;
                }
            }
            Command::Simulate => {
                let noise = self.noise()?;
                let cfg = self.sim_config()?;
                if self.a.partial_cmp(&self.b) != Some(std::cmp::Ordering::Less) {
                    return Err(CliError::Validation(format!(
                        "domain ({}, {}) must satisfy a < b",
                        self.a, self.b
                    )));
                }
                if !(self.x0 > self.a && self.x0 < self.b) {
                    return Err(CliError::Validation(format!(
                        "x0 = {} must lie inside the domain ({}, {})",
                        self.x0, self.a, self.b
                    )));
                }
                LevyIncrements::new(&noise, cfg.dt)?;
                let drift = self.drift_field()?;
                // Paths only evaluate the drift inside the domain.
                if self.drift == DriftKind::Tumor && self.a < -1.0 {
                    return Err(CliError::Validation(format!(
                        "a = {} violates a >= -1 (the tumor drift has a pole at x = -1)",
                        self.a
                    )));
                }
                drift.eval(self.x0)?;
            }
            Command::Sweep => unreachable!("sweeps are split before point validation"),
        }
        Ok(())
    }

    fn validate_range(&self) -> Result<(), CliError> {
        if !(self.x_min.is_finite() && self.x_max.is_finite() && self.x_min < self.x_max) {
            return Err(CliError::Validation(format!(
                "x_min = {} and x_max = {} violate x_min < x_max",
                self.x_min, self.x_max
            )));
        }
        if !(self.x_step > 0.0 && self.x_step.is_finite()) {
            return Err(CliError::Validation(format!(
                "x_step = {} violates x_step > 0",
                self.x_step
            )));
        }
        if (self.x_max - self.x_min) / self.x_step > 1e6 {
            return Err(CliError::Validation(
                "x range holds more than 10^6 points; raise x_step".into(),
            ));
        }
        Ok(())
    }
}

/// Parse `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Validation(format!("line {}: expected key = value, got {raw:?}", n + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.pairs() {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}
