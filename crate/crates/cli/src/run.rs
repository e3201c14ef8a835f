//! Executing validated configurations.

use std::path::{Path, PathBuf};

use levy_escape::{
    gaussian_limit_pdf, potential, simulate_exit, stable_pdf, ExitProblem, PdfQuadrature, ProblemKind, SolveResult,
    TumorParams,
};
use rayon::prelude::*;
use serde_json::json;

use crate::config::{Axis, Command, DriftKind, Format, RunConfig};
use crate::error::{tuple_label, CliError};
use crate::output::{fmt_f64, tool_version, write_atomic, ResultTable, DIAGNOSTIC_PREFIX, TOOL_KEY};

/// What a run produced.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    /// Rendered table, for printing when no output path was given.
    Printed(String),
    /// Files written, the manifest last for sweeps.
    Written(Vec<PathBuf>),
}

/// Validate, compute and write.
pub fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.validate()?;
    match cfg.command {
        Command::Sweep => run_sweep(cfg),
        _ => {
            let table = compute(cfg)?;
            emit(&table, cfg.output.as_deref(), cfg.format)
        }
    }
}

fn emit(table: &ResultTable, output: Option<&Path>, format: Format) -> Result<Outcome, CliError> {
    let text = table.render(format);
    match output {
        Some(path) => {
            write_atomic(path, &text)?;
            Ok(Outcome::Written(vec![path.to_path_buf()]))
        }
        None => Ok(Outcome::Printed(text)),
    }
}

/// The table of a single (non-sweep) run. Assumes `cfg` is valid.
pub fn compute(cfg: &RunConfig) -> Result<ResultTable, CliError> {
    let mut table = match cfg.command {
        Command::Met => solve_table(cfg, ProblemKind::MeanExitTime, "u")?,
        Command::Escape => solve_table(cfg, ProblemKind::EscapeLeft, "p")?,
        Command::Pdf => pdf_table(cfg)?,
        Command::Potential => potential_table(cfg)?,
        Command::Simulate => simulate_table(cfg)?,
        Command::Sweep => return Err(CliError::Validation("a sweep has no single table".into())),
    };
    let mut metadata = vec![(TOOL_KEY.to_string(), tool_version())];
    metadata.extend(cfg.pairs());
    metadata.append(&mut table.metadata);
    table.metadata = metadata;
    Ok(table)
}

/// `name` alone, or `name[axis=value]` when the file holds several curves.
fn column_name(name: &str, point: Option<(Axis, f64)>) -> String {
    match point {
        Some((axis, v)) => format!("{name}[{}={}]", axis.name(), fmt_f64(v)),
        None => name.to_string(),
    }
}

fn diag(key: &str, point: Option<(Axis, f64)>, value: impl ToString) -> (String, String) {
    (
        format!("{DIAGNOSTIC_PREFIX}{}", column_name(key, point)),
        value.to_string(),
    )
}

fn diag_f64(key: &str, point: Option<(Axis, f64)>, value: f64) -> (String, String) {
    diag(key, point, fmt_f64(value))
}

fn solve_table(cfg: &RunConfig, kind: ProblemKind, name: &str) -> Result<ResultTable, CliError> {
    let points = cfg.curve_points();
    let solutions: Vec<Result<SolveResult, CliError>> = points
        .par_iter()
        .map(|&point| {
            let c = cfg.at(point);
            let problem = ExitProblem::new(c.grid()?, c.noise()?, c.drift_field()?, kind).with_correction(c.correction);
            problem.solve().map_err(|e| {
                let e = CliError::from(e);
                match point {
                    Some((axis, v)) => e.in_tuple(&[(axis, v)]),
                    None => e,
                }
            })
        })
        .collect();
    let solutions: Vec<SolveResult> = solutions.into_iter().collect::<Result<_, _>>()?;

    let mut columns = vec!["x".to_string()];
    let mut metadata = Vec::new();
    for (&point, s) in points.iter().zip(&solutions) {
        columns.push(column_name(name, point));
        let d = &s.diagnostics;
        metadata.push(diag("unknowns", point, d.unknowns));
        metadata.push(diag_f64("residual", point, d.residual));
        metadata.push(diag("clamped", point, d.clamped));
        metadata.push(diag_f64("max_excursion", point, d.max_excursion));
        metadata.push(diag_f64("condition_1norm", point, d.condition_1norm));
    }
    let abscissae = &solutions[0].abscissae;
    let rows = abscissae
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            std::iter::once(x)
                .chain(solutions.iter().map(|s| s.values[i]))
                .collect()
        })
        .collect();
    Ok(ResultTable {
        metadata,
        columns,
        rows,
    })
}

fn pdf_table(cfg: &RunConfig) -> Result<ResultTable, CliError> {
    let xs = cfg.table_abscissae();
    let quad = PdfQuadrature::default();
    let points = cfg.curve_points();
    let mut columns = vec!["x".to_string()];
    let mut metadata = Vec::new();
    let mut curves = Vec::new();
    for &point in &points {
        let c = cfg.at(point);
        columns.push(column_name("pdf", point));
        if c.alpha == 2.0 {
            metadata.push(diag("law", point, "gaussian N(0,2)"));
            curves.push(xs.iter().map(|&x| gaussian_limit_pdf(x)).collect::<Vec<_>>());
            continue;
        }
        let noise = c.noise()?;
        let evals = xs
            .par_iter()
            .map(|&x| stable_pdf(x, &noise, &quad))
            .collect::<Result<Vec<_>, _>>()?;
        let worst = evals.iter().map(|e| e.error_estimate).fold(0.0, f64::max);
        metadata.push(diag_f64("max_error_estimate", point, worst));
        metadata.push(diag("clamped", point, evals.iter().filter(|e| e.clamped).count()));
        curves.push(evals.iter().map(|e| e.density).collect());
    }
    let rows = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| std::iter::once(x).chain(curves.iter().map(|c| c[i])).collect())
        .collect();
    Ok(ResultTable {
        metadata,
        columns,
        rows,
    })
}

fn potential_table(cfg: &RunConfig) -> Result<ResultTable, CliError> {
    let drift = cfg.drift_field()?;
    let rows = cfg
        .table_abscissae()
        .into_iter()
        .map(|x| {
            let u = match cfg.drift {
                DriftKind::Tumor => potential(x, &TumorParams::new(cfg.theta, cfg.gamma)?)?,
                DriftKind::Zero => 0.0,
            };
            Ok(vec![x, u, drift.eval(x)?])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(ResultTable {
        metadata: Vec::new(),
        columns: vec!["x".into(), "U".into(), "f".into()],
        rows,
    })
}

fn simulate_table(cfg: &RunConfig) -> Result<ResultTable, CliError> {
    let drift = cfg.drift_field()?;
    let stats = simulate_exit(
        cfg.x0,
        (cfg.a, cfg.b),
        drift.as_ref(),
        &cfg.noise()?,
        &cfg.sim_config()?,
    )?;
    let mut metadata = Vec::new();
    if stats.n_censored > 0 {
        metadata.push((
            format!("{DIAGNOSTIC_PREFIX}warning"),
            format!("{} censored paths; met_mean is a lower bound", stats.n_censored),
        ));
    }
    Ok(ResultTable {
        metadata,
        columns: [
            "n_paths",
            "met_mean",
            "met_stderr",
            "p_left",
            "p_left_stderr",
            "p_right",
            "n_left",
            "n_right",
            "n_censored",
        ]
        .map(String::from)
        .to_vec(),
        rows: vec![vec![
            stats.n_paths as f64,
            stats.met_mean,
            stats.met_stderr,
            stats.p_left,
            stats.p_left_stderr,
            stats.p_right,
            stats.n_left as f64,
            stats.n_right as f64,
            stats.n_censored as f64,
        ]],
    })
}

/// File name of one sweep tuple.
pub fn sweep_file_name(cfg: &RunConfig, tuple: &[(Axis, f64)]) -> String {
    let mut name = cfg.problem.name().to_string();
    for (axis, v) in tuple {
        name.push_str(&format!("_{}={}", axis.name(), fmt_f64(*v)));
    }
    name.push_str(match cfg.format {
        Format::Csv => ".csv",
        Format::Json => ".json",
    });
    name
}

pub const MANIFEST: &str = "manifest.json";

fn run_sweep(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let dir = cfg.output.clone().expect("validated");
    let tuples = cfg.sweep_tuples();
    let results: Vec<Result<PathBuf, CliError>> = tuples
        .par_iter()
        .map(|(tuple, single)| {
            let table = compute(single).map_err(|e| e.in_tuple(tuple))?;
            let path = dir.join(sweep_file_name(cfg, tuple));
            write_atomic(&path, &table.render(cfg.format))?;
            Ok(path)
        })
        .collect();
    let files: Vec<PathBuf> = results.into_iter().collect::<Result<_, _>>()?;

    let entries: Vec<_> = tuples
        .iter()
        .zip(&files)
        .map(|((tuple, _), path)| {
            let mut entry = serde_json::Map::new();
            entry.insert(
                "file".into(),
                json!(path.file_name().map(|n| n.to_string_lossy().into_owned())),
            );
            entry.insert("label".into(), json!(tuple_label(tuple)));
            for (axis, v) in tuple {
                entry.insert(axis.name().into(), json!(v));
            }
            serde_json::Value::Object(entry)
        })
        .collect();
    let config: serde_json::Map<String, serde_json::Value> =
        cfg.pairs().into_iter().map(|(k, v)| (k, json!(v))).collect();
    let manifest = json!({
        "tool": tool_version(),
        "config": config,
        "file_axes": cfg.file_axes().iter().map(|a| a.name()).collect::<Vec<_>>(),
        "curves": cfg.curves.map(|a| a.name()),
        "files": entries,
    });
    let path = dir.join(MANIFEST);
    write_atomic(
        &path,
        &(serde_json::to_string_pretty(&manifest).expect("serializable") + "\n"),
    )?;
    let mut written = files;
    written.push(path);
    Ok(Outcome::Written(written))
}
