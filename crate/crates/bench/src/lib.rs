//! Fixtures shared by the benchmarks: the tumor model on `(0, 5)`.

use std::sync::Arc;

use levy_escape::{ExitProblem, Grid, ProblemKind, StableNoiseParams, TumorDrift, TumorParams};

pub fn tumor_drift() -> TumorDrift {
    TumorDrift(TumorParams::new(0.1, 3.0).expect("valid parameters"))
}

pub fn noise(alpha: f64, beta: f64) -> StableNoiseParams {
    StableNoiseParams::new(alpha, beta, 0.0).expect("valid noise")
}

pub fn problem(alpha: f64, beta: f64, h: f64, kind: ProblemKind) -> ExitProblem {
    ExitProblem::new(
        Grid::new(0.0, 5.0, h).expect("valid grid"),
        noise(alpha, beta),
        Arc::new(tumor_drift()),
        kind,
    )
}
