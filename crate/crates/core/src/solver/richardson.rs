use serde::{Deserialize, Serialize};

use super::{ExitProblem, SolveResult};
use crate::error::{Error, Result};

/// Difference between the solutions at `h` and `h/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RichardsonLevel {
    pub h: f64,
    /// Max-norm difference on the nodes of the coarsest grid.
    pub max_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RichardsonReport {
    pub levels: Vec<RichardsonLevel>,
    /// `log₂` of successive difference ratios.
    pub orders: Vec<f64>,
}

impl RichardsonReport {
    /// Whether every refinement shrank the difference.
    pub fn decreasing(&self) -> bool {
        self.levels.windows(2).all(|w| w[1].max_diff < w[0].max_diff)
    }

    /// Last empirical order, if at least two differences exist.
    pub fn order(&self) -> Option<f64> {
        self.orders.last().copied()
    }
}

/// Solve at `h, h/2, …, h/2^refinements` and compare consecutive solutions
/// on the coarse nodes, which every finer grid contains.
pub fn richardson_check(problem: &ExitProblem, refinements: usize) -> Result<RichardsonReport> {
    if refinements == 0 {
        return Err(Error::Precondition(
            "richardson_check needs at least one refinement".into(),
        ));
    }
    let base = problem.grid;
    let mut solutions: Vec<SolveResult> = Vec::with_capacity(refinements + 1);
    let mut grid = base;
    for level in 0..=refinements {
        if level > 0 {
            grid = grid.refined()?;
        }
        solutions.push(problem.with_grid(grid).solve()?);
    }

    let levels: Vec<RichardsonLevel> = solutions
        .windows(2)
        .map(|w| {
            let max_diff = base
                .interior_abscissae()
                .iter()
                .map(|&x| (w[0].value_at(x) - w[1].value_at(x)).abs())
                .fold(0.0, f64::max);
            RichardsonLevel {
                h: w[0].grid.h(),
                max_diff,
            }
        })
        .collect();
    let orders = levels
        .windows(2)
        .map(|w| (w[0].max_diff / w[1].max_diff).log2())
        .collect();
    Ok(RichardsonReport { levels, orders })
}
