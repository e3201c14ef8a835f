use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{ProblemKind, ESCAPE_EXCURSION_LIMIT, MET_NEGATIVE_LIMIT};
use crate::error::{Error, Result};
use crate::grid::Grid;

/// Square system over the interior nodes; row `r` belongs to node
/// `j = a/h + 1 + r`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSystem {
    grid: Grid,
    kind: ProblemKind,
    matrix: DMatrix<f64>,
    rhs: DVector<f64>,
}

impl DenseSystem {
    /// Checks shape, finiteness and nonzero diagonal.
    pub fn new(grid: Grid, kind: ProblemKind, matrix: DMatrix<f64>, rhs: DVector<f64>) -> Result<Self> {
        let n = grid.interior_len();
        if matrix.nrows() != n || matrix.ncols() != n || rhs.len() != n {
            return Err(Error::Assembly(format!(
                "system shape {}x{} with rhs {} does not match {n} interior nodes",
                matrix.nrows(),
                matrix.ncols(),
                rhs.len()
            )));
        }
        for r in 0..n {
            let j = grid.left() + 1 + r as i64;
            if matrix.row(r).iter().any(|v| !v.is_finite()) || !rhs[r].is_finite() {
                return Err(Error::Assembly(format!(
                    "row for x = {} has non-finite entries",
                    grid.x(j)
                )));
            }
            if matrix[(r, r)] == 0.0 {
                return Err(Error::Assembly(format!("zero diagonal in row for x = {}", grid.x(j))));
            }
        }
        Ok(Self {
            grid,
            kind,
            matrix,
            rhs,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn rhs(&self) -> &DVector<f64> {
        &self.rhs
    }

    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    /// Grid index of row `r`.
    pub fn index_of_row(&self, r: usize) -> i64 {
        self.grid.left() + 1 + r as i64
    }

    /// Row of grid index `j`, if `j` is interior.
    pub fn row_of(&self, j: i64) -> Option<usize> {
        self.grid
            .interior()
            .contains(&j)
            .then(|| (j - self.grid.left() - 1) as usize)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveDiagnostics {
    pub h: f64,
    pub unknowns: usize,
    /// `‖Ax − b‖∞ / ‖b‖∞` (absolute when `b = 0`), before clamping.
    pub residual: f64,
    /// Values moved back into the admissible range.
    pub clamped: usize,
    /// Largest distance outside the admissible range before clamping.
    pub max_excursion: f64,
    pub min_pivot: f64,
    pub max_pivot: f64,
    /// `‖A‖₁ ‖A⁻¹‖₁`.
    pub condition_1norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub kind: ProblemKind,
    pub grid: Grid,
    /// Interior abscissae `x_j`.
    pub abscissae: Vec<f64>,
    pub values: Vec<f64>,
    /// Value on `(−∞, a]`.
    pub exterior_left: f64,
    /// Value on `[b, ∞)`.
    pub exterior_right: f64,
    pub diagnostics: SolveDiagnostics,
}

impl SolveResult {
    /// Piecewise-linear interpolant, extended by the exterior data.
    pub fn value_at(&self, x: f64) -> f64 {
        let g = &self.grid;
        if x <= g.a() {
            return self.exterior_left;
        }
        if x >= g.b() {
            return self.exterior_right;
        }
        let mut t = (x - g.a()) / g.h();
        if (t - t.round()).abs() < 1e-9 {
            t = t.round();
        }
        let i = (t.floor() as usize).min(self.values.len());
        let frac = t - i as f64;
        let node = |i: usize| -> f64 {
            if i == 0 {
                self.exterior_left
            } else if i > self.values.len() {
                self.exterior_right
            } else {
                self.values[i - 1]
            }
        };
        if frac == 0.0 {
            node(i)
        } else {
            node(i) * (1.0 - frac) + node(i + 1) * frac
        }
    }
}

/// LU with partial pivoting, followed by the range policy of the problem
/// kind.
pub fn solve_dense(system: &DenseSystem) -> Result<SolveResult> {
    let n = system.dim();
    let a = system.matrix();
    let lu = a.clone().lu();
    let pivots = lu.u().diagonal().map(f64::abs);
    let (mut min_pivot, mut min_row) = (f64::INFINITY, 0);
    for (r, &p) in pivots.iter().enumerate() {
        if p < min_pivot {
            min_pivot = p;
            min_row = r;
        }
    }
    let max_pivot = pivots.max();
    if min_pivot.partial_cmp(&(max_pivot * n as f64 * f64::EPSILON)) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::Numerical(format!(
            "matrix is singular or numerically rank deficient: pivot {min_pivot:e} at elimination step {min_row}, largest pivot {max_pivot:e}"
        )));
    }
    let x = lu
        .solve(system.rhs())
        .ok_or_else(|| Error::Numerical("LU back substitution failed".into()))?;
    let condition_1norm = match lu.try_inverse() {
        Some(inv) => norm_1(a) * norm_1(&inv),
        None => f64::INFINITY,
    };

    let r = a * &x - system.rhs();
    let bnorm = system.rhs().amax();
    let residual = if bnorm > 0.0 { r.amax() / bnorm } else { r.amax() };
    if !residual.is_finite() || x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("solution is not finite".into()));
    }

    let grid = *system.grid();
    let kind = system.kind();
    let mut values: Vec<f64> = x.iter().copied().collect();
    let (lo, hi, limit) = match kind {
        ProblemKind::EscapeLeft => (0.0, 1.0, ESCAPE_EXCURSION_LIMIT),
        ProblemKind::MeanExitTime => (0.0, f64::INFINITY, MET_NEGATIVE_LIMIT),
        ProblemKind::Dirichlet { .. } => (f64::NEG_INFINITY, f64::INFINITY, f64::INFINITY),
    };
    let mut clamped = 0;
    let mut max_excursion: f64 = 0.0;
    for (i, v) in values.iter_mut().enumerate() {
        let excursion = (lo - *v).max(*v - hi);
        if excursion > 0.0 {
            if excursion > limit {
                return Err(Error::Numerical(format!(
                    "{} value {v} at x = {} lies {excursion:e} outside [{lo}, {hi}]",
                    kind.label(),
                    grid.x(grid.left() + 1 + i as i64)
                )));
            }
            max_excursion = max_excursion.max(excursion);
            *v = v.clamp(lo, hi);
            clamped += 1;
        }
    }

    Ok(SolveResult {
        kind,
        grid,
        abscissae: grid.interior_abscissae(),
        values,
        exterior_left: kind.left_value(),
        exterior_right: kind.right_value(),
        diagnostics: SolveDiagnostics {
            h: grid.h(),
            unknowns: n,
            residual,
            clamped,
            max_excursion,
            min_pivot,
            max_pivot,
            condition_1norm,
        },
    })
}

fn norm_1(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}
