use nalgebra::{DMatrix, DVector};

use super::{DenseSystem, ExitProblem, QuadratureCorrection};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::special::{punched_power_sum_finite_part, riemann_zeta};
use crate::stable::jump_coeffs;

/// Operator rows before the exterior data are folded in.
///
/// `coeffs` has one row per interior node and one column per window index
/// `a/h ..= b/h`, so the two boundary nodes appear as the first and last
/// columns. Jumps that land strictly beyond the boundary nodes are integrated
/// in closed form; their coefficients multiply the (constant) exterior value
/// on each ray and live in `left_tail` / `right_tail`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialOperator {
    grid: Grid,
    coeffs: DMatrix<f64>,
    left_tail: DVector<f64>,
    right_tail: DVector<f64>,
}

impl PartialOperator {
    pub fn zeros(grid: Grid) -> Self {
        let n = grid.interior_len();
        let m = (grid.right() - grid.left()) as usize + 1;
        Self {
            grid,
            coeffs: DMatrix::zeros(n, m),
            left_tail: DVector::zeros(n),
            right_tail: DVector::zeros(n),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &DMatrix<f64> {
        &self.coeffs
    }

    pub fn left_tail(&self) -> &DVector<f64> {
        &self.left_tail
    }

    pub fn right_tail(&self) -> &DVector<f64> {
        &self.right_tail
    }

    /// Coefficient of `P_m` in the row of interior node `j`.
    pub fn coeff(&self, j: i64, m: i64) -> f64 {
        self.coeffs[(self.row(j), self.col(m))]
    }

    fn row(&self, j: i64) -> usize {
        debug_assert!(self.grid.interior().contains(&j));
        (j - self.grid.left() - 1) as usize
    }

    fn col(&self, m: i64) -> usize {
        debug_assert!(m >= self.grid.left() && m <= self.grid.right());
        (m - self.grid.left()) as usize
    }

    fn add(&mut self, j: i64, m: i64, v: f64) {
        let (r, c) = (self.row(j), self.col(m));
        self.coeffs[(r, c)] += v;
    }

    /// Apply the window coefficients to samples `P_{a/h} ..= P_{b/h}`.
    /// The exterior tails are not included.
    pub fn apply(&self, window: &[f64]) -> DVector<f64> {
        assert_eq!(window.len(), self.coeffs.ncols(), "window length");
        &self.coeffs * DVector::from_column_slice(window)
    }

    /// Apply the full rows to samples that equal `left` on `(−∞, a]` and
    /// `right` on `[b, ∞)`. The boundary entries of `window` should agree
    /// with those values.
    pub fn apply_with_exterior(&self, window: &[f64], left: f64, right: f64) -> DVector<f64> {
        let mut out = self.apply(window);
        out.axpy(left, &self.left_tail, 1.0);
        out.axpy(right, &self.right_tail, 1.0);
        out
    }

    fn accumulate(&mut self, other: &PartialOperator) {
        self.coeffs += &other.coeffs;
        self.left_tail += &other.left_tail;
        self.right_tail += &other.right_tail;
    }
}

/// Calls `f(k, weight)` for the punched trapezoid `Σ''_{k=lo}^{hi}`: end
/// summands get weight 1/2, `k = 0` is skipped, and a degenerate range
/// contributes nothing.
fn punched_trapezoid(lo: i64, hi: i64, mut f: impl FnMut(i64, f64)) {
    if lo >= hi {
        return;
    }
    for k in lo..=hi {
        if k == 0 {
            continue;
        }
        let w = if k == lo || k == hi { 0.5 } else { 1.0 };
        f(k, w);
    }
}

/// `h / |x_k|^{1+α}` for `k = 0..=n` (entry 0 unused).
fn kernel_table(grid: &Grid, alpha: f64, n: i64) -> Vec<f64> {
    let scale = grid.h().powf(-alpha);
    (0..=n)
        .map(|k| {
            if k == 0 {
                0.0
            } else {
                scale * (k as f64).powf(-1.0 - alpha)
            }
        })
        .collect()
}

/// Coefficients of the symmetric-window compensated sum
/// `h Σ''_{k=−s}^{s} (P_{j+k} − P_j − (P_{j+1} − P_{j−1}) x_k/(2h)) / |x_k|^{1+α}`
/// with `s` the distance in steps from `x_j` to the nearer boundary.
pub(crate) fn compensated_window_row(grid: &Grid, alpha: f64, j: i64) -> Vec<(i64, f64)> {
    let s = (j - grid.left()).min(grid.right() - j);
    let kernel = kernel_table(grid, alpha, s);
    let mut row = Vec::new();
    punched_trapezoid(-s, s, |k, w| {
        let c = w * kernel[k.unsigned_abs() as usize];
        row.push((j + k, c));
        row.push((j, -c));
        let slope = c * k as f64 / 2.0;
        row.push((j + 1, -slope));
        row.push((j - 1, slope));
    });
    row
}

fn check_drift_domain(problem: &ExitProblem, j: i64) -> Result<f64> {
    let x = problem.grid.x(j);
    problem.drift.eval(x).map_err(|e| {
        Error::Assembly(format!(
            "drift {} cannot be evaluated at interior node x = {x}: {e}",
            problem.drift.describe()
        ))
    })
}

/// Second-difference stencil `coef · (P_{j−1} − 2P_j + P_{j+1})`.
fn add_second_difference(op: &mut PartialOperator, j: i64, coef: f64) {
    op.add(j, j - 1, coef);
    op.add(j, j, -2.0 * coef);
    op.add(j, j + 1, coef);
}

/// Drift, diffusion, the `C₂`-weighted jump integral over the whole line
/// and, if requested, its singular-quadrature correction.
///
/// Rows with `j < (a+b)/(2h)` compensate over the window reaching the left
/// boundary, the others over the window reaching the right boundary. Jumps
/// beyond either boundary node are integrated exactly, which produces the
/// killing term `−(C₂/α)[(x−a)^{−α} + (b−x)^{−α}] P_j` and the matching tail
/// coefficients.
pub fn assemble_symmetric_part(problem: &ExitProblem) -> Result<PartialOperator> {
    let grid = problem.grid;
    let alpha = problem.noise.alpha();
    let d = problem.noise.d();
    let c2 = jump_coeffs(&problem.noise).c2;
    let h = grid.h();
    let (left, right, mid) = (grid.left(), grid.right(), grid.mid());
    let kernel = kernel_table(&grid, alpha, right - left);
    let correction = match problem.correction {
        QuadratureCorrection::None => 0.0,
        _ => -c2 * riemann_zeta(alpha - 1.0) * h.powf(-alpha),
    };

    let mut op = PartialOperator::zeros(grid);
    for j in grid.interior() {
        let f = check_drift_domain(problem, j)?;

        add_second_difference(&mut op, j, d / (2.0 * h * h) + correction);
        op.add(j, j + 1, f / (2.0 * h));
        op.add(j, j - 1, -f / (2.0 * h));

        let to_left = (j - left) as f64 * h;
        let to_right = (right - j) as f64 * h;
        let tail_left = c2 / alpha * to_left.powf(-alpha);
        let tail_right = c2 / alpha * to_right.powf(-alpha);
        op.add(j, j, -(tail_left + tail_right));
        let r = op.row(j);
        op.left_tail[r] += tail_left;
        op.right_tail[r] += tail_right;

        // Uncompensated sum over the part of the window beyond the
        // compensator range.
        let (lo, hi) = if j < mid {
            (j - left, right - j)
        } else {
            (left - j, j - right)
        };
        punched_trapezoid(lo, hi, |k, w| {
            let c = c2 * w * kernel[k.unsigned_abs() as usize];
            op.add(j, j + k, c);
            op.add(j, j, -c);
        });

        for (m, c) in compensated_window_row(&grid, alpha, j) {
            op.add(j, m, c2 * c);
        }
    }
    Ok(op)
}

/// The `(C₁ − C₂)`-weighted one-sided integral over `y > 0` with the
/// compensator `1_{y<1}`, discretized with an upwind difference for `p′`:
/// forward for `β < 0`, backward for `β ≥ 0`.
///
/// Rows with `x ≤ b − 1` have the whole compensator range inside the
/// window; for `x > b − 1` the range `(b − x, 1)` falls on the right
/// exterior. Identically zero when `β = 0`.
pub fn assemble_asymmetric_part(problem: &ExitProblem) -> Result<PartialOperator> {
    let grid = problem.grid;
    if grid.b() - grid.a() <= 1.0 {
        return Err(Error::Assembly(format!(
            "b - a = {} must exceed 1; enlarge the domain",
            grid.b() - grid.a()
        )));
    }
    let mut op = PartialOperator::zeros(grid);
    let coeffs = jump_coeffs(&problem.noise);
    let asym = coeffs.asymmetry();
    if asym == 0.0 {
        return Ok(op);
    }
    let alpha = problem.noise.alpha();
    let h = grid.h();
    let unit = grid.unit();
    let right = grid.right();
    let kernel = kernel_table(&grid, alpha, (right - grid.left()).max(unit));
    let forward = problem.noise.beta() < 0.0;
    let sigma = if forward { 1.0 } else { -1.0 };
    // The ζ(α − 1) part mirrors the symmetric correction; the σ part cancels
    // the leading error of the upwind difference. Next to a boundary the
    // solution need not be smooth (for α < 1 not even continuous), so the
    // second difference there is no estimate of p″ and only the first part
    // is kept.
    let (inner, edge) = match problem.correction {
        QuadratureCorrection::Full => {
            let zeta = riemann_zeta(alpha - 1.0) * h.powf(2.0 - alpha);
            let upwind = sigma * h * punched_power_sum_finite_part(alpha, h);
            let scale = -asym / 2.0 / (h * h);
            (scale * (zeta - upwind), scale * zeta)
        }
        _ => (0.0, 0.0),
    };

    // Coefficients of the upwind difference DP_j.
    let upwind = |j: i64| -> [(i64, f64); 2] {
        if forward {
            [(j + 1, 1.0 / h), (j, -1.0 / h)]
        } else {
            [(j, 1.0 / h), (j - 1, -1.0 / h)]
        }
    };

    for j in grid.interior() {
        let r = op.row(j);
        let steps_right = right - j;
        let slope = upwind(j);
        // −DP_j x_k times the sum weight.
        let compensate = |op: &mut PartialOperator, k: i64, c: f64| {
            for (m, s) in slope {
                op.add(j, m, -c * s * k as f64 * h);
            }
        };

        if steps_right >= unit {
            let tail = asym / alpha * (steps_right as f64 * h).powf(-alpha);
            op.add(j, j, -tail);
            op.right_tail[r] += tail;
            punched_trapezoid(unit, steps_right, |k, w| {
                let c = asym * w * kernel[k as usize];
                op.add(j, j + k, c);
                op.add(j, j, -c);
            });
            punched_trapezoid(0, unit, |k, w| {
                let c = asym * w * kernel[k as usize];
                op.add(j, j + k, c);
                op.add(j, j, -c);
                compensate(&mut op, k, c);
            });
        } else {
            let tail = asym / alpha;
            op.add(j, j, -tail);
            op.right_tail[r] += tail;
            // Landing beyond b: the value is the right exterior datum.
            punched_trapezoid(steps_right, unit, |k, w| {
                let c = asym * w * kernel[k as usize];
                op.right_tail[r] += c;
                op.add(j, j, -c);
                compensate(&mut op, k, c);
            });
            punched_trapezoid(0, steps_right, |k, w| {
                let c = asym * w * kernel[k as usize];
                op.add(j, j + k, c);
                op.add(j, j, -c);
                compensate(&mut op, k, c);
            });
        }

        let correction = if j == grid.left() + 1 || j == right - 1 {
            edge
        } else {
            inner
        };
        if correction != 0.0 {
            add_second_difference(&mut op, j, correction);
        }
    }
    Ok(op)
}

/// Full operator with the exterior data of `problem.kind` moved to the
/// right-hand side.
pub fn assemble(problem: &ExitProblem) -> Result<DenseSystem> {
    let mut op = assemble_symmetric_part(problem)?;
    op.accumulate(&assemble_asymmetric_part(problem)?);
    fold_exterior(&op, problem)
}

pub(crate) fn fold_exterior(op: &PartialOperator, problem: &ExitProblem) -> Result<DenseSystem> {
    let grid = op.grid;
    let n = grid.interior_len();
    let last = op.coeffs.ncols() - 1;
    let left = problem.kind.left_value();
    let right = problem.kind.right_value();
    let matrix = op.coeffs.columns(1, n).into_owned();
    let mut rhs = DVector::from_element(n, problem.kind.source());
    for r in 0..n {
        rhs[r] -= (op.coeffs[(r, 0)] + op.left_tail[r]) * left;
        rhs[r] -= (op.coeffs[(r, last)] + op.right_tail[r]) * right;
    }
    DenseSystem::new(grid, problem.kind, matrix, rhs)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use approx::assert_relative_eq;

    use super::*;
    use crate::drift::{TumorDrift, TumorParams, ZeroDrift};
    use crate::solver::ProblemKind;
    use crate::stable::StableNoiseParams;

    fn problem(alpha: f64, beta: f64, d: f64, kind: ProblemKind) -> ExitProblem {
        ExitProblem::new(
            Grid::new(0.0, 5.0, 0.05).unwrap(),
            StableNoiseParams::new(alpha, beta, d).unwrap(),
            Arc::new(TumorDrift(TumorParams::new(0.1, 3.0).unwrap())),
            kind,
        )
    }

    #[test]
    fn punched_trapezoid_weights() {
        let mut seen = Vec::new();
        punched_trapezoid(-2, 3, |k, w| seen.push((k, w)));
        assert_eq!(seen, vec![(-2, 0.5), (-1, 1.0), (1, 1.0), (2, 1.0), (3, 0.5)]);
        let mut count = 0;
        punched_trapezoid(4, 4, |_, _| count += 1);
        assert_eq!(count, 0);
    }

    #[test]
    fn dimension_of_default_system() {
        let sys = assemble(&problem(1.5, 0.5, 0.0, ProblemKind::MeanExitTime)).unwrap();
        assert_eq!(sys.dim(), 99);
        assert_eq!(sys.index_of_row(0), 1);
        assert_eq!(sys.index_of_row(98), 99);
    }

    #[test]
    fn constant_vector_leaves_only_killing_terms() {
        for correction in [QuadratureCorrection::None, QuadratureCorrection::Full] {
            let p = problem(1.5, 0.3, 0.7, ProblemKind::MeanExitTime).with_correction(correction);
            let sym = assemble_symmetric_part(&p).unwrap();
            let asym = assemble_asymmetric_part(&p).unwrap();
            let c = 2.5;
            let window = vec![c; 101];
            let k = jump_coeffs(&p.noise);
            let g = p.grid;
            let out_sym = sym.apply(&window);
            let out_asym = asym.apply(&window);
            for (r, j) in g.interior().enumerate() {
                let x = g.x(j);
                let kill = -(k.c2 / 1.5) * (x.powf(-1.5) + (5.0 - x).powf(-1.5)) * c;
                assert!(
                    (out_sym[r] - kill).abs() < 1e-9 * kill.abs(),
                    "row {j}: {} vs {kill}",
                    out_sym[r]
                );
                let d = k.asymmetry();
                let kill_asym = if x <= 4.0 + 1e-12 {
                    -d * c / (1.5 * (5.0 - x).powf(1.5))
                } else {
                    // x > b − 1: −P/α plus the share of the compensated sum
                    // that lands on the exterior ray.
                    -asym.right_tail()[r] * c
                };
                assert!(
                    (out_asym[r] - kill_asym).abs() < 1e-9 * kill_asym.abs().max(1.0),
                    "row {j}"
                );
            }
            // With the exterior tails included the generator kills constants.
            let full = sym.apply_with_exterior(&window, c, c) + asym.apply_with_exterior(&window, c, c);
            assert!(full.amax() < 1e-8, "{}", full.amax());
        }
    }

    #[test]
    fn linear_vector_compensated_window_vanishes() {
        let g = Grid::new(0.0, 5.0, 0.05).unwrap();
        for j in [1, 7, 30, 50, 77, 99] {
            let total: f64 = compensated_window_row(&g, 1.5, j)
                .into_iter()
                .map(|(m, c)| c * g.x(m))
                .sum();
            assert!(total.abs() < 1e-10, "j = {j}: {total}");
        }
    }

    #[test]
    fn asymmetric_part_vanishes_for_symmetric_noise() {
        let asym = assemble_asymmetric_part(&problem(1.2, 0.0, 0.0, ProblemKind::EscapeLeft)).unwrap();
        assert_eq!(asym.coeffs().amax(), 0.0);
        assert_eq!(asym.right_tail().amax(), 0.0);
    }

    #[test]
    fn opposite_skewness_flips_stencil_and_sign() {
        let plus = assemble_asymmetric_part(
            &problem(1.5, 1.0, 0.0, ProblemKind::EscapeLeft).with_correction(QuadratureCorrection::None),
        )
        .unwrap();
        let minus = assemble_asymmetric_part(
            &problem(1.5, -1.0, 0.0, ProblemKind::EscapeLeft).with_correction(QuadratureCorrection::None),
        )
        .unwrap();
        let g = *plus.grid();
        // Away from the compensator stencil the rows only change sign.
        for j in [10, 40] {
            for m in j + 2..=g.right() {
                assert_relative_eq!(plus.coeff(j, m), -minus.coeff(j, m), max_relative = 1e-12);
            }
            assert!(plus.coeff(j, j - 1) != 0.0);
            assert_eq!(minus.coeff(j, j - 1), 0.0);
        }
    }

    #[test]
    fn escape_boundary_source_for_cauchy_noise() {
        let p = ExitProblem::new(
            Grid::new(0.0, 5.0, 0.05).unwrap(),
            StableNoiseParams::new(1.0, 0.0, 0.0).unwrap(),
            Arc::new(ZeroDrift),
            ProblemKind::EscapeLeft,
        );
        let sym = assemble_symmetric_part(&p).unwrap();
        // x_j = 1 is row 19.
        assert_relative_eq!(-sym.left_tail()[19], -1.0 / std::f64::consts::PI, max_relative = 1e-14);

        let sys = assemble(&p).unwrap();
        let r = 19;
        let expected = -sym.left_tail()[r] - sym.coeffs()[(r, 0)];
        assert_relative_eq!(sys.rhs()[r], expected, max_relative = 1e-14);
    }

    #[test]
    fn mean_exit_rhs_is_minus_one() {
        let sys = assemble(&problem(0.7, -0.4, 0.3, ProblemKind::MeanExitTime)).unwrap();
        assert!(sys.rhs().iter().all(|&v| v == -1.0));
    }

    #[test]
    fn drift_pole_inside_domain_is_rejected() {
        let p = ExitProblem::new(
            Grid::new(-2.0, 2.0, 0.05).unwrap(),
            StableNoiseParams::new(1.5, 0.0, 0.0).unwrap(),
            Arc::new(TumorDrift(TumorParams::new(0.1, 3.0).unwrap())),
            ProblemKind::MeanExitTime,
        );
        let err = assemble(&p).unwrap_err();
        assert!(matches!(err, Error::Assembly(_)), "{err}");
        assert!(err.to_string().contains("x > -1"), "{err}");
    }
}
