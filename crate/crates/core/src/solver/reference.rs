use nalgebra::{DMatrix, DVector};

use super::{DenseSystem, ExitProblem, QuadratureCorrection};
use crate::error::{Error, Result};
use crate::special::riemann_zeta;
use crate::stable::c_alpha;

/// Symmetric-noise scheme assembled straight from its full-window form.
///
/// For `β = 0` the two half-window sums combine into a single punched
/// trapezoid over every window node `a/h ..= b/h` with half weight at the
/// two boundary nodes, and the compensator sum over the symmetric window is
/// odd in `k`, so it is dropped. The result is already folded against the
/// exterior data. Used as an independent regression baseline.
pub fn assemble_symmetric_reference(problem: &ExitProblem) -> Result<DenseSystem> {
    if problem.noise.beta() != 0.0 {
        return Err(Error::Unsupported(format!(
            "reference assembly needs beta = 0, got {}",
            problem.noise.beta()
        )));
    }
    let g = problem.grid;
    let alpha = problem.noise.alpha();
    let d = problem.noise.d();
    let c = c_alpha(alpha)? / 2.0;
    let h = g.h();
    let n = g.interior_len();
    let left_value = problem.kind.left_value();
    let right_value = problem.kind.right_value();

    let second = d / (2.0 * h * h)
        - match problem.correction {
            QuadratureCorrection::None => 0.0,
            _ => c * riemann_zeta(alpha - 1.0) * h.powf(2.0 - alpha) / (h * h),
        };

    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut rhs = DVector::<f64>::from_element(n, problem.kind.source());
    for r in 0..n {
        let j = g.left() + 1 + r as i64;
        let x = g.x(j);
        let f = problem
            .drift
            .eval(x)
            .map_err(|e| Error::Assembly(format!("drift at x = {x}: {e}")))?;

        let da = (j - g.left()) as f64 * h;
        let db = (g.right() - j) as f64 * h;
        let mut diag = -c / alpha * (da.powf(-alpha) + db.powf(-alpha));
        rhs[r] -= c / alpha * (da.powf(-alpha) * left_value + db.powf(-alpha) * right_value);

        // Neighbour m receives c h w / |x_m − x_j|^{1+α}; the diagonal takes
        // minus the sum.
        for m in g.left()..=g.right() {
            if m == j {
                continue;
            }
            let w = if m == g.left() || m == g.right() { 0.5 } else { 1.0 };
            let dist = ((m - j).abs() as f64) * h;
            let coef = c * w * h / dist.powf(1.0 + alpha);
            diag -= coef;
            if m == g.left() {
                rhs[r] -= coef * left_value;
            } else if m == g.right() {
                rhs[r] -= coef * right_value;
            } else {
                a[(r, (m - g.left() - 1) as usize)] += coef;
            }
        }

        let lower = second - f / (2.0 * h);
        let upper = second + f / (2.0 * h);
        diag -= 2.0 * second;
        if r > 0 {
            a[(r, r - 1)] += lower;
        } else {
            rhs[r] -= lower * left_value;
        }
        if r + 1 < n {
            a[(r, r + 1)] += upper;
        } else {
            rhs[r] -= upper * right_value;
        }
        a[(r, r)] += diag;
    }
    DenseSystem::new(g, problem.kind, a, rhs)
}
