//! Dense discretization of the nonlocal exterior problems
//!
//! ```text
//! A u = −1 in D, u = 0 on Dᶜ                (mean exit time)
//! A p = 0  in D, p = 1 on (−∞, a], 0 on [b, ∞)   (escape to the left)
//! ```
//!
//! with `A = f ∂ + (d/2) ∂² + ∫ [·(x+y) − ·(x) − 1_{|y|<1} y ∂·(x)] ν(dy)`.
//!
//! The jump integral is split into a symmetric part with weight `C₂` over the
//! whole line and a one-sided part with weight `C₁ − C₂` over `y > 0`. The
//! symmetric part uses central differences and punched-hole trapezoidal sums
//! with the compensator window shrunk to the distance to the nearest
//! boundary; the one-sided part uses first-order upwind differences for the
//! compensator with the direction chosen by the sign of `β`. Both parts are
//! assembled on the index window `a/h ..= b/h`; jumps landing beyond the
//! boundary nodes are integrated in closed form.
//!
//! The mean exit time problem shares every operator row with the escape
//! problem. Only the exterior data differ: zero on both rays, so the
//! exterior-referencing terms drop and the right-hand side is `−1`.

mod assembly;
mod dense;
mod reference;
mod richardson;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::drift::DriftField;
use crate::grid::Grid;
use crate::stable::StableNoiseParams;

pub use assembly::{assemble, assemble_asymmetric_part, assemble_symmetric_part, PartialOperator};
pub use dense::{solve_dense, DenseSystem, SolveDiagnostics, SolveResult};
pub use reference::assemble_symmetric_reference;
pub use richardson::{richardson_check, RichardsonLevel, RichardsonReport};

/// Escape values further than this outside `[0, 1]` fail the solve.
pub const ESCAPE_EXCURSION_LIMIT: f64 = 1e-3;
/// Mean exit time values below `−MET_NEGATIVE_LIMIT` fail the solve.
pub const MET_NEGATIVE_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    /// `u(x) = E τ`, zero exterior data, source `−1`.
    MeanExitTime,
    /// Probability of first exit into `E = (−∞, a]`.
    EscapeLeft,
    /// Generic exterior data `left` on `(−∞, a]`, `right` on `[b, ∞)` and
    /// `A v = source` inside. Used for manufactured-solution checks; no
    /// clamping is applied.
    Dirichlet { left: f64, right: f64, source: f64 },
}

impl ProblemKind {
    /// Value on the left exterior ray `(−∞, a]`.
    pub fn left_value(&self) -> f64 {
        match *self {
            ProblemKind::MeanExitTime => 0.0,
            ProblemKind::EscapeLeft => 1.0,
            ProblemKind::Dirichlet { left, .. } => left,
        }
    }

    /// Value on the right exterior ray `[b, ∞)`.
    pub fn right_value(&self) -> f64 {
        match *self {
            ProblemKind::MeanExitTime | ProblemKind::EscapeLeft => 0.0,
            ProblemKind::Dirichlet { right, .. } => right,
        }
    }

    /// Interior right-hand side before exterior folding.
    pub fn source(&self) -> f64 {
        match *self {
            ProblemKind::MeanExitTime => -1.0,
            ProblemKind::EscapeLeft => 0.0,
            ProblemKind::Dirichlet { source, .. } => source,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ProblemKind::MeanExitTime => "met",
            ProblemKind::EscapeLeft => "escape",
            ProblemKind::Dirichlet { .. } => "dirichlet",
        }
    }
}

/// Which singular-quadrature corrections to add to the punched-hole sums.
///
/// Omitting the node `y = 0` loses a contribution of order `h^{2−α} p″`.
/// The correction terms add it back as a multiple of the centered second
/// difference, with coefficients from the generalized Euler–Maclaurin
/// expansion (Riemann zeta values):
///
/// * symmetric part: `−C₂ ζ(α−1) h^{2−α} p″`;
/// * one-sided part: `−(C₁−C₂)/2 [ζ(α−1) h^{2−α} − σ h (ζ(α) h^{1−α} + 1/(1−α))] p″`,
///   where `σ = +1` for the forward (β < 0) and `−1` for the backward
///   (β ≥ 0) upwind stencil; the bracket's second term removes the leading
///   error of the upwind compensator.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureCorrection {
    /// Plain punched-hole sums.
    None,
    /// Correct the symmetric part only.
    Symmetric,
    /// Correct both parts.
    #[default]
    Full,
}

impl QuadratureCorrection {
    pub fn label(&self) -> &'static str {
        match self {
            QuadratureCorrection::None => "none",
            QuadratureCorrection::Symmetric => "symmetric",
            QuadratureCorrection::Full => "full",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "none" => Some(QuadratureCorrection::None),
            "symmetric" => Some(QuadratureCorrection::Symmetric),
            "full" => Some(QuadratureCorrection::Full),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExitProblem {
    pub grid: Grid,
    pub noise: StableNoiseParams,
    pub drift: Arc<dyn DriftField>,
    pub kind: ProblemKind,
    pub correction: QuadratureCorrection,
}

impl ExitProblem {
    pub fn new(grid: Grid, noise: StableNoiseParams, drift: Arc<dyn DriftField>, kind: ProblemKind) -> Self {
        Self {
            grid,
            noise,
            drift,
            kind,
            correction: QuadratureCorrection::default(),
        }
    }

    pub fn with_correction(mut self, correction: QuadratureCorrection) -> Self {
        self.correction = correction;
        self
    }

    pub fn with_grid(&self, grid: Grid) -> Self {
        Self { grid, ..self.clone() }
    }

    /// Assemble and solve.
    pub fn solve(&self) -> crate::Result<SolveResult> {
        solve_dense(&assemble(self)?)
    }
}
