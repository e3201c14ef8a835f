//! Mean exit time and escape probability for scalar SDEs
//! `dX = f(X) dt + dL_t` driven by asymmetric α-stable Lévy noise with an
//! optional Gaussian component.
//!
//! * [`stable`]: constants, characteristic exponent, density and sampling of
//!   the noise.
//! * [`drift`]: the bistable tumor-growth drift and the [`DriftField`] trait.
//! * [`solver`]: dense finite-difference/quadrature discretization of the
//!   nonlocal exterior problems.
//! * [`montecarlo`]: Euler–Maruyama simulation used as an independent check.
//!
//! ```
//! use std::sync::Arc;
//! use levy_escape::{ExitProblem, Grid, ProblemKind, StableNoiseParams, TumorDrift, TumorParams};
//!
//! let problem = ExitProblem::new(
//!     Grid::new(0.0, 5.0, 0.05)?,
//!     StableNoiseParams::new(1.5, 0.5, 0.0)?,
//!     Arc::new(TumorDrift(TumorParams::new(0.1, 3.0)?)),
//!     ProblemKind::MeanExitTime,
//! );
//! let u = problem.solve()?;
//! assert_eq!(u.values.len(), 99);
//! assert!(u.values.iter().all(|&v| v >= 0.0));
//! # Ok::<(), levy_escape::Error>(())
//! ```

pub mod drift;
pub mod error;
pub mod grid;
pub mod montecarlo;
pub mod solver;
pub mod special;
pub mod stable;

pub use drift::{
    nondimensionalize, potential, steady_states, tumor_drift, DriftField, KineticConstants, SteadyStates, TumorDrift,
    TumorParams, ZeroDrift,
};
pub use error::{Error, Result};
pub use grid::Grid;
pub use montecarlo::{em_step, simulate_exit, ExitStats, LevyIncrements, NoiseVariates, SimConfig};
pub use solver::{
    assemble, assemble_asymmetric_part, assemble_symmetric_part, assemble_symmetric_reference, richardson_check,
    solve_dense, DenseSystem, ExitProblem, PartialOperator, ProblemKind, QuadratureCorrection, RichardsonReport,
    SolveDiagnostics, SolveResult,
};
pub use stable::{
    c_alpha, characteristic_exponent, compensator_drift, gaussian_limit_pdf, generator_exponent, jump_coeffs,
    levy_integrability, sample_stable, stable_pdf, JumpMeasureCoeffs, PdfEvaluation, PdfQuadrature, StableNoiseParams,
    StableSampler,
};
