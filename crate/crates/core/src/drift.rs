//! Deterministic dynamics: the immunized tumor-growth drift and friends.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Anything the solvers can use as the deterministic vector field `f(x)`.
pub trait DriftField: Send + Sync + std::fmt::Debug {
    fn eval(&self, x: f64) -> Result<f64>;

    /// Short description for output metadata.
    fn describe(&self) -> String;
}

/// Dimensionless saturation `θ` and immune-response strength `γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TumorParams {
    theta: f64,
    gamma: f64,
}

impl TumorParams {
    /// Accepts only the bistable window `0 < θ < 1`, `0 < γ < (1+θ)²/(4θ)`.
    pub fn new(theta: f64, gamma: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::domain("theta", theta, "0 < theta < 1"));
        }
        let bound = (1.0 + theta).powi(2) / (4.0 * theta);
        if !(gamma > 0.0 && gamma < bound) {
            return Err(Error::Parameter(format!(
                "gamma = {gamma} violates 0 < gamma < (1+theta)^2/(4 theta) = {bound}"
            )));
        }
        Ok(Self { theta, gamma })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// Raw kinetic constants. The neoplastic transformation step is neglected,
/// so its rate does not appear.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KineticConstants {
    /// Binding rate (day⁻¹).
    pub k1: f64,
    /// Dissociation rate (day⁻¹).
    pub k2: f64,
    /// Conserved immune-cell mass `Y + Z`.
    pub e_total: f64,
    /// Replication rate (day⁻¹).
    pub iota: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyStates {
    /// Tumor-free state.
    pub x1: f64,
    /// Unstable separatrix.
    pub x2: f64,
    /// Stable tumor state.
    pub x3: f64,
}

fn check_pole(x: f64) -> Result<()> {
    if x > -1.0 {
        Ok(())
    } else {
        Err(Error::domain("x", x, "x > -1 (pole of the immune term)"))
    }
}

/// `f(x) = x(1 − θx) − γx/(x + 1)`.
pub fn tumor_drift(x: f64, p: &TumorParams) -> Result<f64> {
    check_pole(x)?;
    Ok(x * (1.0 - p.theta * x) - p.gamma * x / (x + 1.0))
}

/// `U(x) = −x²/2 + θx³/3 + γx − γ ln(x + 1)`, so that `U′ = −f`.
pub fn potential(x: f64, p: &TumorParams) -> Result<f64> {
    check_pole(x)?;
    Ok(-x * x / 2.0 + p.theta * x.powi(3) / 3.0 + p.gamma * x - p.gamma * x.ln_1p())
}

pub fn steady_states(p: &TumorParams) -> Result<SteadyStates> {
    let TumorParams { theta, gamma } = *p;
    let disc = (1.0 + theta).powi(2) - 4.0 * gamma * theta;
    if disc <= 0.0 {
        return Err(Error::Parameter(format!(
            "discriminant (1+theta)^2 - 4 gamma theta = {disc} <= 0: monostable regime"
        )));
    }
    let root = disc.sqrt();
    let x3 = (1.0 - theta + root) / (2.0 * theta);
    // x2 x3 = (γ − 1)/θ; the product form avoids cancellation when x2 is small.
    let x2 = (gamma - 1.0) / (theta * x3);
    if x2 <= 0.0 {
        return Err(Error::Parameter(format!(
            "unstable state x2 = {x2} is not positive (needs gamma > 1)"
        )));
    }
    Ok(SteadyStates { x1: 0.0, x2, x3 })
}

/// `θ = k₂/k₁`, `γ = k₁E/ι`.
pub fn nondimensionalize(k: &KineticConstants) -> Result<TumorParams> {
    for (name, v) in [("k1", k.k1), ("k2", k.k2), ("E", k.e_total), ("iota", k.iota)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Parameter(format!("{name} = {v} must be strictly positive")));
        }
    }
    TumorParams::new(k.k2 / k.k1, k.k1 * k.e_total / k.iota)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TumorDrift(pub TumorParams);

impl DriftField for TumorDrift {
    fn eval(&self, x: f64) -> Result<f64> {
        tumor_drift(x, &self.0)
    }

    fn describe(&self) -> String {
        format!("tumor(theta={}, gamma={})", self.0.theta, self.0.gamma)
    }
}

/// `f ≡ 0`, for validation against closed forms.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ZeroDrift;

impl DriftField for ZeroDrift {
    fn eval(&self, _x: f64) -> Result<f64> {
        Ok(0.0)
    }

    fn describe(&self) -> String {
        "zero".to_string()
    }
}
