//! Euler–Maruyama simulation of `dX = f(X) dt + dL_t` and exit statistics.
//!
//! Each path draws from its own ChaCha8 stream selected by the path index,
//! so results do not depend on how paths are spread over threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::drift::DriftField;
use crate::error::{Error, Result};
use crate::stable::{compensator_drift, StableNoiseParams, StableSampler};

pub const DEFAULT_MAX_STEPS: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub dt: f64,
    pub n_paths: u64,
    /// Paths still inside after this many steps are censored.
    pub max_steps: u64,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(dt: f64, n_paths: u64, seed: u64) -> Result<Self> {
        let cfg = Self {
            dt,
            n_paths,
            max_steps: DEFAULT_MAX_STEPS,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_max_steps(mut self, max_steps: u64) -> Result<Self> {
        self.max_steps = max_steps;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::domain("dt", self.dt, "dt > 0"));
        }
        if self.n_paths == 0 {
            return Err(Error::Parameter("paths must be at least 1".into()));
        }
        if self.max_steps == 0 {
            return Err(Error::Parameter("max_steps must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExitStats {
    pub n_paths: u64,
    /// Mean exit time over the paths that exited.
    pub met_mean: f64,
    pub met_stderr: f64,
    pub p_left: f64,
    pub p_left_stderr: f64,
    pub p_right: f64,
    pub n_left: u64,
    pub n_right: u64,
    pub n_censored: u64,
}

/// Standard normal and standardized stable variates for one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseVariates {
    pub gaussian: f64,
    pub stable: f64,
}

/// `x + f(x) dt + √(d dt) Z + dt^{1/α} S`.
///
/// `S` must be distributed as `L_dt / dt^{1/α}` for the jump part `L` of the
/// generator; [`LevyIncrements`] draws it.
pub fn em_step(x: f64, dt: f64, drift: &dyn DriftField, noise: &StableNoiseParams, v: NoiseVariates) -> Result<f64> {
    if noise.alpha() == 1.0 {
        return Err(Error::Unsupported(
            "alpha = 1 increments are not simulated; use the solver (met/escape) instead".into(),
        ));
    }
    let f = drift.eval(x)?;
    Ok(x + f * dt + (noise.d() * dt).sqrt() * v.gaussian + dt.powf(1.0 / noise.alpha()) * v.stable)
}

/// Sampler for the standardized jump increment of one time step.
///
/// The generator compensates jumps only on `|y| < 1`, which differs from the
/// centring of `S_α(1, β, 0)` by a constant drift `μ` whenever `β ≠ 0`.
/// Over a step of length `dt` that drift contributes `μ dt`, i.e. a shift of
/// `μ dt^{1 − 1/α}` in standardized units.
#[derive(Debug, Clone, Copy)]
pub struct LevyIncrements {
    sampler: StableSampler,
    shift: f64,
    gaussian: bool,
}

impl LevyIncrements {
    pub fn new(noise: &StableNoiseParams, dt: f64) -> Result<Self> {
        if noise.alpha() == 1.0 {
            return Err(Error::Unsupported(
                "alpha = 1 increments are not simulated; use the solver (met/escape) instead".into(),
            ));
        }
        Ok(Self {
            sampler: StableSampler::new(noise),
            shift: compensator_drift(noise) * dt.powf(1.0 - 1.0 / noise.alpha()),
            gaussian: noise.d() > 0.0,
        })
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> NoiseVariates {
        let gaussian = if self.gaussian { rng.sample(StandardNormal) } else { 0.0 };
        // Open interval keeps cos(v) > 0.
        let u: f64 = loop {
            let u: f64 = rng.random();
            if u > 0.0 {
                break u;
            }
        };
        let v = std::f64::consts::PI * (u - 0.5);
        let w: f64 = rng.sample(Exp1);
        NoiseVariates {
            gaussian,
            stable: self.sampler.sample(v, w) + self.shift,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Outcome {
    Left(u64),
    Right(u64),
    Censored,
}

pub(crate) fn path_rng(seed: u64, path: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path);
    rng
}

fn run_path(
    x0: f64,
    (a, b): (f64, f64),
    drift: &dyn DriftField,
    noise: &StableNoiseParams,
    incr: &LevyIncrements,
    cfg: &SimConfig,
    path: u64,
) -> Result<Outcome> {
    let mut rng = path_rng(cfg.seed, path);
    let mut x = x0;
    let mut steps = 0;
    loop {
        if x <= a {
            return Ok(Outcome::Left(steps));
        }
        if x >= b {
            return Ok(Outcome::Right(steps));
        }
        if steps == cfg.max_steps {
            return Ok(Outcome::Censored);
        }
        x = em_step(x, cfg.dt, drift, noise, incr.draw(&mut rng))?;
        steps += 1;
    }
}

/// Estimate the mean exit time from `(a, b)` and the probability of
/// landing in `(−∞, a]` from `x0`.
pub fn simulate_exit(
    x0: f64,
    domain: (f64, f64),
    drift: &dyn DriftField,
    noise: &StableNoiseParams,
    cfg: &SimConfig,
) -> Result<ExitStats> {
    let (a, b) = domain;
    if a.partial_cmp(&b) != Some(std::cmp::Ordering::Less) {
        return Err(Error::Precondition(format!("domain ({a}, {b}) must satisfy a < b")));
    }
    if !(x0 > a && x0 < b) {
        return Err(Error::Precondition(format!(
            "x0 = {x0} must lie inside the domain ({a}, {b})"
        )));
    }
    simulate_unchecked(x0, domain, drift, noise, cfg)
}

pub(crate) fn simulate_unchecked(
    x0: f64,
    domain: (f64, f64),
    drift: &dyn DriftField,
    noise: &StableNoiseParams,
    cfg: &SimConfig,
) -> Result<ExitStats> {
    cfg.validate()?;
    let incr = LevyIncrements::new(noise, cfg.dt)?;
    let outcomes: Vec<Outcome> = (0..cfg.n_paths)
        .into_par_iter()
        .map(|p| run_path(x0, domain, drift, noise, &incr, cfg, p))
        .collect::<Result<_>>()?;
    aggregate(&outcomes, cfg)
}

fn aggregate(outcomes: &[Outcome], cfg: &SimConfig) -> Result<ExitStats> {
    let (mut n_left, mut n_right) = (0u64, 0u64);
    let (mut sum, mut sum_sq) = (0.0f64, 0.0f64);
    for o in outcomes {
        let steps = match *o {
            Outcome::Left(s) => {
                n_left += 1;
                s
            }
            Outcome::Right(s) => {
                n_right += 1;
                s
            }
            Outcome::Censored => continue,
        };
        let t = steps as f64 * cfg.dt;
        sum += t;
        sum_sq += t * t;
    }
    let n = cfg.n_paths;
    let exited = n_left + n_right;
    if exited == 0 {
        return Err(Error::Numerical(format!(
            "all {n} paths were censored after {} steps; raise max_steps or dt",
            cfg.max_steps
        )));
    }
    let m = exited as f64;
    let met_mean = sum / m;
    let var = if exited > 1 {
        ((sum_sq - m * met_mean * met_mean) / (m - 1.0)).max(0.0)
    } else {
        0.0
    };
    let p_left = n_left as f64 / n as f64;
    Ok(ExitStats {
        n_paths: n,
        met_mean,
        met_stderr: (var / m).sqrt(),
        p_left,
        p_left_stderr: (p_left * (1.0 - p_left) / n as f64).sqrt(),
        p_right: n_right as f64 / n as f64,
        n_left,
        n_right,
        n_censored: n - exited,
    })
}
