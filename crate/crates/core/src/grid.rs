use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Values within this distance of an integer are snapped to it.
pub const SNAP_TOLERANCE: f64 = 1e-9;

/// Uniform grid `x_j = j h` covering `D = (a, b)` and its exterior window.
///
/// `1/h`, `a/h`, `b/h` and `(a+b)/(2h)` must be integers. Only the indices
/// `a/h ..= b/h` are ever referenced by the discretization: the nonlocal sums
/// reach exactly to the boundary nodes, and everything further out is handled
/// by closed-form tail integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    a: f64,
    b: f64,
    h: f64,
    left: i64,
    right: i64,
    mid: i64,
    unit: i64,
}

fn snap(value: f64, what: &str) -> Result<i64> {
    let r = value.round();
    if (value - r).abs() > SNAP_TOLERANCE * value.abs().max(1.0) {
        return Err(Error::Assembly(format!(
            "{what} = {value} is not an integer; choose h so that 1/h, a/h, b/h and (a+b)/(2h) are integers"
        )));
    }
    Ok(r as i64)
}

impl Grid {
    pub fn new(a: f64, b: f64, h: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::Assembly(format!("domain ({a}, {b}) must satisfy a < b")));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Assembly(format!("step h = {h} must be positive")));
        }
        if b - a <= 1.0 {
            return Err(Error::Assembly(format!(
                "b - a = {} must exceed 1 for the one-sided jump split; enlarge the domain",
                b - a
            )));
        }
        let unit = snap(1.0 / h, "1/h")?;
        let left = snap(a / h, "a/h")?;
        let right = snap(b / h, "b/h")?;
        let mid = snap((a + b) / (2.0 * h), "(a+b)/(2h)")?;
        Ok(Self {
            a,
            b,
            h: 1.0 / unit as f64,
            left,
            right,
            mid,
            unit,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Step, snapped to exactly `1 / (1/h)`.
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Index of the left boundary node `a/h`.
    pub fn left(&self) -> i64 {
        self.left
    }

    /// Index of the right boundary node `b/h`.
    pub fn right(&self) -> i64 {
        self.right
    }

    /// Index `(a+b)/(2h)` where the symmetric window switches sides.
    pub fn mid(&self) -> i64 {
        self.mid
    }

    /// Number of steps in a unit length, `1/h`.
    pub fn unit(&self) -> i64 {
        self.unit
    }

    /// Number of interior unknowns `(b−a)/h − 1`.
    pub fn interior_len(&self) -> usize {
        (self.right - self.left - 1) as usize
    }

    /// `j / (1/h)`, which is correctly rounded since `1/h` is an integer.
    pub fn x(&self, j: i64) -> f64 {
        j as f64 / self.unit as f64
    }

    /// Interior indices `a/h + 1 ..= b/h − 1`.
    pub fn interior(&self) -> std::ops::RangeInclusive<i64> {
        self.left + 1..=self.right - 1
    }

    pub fn interior_abscissae(&self) -> Vec<f64> {
        self.interior().map(|j| self.x(j)).collect()
    }

    /// Same domain at half the step.
    pub fn refined(&self) -> Result<Self> {
        Self::new(self.a, self.b, self.h / 2.0)
    }
}
