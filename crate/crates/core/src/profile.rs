//! Grid functions `v(r)` on `[0, R]`: the shared currency between the
//! elliptic and parabolic solvers and the concavity certifiers.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A radial profile on the uniform grid `r_i = i·R/M`, `i = 0..=M`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadialProfile {
    radius: f64,
    values: Vec<f64>,
    /// Which problem produced this profile (free-form id).
    pub problem: String,
    /// `|v(R)|` actually achieved by the solver.
    pub boundary_residual: f64,
    /// The shooting unknown that produced the profile (`v(0)` or `λ`).
    pub shooting_parameter: f64,
}

impl RadialProfile {
    pub fn new(radius: f64, values: Vec<f64>, problem: impl Into<String>) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::Domain(format!("profile radius {radius} must be positive")));
        }
        if values.len() < 3 {
            return Err(Error::Domain("profile needs at least 3 grid values".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("profile values must be finite".into()));
        }
        let boundary_residual = values.last().unwrap().abs();
        Ok(RadialProfile {
            radius,
            values,
            problem: problem.into(),
            boundary_residual,
            shooting_parameter: f64::NAN,
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Number of intervals `M` (the grid has `M + 1` nodes).
    pub fn intervals(&self) -> usize {
        self.values.len() - 1
    }

    /// Grid spacing `h = R/M`.
    pub fn step(&self) -> f64 {
        self.radius / self.intervals() as f64
    }

    pub fn r(&self, i: usize) -> f64 {
        self.radius * i as f64 / self.intervals() as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn min_interior(&self) -> f64 {
        self.values[1..self.values.len() - 1]
            .iter()
            .fold(f64::INFINITY, |m, &v| m.min(v))
    }

    /// Value at an arbitrary radius by cubic (4-point Lagrange) interpolation.
    pub fn value_at(&self, r: f64) -> f64 {
        let m = self.intervals();
        let h = self.step();
        let x = (r / h).clamp(0.0, m as f64);
        let i = (x.floor() as usize).min(m - 1);
        // 4-point window clamped to the grid
        let start = i.saturating_sub(1).min(m - 3);
        let mut sum = 0.0;
        for j in start..start + 4 {
            let mut lj = 1.0;
            for k in start..start + 4 {
                if k != j {
                    lj *= (x - k as f64) / (j as f64 - k as f64);
                }
            }
            sum += lj * self.values[j];
        }
        sum
    }

    /// Second-order first derivative at node `i` (one-sided at the ends).
    pub fn deriv1(&self, i: usize) -> f64 {
        let m = self.intervals();
        let h = self.step();
        let v = &self.values;
        if i == 0 {
            (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
        } else if i == m {
            (3.0 * v[m] - 4.0 * v[m - 1] + v[m - 2]) / (2.0 * h)
        } else {
            (v[i + 1] - v[i - 1]) / (2.0 * h)
        }
    }

    /// Second-order second derivative at node `i`. At the origin the
    /// symmetric extension `v(-h) = v(h)` is used (`v'(0) = 0` for smooth
    /// rotationally symmetric data).
    pub fn deriv2(&self, i: usize) -> f64 {
        let m = self.intervals();
        let h = self.step();
        let v = &self.values;
        if i == 0 {
            2.0 * (v[1] - v[0]) / (h * h)
        } else if i == m {
            (2.0 * v[m] - 5.0 * v[m - 1] + 4.0 * v[m - 2] - v[m - 3]) / (h * h)
        } else {
            (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (h * h)
        }
    }

    /// Discrete check of the Neumann condition `v'(0) = 0`, scaled by the
    /// profile size: `|v'(0)| ≤ c·h²·scale` for smooth symmetric data.
    pub fn neumann_origin_ok(&self, c: f64) -> bool {
        let scale = self.sup_norm().max(1e-300);
        let h = self.step();
        self.deriv1(0).abs() <= c * h * h * scale / (self.radius * self.radius * self.radius)
            || self.deriv1(0).abs() <= c * h * h * scale
    }
}
