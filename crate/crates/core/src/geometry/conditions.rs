//! Grid certification of the geometric hypotheses on σ.
//!
//! The conditions are inequalities on `(log σ)''`/`(log σ)'''` and `σ'`
//! evaluated on a uniform grid over `(δ₀, R]` with an inner cutoff
//! `δ₀ = R/(10·grid)` that keeps the coordinate singularity at the origin out
//! of the quotient formulas. A passing report is a grid-level witness, not a
//! proof.

use super::factor::log_sigma_derivs;
use super::Ball;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Default number of grid points for condition checks.
pub const DEFAULT_CONDITION_GRID: usize = 2048;

/// Which inequality to test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Condition {
    /// Necessary condition for strong convexity: `σ' > 0` on `(0, R)`.
    C2Necessary,
    /// `(log σ)'' ≤ 0` for `α ∈ (0, 1)`, strict `< 0` for `α ∈ {0, 1}`.
    Eq11 { alpha: f64 },
    /// `(log σ)'' ≤ -α λ₁/(N-1)` for some `α ∈ (0, 1)`.
    Eq12 { alpha: f64, lambda1: f64 },
    /// `(log σ)'' < 0` and `(log σ)''' ≥ 0`.
    Eq13,
}

impl Condition {
    pub fn id(&self) -> String {
        match self {
            Condition::C2Necessary => "C2-necessary".into(),
            Condition::Eq11 { alpha } => format!("Eq11(alpha={alpha})"),
            Condition::Eq12 { alpha, lambda1 } => format!("Eq12(alpha={alpha}, lambda1={lambda1})"),
            Condition::Eq13 => "Eq13".into(),
        }
    }
}

/// Outcome of a condition check.
///
/// `worst_margin` is the most adverse value of the tested inequality over the
/// grid: for `σ' > 0` it is the minimum of `σ'` (positive when the condition
/// holds); for the `≤ 0` conditions it is the supremum of the left-hand side
/// (negative when the condition holds). For Eq13 it is the pointwise maximum
/// of `(log σ)''` and `-(log σ)'''`, maximized over the grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: String,
    pub holds: bool,
    pub worst_margin: f64,
    pub worst_radius: f64,
}

/// Evaluate a condition on a uniform grid of `grid_size` points over
/// `[δ₀, R]`, `δ₀ = R/(10·grid_size)`.
pub fn check_condition(ball: &Ball, which: Condition, grid_size: usize) -> Result<ConditionReport> {
    if grid_size < 2 {
        return Err(Error::Domain("condition grid needs at least 2 points".into()));
    }
    match which {
        Condition::Eq11 { alpha } if !(0.0..=1.0).contains(&alpha) => {
            return Err(Error::Domain(format!("Eq11 requires alpha in [0,1], got {alpha}")));
        }
        Condition::Eq12 { alpha, lambda1 } => {
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(Error::Domain(format!("Eq12 requires alpha in (0,1), got {alpha}")));
            }
            if !(lambda1 > 0.0) {
                return Err(Error::Domain(format!("Eq12 requires lambda1 > 0, got {lambda1}")));
            }
        }
        _ => {}
    }

    let r_max = ball.radius();
    let delta0 = r_max / (10.0 * grid_size as f64);
    let n = (ball.dimension() - 1) as f64;

    // (value tested, whether larger is worse)
    let mut worst = f64::NEG_INFINITY;
    let mut worst_r = delta0;
    let mut aux_holds = true; // extra strictness bookkeeping for Eq13

    for i in 0..grid_size {
        let r = delta0 + (r_max - delta0) * i as f64 / (grid_size - 1) as f64;
        let v = match which {
            Condition::C2Necessary => -ball.factor().eval(r)?.d1, // track -σ' so max = worst
            Condition::Eq11 { .. } => log_sigma_derivs(ball.factor(), r)?.1,
            Condition::Eq12 { alpha, lambda1 } => {
                log_sigma_derivs(ball.factor(), r)?.1 + alpha * lambda1 / n
            }
            Condition::Eq13 => {
                let (_, d2, d3) = log_sigma_derivs(ball.factor(), r)?;
                if d3 < 0.0 {
                    aux_holds = false;
                }
                d2.max(-d3)
            }
        };
        if v > worst {
            worst = v;
            worst_r = r;
        }
    }

    let (holds, margin) = match which {
        Condition::C2Necessary => (-worst > 0.0, -worst), // report min σ' itself
        Condition::Eq11 { alpha } => {
            if alpha == 0.0 || alpha == 1.0 {
                (worst < 0.0, worst)
            } else {
                (worst <= 0.0, worst)
            }
        }
        Condition::Eq12 { .. } => (worst <= 0.0, worst),
        Condition::Eq13 => (worst < 0.0 && aux_holds, worst),
    };

    Ok(ConditionReport { condition: which.id(), holds, worst_margin: margin, worst_radius: worst_r })
}
