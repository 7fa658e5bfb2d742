//! Rotationally symmetric balls as warped products: the factor σ, geodesics,
//! curvature, and the inequality conditions on `(log σ)''` and `(log σ)'''`.

mod conditions;
mod factor;
mod geodesic;

pub use conditions::{check_condition, Condition, ConditionReport, DEFAULT_CONDITION_GRID};
pub use factor::{log_sigma_derivs, radial_sectional_curvature, SigmaJet, WarpedFactor};
pub use geodesic::{connect_geodesic, integrate_geodesic, Geodesic, GeodesicSample};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Number of grid points used to verify `σ' > 0` when a ball is constructed.
const CONVEXITY_GRID: usize = 256;

/// The domain `B(R)`: a metric ball of radius `R` in an `N`-dimensional
/// rotationally symmetric manifold with polar factor σ.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Ball {
    dimension: u32,
    radius: f64,
    factor: WarpedFactor,
}

impl Ball {
    /// Construct and validate a ball.
    ///
    /// Checks `N ≥ 2`, `R > 0`, domain containment, the convexity-radius bound
    /// `R ≤ π/(2√K)` for positively curved space forms, and the necessary
    /// strong-convexity condition `σ' > 0` on a verification grid.
    pub fn new(dimension: u32, radius: f64, factor: WarpedFactor) -> Result<Self> {
        if dimension < 2 {
            return Err(Error::Domain(format!("dimension {dimension} < 2")));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Domain(format!("radius {radius} must be positive and finite")));
        }
        if let WarpedFactor::SpaceForm { curvature } = factor {
            let rk = convexity_radius_space_form(curvature);
            if radius > rk {
                return Err(Error::Domain(format!(
                    "radius {radius} exceeds the convexity radius {rk} of the K={curvature} space form"
                )));
            }
        }
        if radius >= factor.domain_end() {
            return Err(Error::Domain(format!(
                "radius {radius} beyond the factor domain ({})",
                factor.domain_end()
            )));
        }
        let ball = Ball { dimension, radius, factor };
        let report = check_condition(&ball, Condition::C2Necessary, CONVEXITY_GRID)?;
        if !report.holds {
            return Err(Error::Domain(format!(
                "sigma' <= 0 at r = {}: ball is not strongly convex",
                report.worst_radius
            )));
        }
        Ok(ball)
    }

    /// Ball of radius `R` in the constant-curvature model `M^N_K`.
    pub fn space_form(dimension: u32, radius: f64, curvature: f64) -> Result<Self> {
        Ball::new(dimension, radius, WarpedFactor::space_form(curvature))
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn factor(&self) -> &WarpedFactor {
        &self.factor
    }

    /// `(N-1)(log σ)'(r)`, the drift coefficient of the radial Laplacian.
    pub fn laplacian_drift(&self, r: f64) -> Result<f64> {
        let (d1, _, _) = log_sigma_derivs(&self.factor, r)?;
        Ok((self.dimension - 1) as f64 * d1)
    }
}

/// Convexity radius of the space form of curvature `K`:
/// `π/(2√K)` on the sphere, `+∞` for `K ≤ 0`.
pub fn convexity_radius_space_form(curvature: f64) -> f64 {
    if curvature > 0.0 {
        std::f64::consts::FRAC_PI_2 / curvature.sqrt()
    } else {
        f64::INFINITY
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn convexity_radius_values() {
        assert_relative_eq!(
            convexity_radius_space_form(4.0),
            std::f64::consts::FRAC_PI_4,
            max_relative = 1e-15
        );
        assert_eq!(convexity_radius_space_form(0.0), f64::INFINITY);
        assert_eq!(convexity_radius_space_form(-1.0), f64::INFINITY);
    }

    #[test]
    fn ball_enforces_convexity_radius() {
        assert!(Ball::space_form(3, 0.8, 4.0).is_err()); // r_K = pi/4 < 0.8
        assert!(Ball::space_form(3, 0.7, 1.0).is_ok());
        assert!(Ball::space_form(3, 100.0, -1.0).is_ok());
    }

    #[test]
    fn ball_rejects_degenerate_input() {
        assert!(Ball::space_form(1, 1.0, 0.0).is_err());
        assert!(Ball::space_form(3, 0.0, 0.0).is_err());
        assert!(Ball::space_form(3, -1.0, 0.0).is_err());
    }

    #[test]
    fn ball_rejects_non_convex_factor() {
        // sigma' = 1 + 3 c r^2 turns negative inside r = 1 for c = -0.5
        assert!(Ball::new(2, 1.0, WarpedFactor::cubic_perturbed(-0.5)).is_err());
        assert!(Ball::new(2, 1.0, WarpedFactor::cubic_perturbed(-0.05)).is_ok());
    }
}
