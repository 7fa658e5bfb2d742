//! The admissible-α threshold `A(σ, R, N)`, curvature bounds of the radial
//! sectional curvature, and the eigenvalue comparison against the
//! constant-curvature model.
//!
//! `A(σ, R, N) = (N-1)/λ₁ · inf_{(0,R)} (-(log σ)'')`: the eigenfunction is
//! strictly α-concave for every `0 < α ≤ A`. For a space form the infimum is
//! `1/σ_K(R)²`, giving the closed form `(N-1)/(λ₁ σ_K(R)²)`; at `K = 0` this
//! collapses to `(N-1)/j²_{(N-2)/2}` independently of `R`.

use crate::elliptic::{eigenvalue_space_form, first_eigenpair, DEFAULT_GRID};
use crate::error::{Error, Result};
use crate::geometry::{log_sigma_derivs, Ball};
use crate::special::bessel_first_zero;
use serde::{Deserialize, Serialize};

/// Threshold report: the largest admissible power `A`, where the infimum is
/// attained, the curvature window, and the Cheng comparison outcome.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThresholdReport {
    /// `A(σ, R, N)`; nonpositive means no admissible α exists.
    pub alpha_max: f64,
    pub lambda1_used: f64,
    /// Radius attaining the infimum of `-(log σ)''`.
    pub inf_point: f64,
    /// `(K_min(R), K_max(R))` of the radial sectional curvature.
    pub curvature_bounds: (f64, f64),
    /// Whether `λ₁(B(R)) ≥ λ₁(K_max(R), R, N)` held (within tolerance).
    pub cheng_ok: bool,
    /// `alpha_max > 0`.
    pub admissible: bool,
}

/// Both sides of the Cheng comparison.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChengReport {
    pub ok: bool,
    pub lambda1_ball: f64,
    pub lambda1_model: f64,
    pub k_max: f64,
}

/// Grid infimum of `-(log σ)''` over `(δ₀, R]` with `δ₀ = R/(10·grid)`.
fn inf_neg_log_sigma_dd(ball: &Ball, grid: usize) -> Result<(f64, f64)> {
    let r_max = ball.radius();
    let delta0 = r_max / (10.0 * grid as f64);
    let mut best = f64::INFINITY;
    let mut at = delta0;
    for i in 0..grid {
        let r = delta0 + (r_max - delta0) * i as f64 / (grid - 1) as f64;
        let (_, d2, _) = log_sigma_derivs(ball.factor(), r)?;
        if -d2 < best {
            best = -d2;
            at = r;
        }
    }
    Ok((best, at))
}

/// `A(σ, R, N)` from a supplied `λ₁` (typically [`first_eigenpair`]).
pub fn alpha_threshold(ball: &Ball, lambda1: f64, grid: usize) -> Result<ThresholdReport> {
    if !(lambda1 > 0.0) {
        return Err(Error::Domain(format!("lambda1 = {lambda1} must be positive")));
    }
    if grid < 2 {
        return Err(Error::Domain("threshold grid needs at least 2 points".into()));
    }
    let (inf_val, inf_point) = inf_neg_log_sigma_dd(ball, grid)?;
    let n = ball.dimension() as f64;
    let alpha_max = (n - 1.0) / lambda1 * inf_val;
    let bounds = curvature_bounds(ball, grid)?;
    let cheng = cheng_check_with(ball, lambda1, 1e-5)?;
    Ok(ThresholdReport {
        alpha_max,
        lambda1_used: lambda1,
        inf_point,
        curvature_bounds: bounds,
        cheng_ok: cheng.ok,
        admissible: alpha_max > 0.0,
    })
}

/// Extrema of the radial sectional curvature `-σ''/σ` over `[0, R]`: grid
/// values plus the Taylor limit `-σ'''(0)` at the origin.
pub fn curvature_bounds(ball: &Ball, grid: usize) -> Result<(f64, f64)> {
    let r_max = ball.radius();
    let delta0 = r_max / (10.0 * grid as f64);
    // r → 0 limit by l'Hôpital: σ(0) = σ''(0) = 0, σ'(0) = 1
    let origin = -ball.factor().eval(1e-7 * r_max)?.d3;
    let mut lo = origin;
    let mut hi = origin;
    for i in 0..grid {
        let r = delta0 + (r_max - delta0) * i as f64 / (grid - 1) as f64;
        let j = ball.factor().eval(r)?;
        let k = -j.d2 / j.sigma;
        lo = lo.min(k);
        hi = hi.max(k);
    }
    Ok((lo, hi))
}

/// Cheng comparison `λ₁(B(R)) ≥ λ₁(K_max(R), R, N)`, both sides computed by
/// the eigenvalue shooter.
pub fn cheng_check(ball: &Ball, tol: f64) -> Result<ChengReport> {
    let lambda1 = first_eigenpair(ball, 1e-9, DEFAULT_GRID)?.lambda1;
    cheng_check_with(ball, lambda1, tol)
}

fn cheng_check_with(ball: &Ball, lambda1_ball: f64, tol: f64) -> Result<ChengReport> {
    let (_, k_max) = curvature_bounds(ball, 2048)?;
    if k_max > 0.0 {
        let rk = crate::geometry::convexity_radius_space_form(k_max);
        if ball.radius() > rk {
            return Err(Error::Unsupported(format!(
                "comparison model K_max = {k_max} only covers radii up to {rk}"
            )));
        }
    }
    let lambda1_model = eigenvalue_space_form(k_max, ball.radius(), ball.dimension(), 1e-9)?;
    let ok = lambda1_ball >= lambda1_model - tol * lambda1_model.max(lambda1_ball);
    Ok(ChengReport { ok, lambda1_ball, lambda1_model, k_max })
}

/// Small-ball threshold `(N-1)/λ₁(0, 1, N) = (N-1)/j²_{(N-2)/2}`: powers below
/// it are admissible on all sufficiently small balls of any geometry.
pub fn small_ball_threshold(dimension: u32) -> Result<f64> {
    if dimension < 2 {
        return Err(Error::Domain(format!("dimension {dimension} < 2")));
    }
    let j = bessel_first_zero((dimension as f64 - 2.0) / 2.0)?;
    Ok((dimension as f64 - 1.0) / (j * j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::WarpedFactor;
    use approx::assert_relative_eq;

    /// Space forms: the grid threshold equals the closed form
    /// `(N-1)/(λ₁ σ_K(R)²)`.
    #[test]
    fn space_form_threshold_matches_closed_form() {
        for (k, r, n) in [(0.0, 1.0, 2u32), (-1.0, 1.0, 2), (-1.0, 0.5, 3)] {
            let ball = Ball::space_form(n, r, k).unwrap();
            let lambda1 = first_eigenpair(&ball, 1e-9, 2048).unwrap().lambda1;
            let rep = alpha_threshold(&ball, lambda1, 2048).unwrap();
            let sigma_r = ball.factor().eval(r).unwrap().sigma;
            let closed = (n as f64 - 1.0) / (lambda1 * sigma_r * sigma_r);
            assert_relative_eq!(rep.alpha_max, closed, max_relative = 1e-6);
            assert!(rep.admissible);
            assert!(rep.cheng_ok);
            // the infimum of 1/σ² sits at the boundary
            assert_relative_eq!(rep.inf_point, r, max_relative = 1e-3);
        }
    }

    /// Flat space: `A = (N-1)/j²_{(N-2)/2}`, independent of R.
    #[test]
    fn flat_threshold_is_r_independent() {
        let expect2 = 1.0 / bessel_first_zero(0.0).unwrap().powi(2);
        for &r in &[0.5, 1.0, 2.0] {
            let ball = Ball::space_form(2, r, 0.0).unwrap();
            let lambda1 = first_eigenpair(&ball, 1e-9, 2048).unwrap().lambda1;
            let rep = alpha_threshold(&ball, lambda1, 2048).unwrap();
            assert_relative_eq!(rep.alpha_max, expect2, max_relative = 1e-6);
        }
        assert_relative_eq!(expect2, 0.17290, max_relative = 1e-4);
    }

    #[test]
    fn small_ball_values() {
        assert_relative_eq!(small_ball_threshold(2).unwrap(), 0.17290, max_relative = 1e-4);
        assert_relative_eq!(
            small_ball_threshold(3).unwrap(),
            2.0 / std::f64::consts::PI.powi(2),
            max_relative = 1e-9
        );
        for n in 2..=10 {
            let v = small_ball_threshold(n).unwrap();
            assert!(v.is_finite() && v > 0.0);
        }
    }

    #[test]
    fn curvature_bounds_space_form_and_cubic() {
        let ball = Ball::space_form(3, 1.0, -1.0).unwrap();
        let (lo, hi) = curvature_bounds(&ball, 1024).unwrap();
        assert_relative_eq!(lo, -1.0, max_relative = 1e-8);
        assert_relative_eq!(hi, -1.0, max_relative = 1e-8);

        // σ = r + cr³ has K(r) = -6c/(1 + cr²), monotone from -6c at the
        // origin to -6c/(1 + cR²) at the boundary
        let ball = Ball::new(2, 1.0, WarpedFactor::cubic_perturbed(0.1)).unwrap();
        let (lo, hi) = curvature_bounds(&ball, 2048).unwrap();
        assert_relative_eq!(lo, -0.6, max_relative = 1e-6);
        assert_relative_eq!(hi, -6.0 * 0.1 / 1.1, max_relative = 1e-6);

        let ball = Ball::new(3, 1.0, WarpedFactor::cubic_perturbed(-0.05)).unwrap();
        let (lo, hi) = curvature_bounds(&ball, 2048).unwrap();
        assert_relative_eq!(lo, 0.3, max_relative = 1e-6);
        assert_relative_eq!(hi, 6.0 * 0.05 / 0.95, max_relative = 1e-6);
    }

    /// Space forms meet Cheng with equality; pinched negative curvature is
    /// strict.
    #[test]
    fn cheng_comparison() {
        let ball = Ball::space_form(2, 1.0, -1.0).unwrap();
        let rep = cheng_check(&ball, 1e-5).unwrap();
        assert!(rep.ok);
        assert_relative_eq!(rep.lambda1_ball, rep.lambda1_model, max_relative = 1e-4);

        let ball = Ball::new(2, 1.0, WarpedFactor::cubic_perturbed(0.1)).unwrap();
        let rep = cheng_check(&ball, 1e-5).unwrap();
        assert!(rep.ok);
        assert!(
            rep.lambda1_ball > rep.lambda1_model * (1.0 + 1e-4),
            "negatively pinched curvature should give strict inequality: {} vs {}",
            rep.lambda1_ball,
            rep.lambda1_model
        );

        let ball = Ball::new(3, 1.0, WarpedFactor::cubic_perturbed(-0.02)).unwrap();
        let rep = cheng_check(&ball, 1e-5).unwrap();
        assert!(rep.ok);
    }

    /// Appendix estimate: A ≤ (N-1)/λ₁(K_max) · (K_max - K_min + 1/σ(R)²).
    #[test]
    fn threshold_bounded_by_curvature_window() {
        for factor in [
            WarpedFactor::space_form(0.0),
            WarpedFactor::space_form(-1.0),
            WarpedFactor::cubic_perturbed(0.1),
            WarpedFactor::cubic_perturbed(-0.05),
        ] {
            let ball = Ball::new(2, 1.0, factor).unwrap();
            let lambda1 = first_eigenpair(&ball, 1e-9, 2048).unwrap().lambda1;
            let rep = alpha_threshold(&ball, lambda1, 2048).unwrap();
            let (k_min, k_max) = rep.curvature_bounds;
            let lambda_model =
                eigenvalue_space_form(k_max, 1.0, 2, 1e-9).unwrap();
            let sigma_r = ball.factor().eval(1.0).unwrap().sigma;
            let bound = 1.0 / lambda_model * (k_max - k_min + 1.0 / (sigma_r * sigma_r));
            assert!(
                rep.alpha_max <= bound * (1.0 + 1e-8),
                "estimate violated: A = {} > {}",
                rep.alpha_max,
                bound
            );
        }
    }

    /// Small-ball limit: A(σ, R, N) → (N-1)/λ₁(0,1,N) as R → 0, with
    /// monotone error decay, on a perturbed (non-space-form) factor.
    #[test]
    fn small_ball_limit_on_cubic_factor() {
        let target = small_ball_threshold(2).unwrap();
        let mut errs = Vec::new();
        for &r in &[0.5, 0.25, 0.125] {
            let ball = Ball::new(2, r, WarpedFactor::cubic_perturbed(0.1)).unwrap();
            let lambda1 = first_eigenpair(&ball, 1e-9, 2048).unwrap().lambda1;
            let rep = alpha_threshold(&ball, lambda1, 2048).unwrap();
            errs.push((rep.alpha_max - target).abs());
        }
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "errors should decay: {errs:?}");
        assert!(errs[2] < 0.01 * target);
    }
}
