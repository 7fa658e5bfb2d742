//! Shooting solvers for the radial elliptic Dirichlet problems and the first
//! Dirichlet eigenpair.
//!
//! Rotationally symmetric solutions of `-Δu = F(u)` on `B(R)` reduce to
//!
//! ```text
//! v'' + (N-1)(log σ)' v' + F(v) = 0,   v'(0) = 0,  v(R) = 0,  v > 0 on [0, R)
//! ```
//!
//! The coefficient `(log σ)' ~ 1/r` is never evaluated at the origin: the
//! first step uses the Taylor start `v(h) = v₀ - F(v₀)h²/(2N)`,
//! `v'(h) = -F(v₀)h/N`, which follows from `Δv → N v''(0)` at the pole.
//! Shooting is on `v(0)` for the source problems (the location of the first
//! zero grows with `v₀`) and on `λ` for the eigenvalue problem (the first
//! zero of the `v(0) = 1` trajectory is strictly decreasing in `λ`).

use crate::error::{Error, Result};
use crate::geometry::Ball;
use crate::interp::hermite_cross;
use crate::profile::RadialProfile;

/// Default grid intervals for the shooting integrations.
pub const DEFAULT_GRID: usize = 4096;
/// Default boundary-residual tolerance.
pub const DEFAULT_TOL: f64 = 1e-8;

/// First Dirichlet eigenpair: eigenvalue, eigenfunction profile normalized to
/// `v(0) = 1`, and its Rayleigh quotient as an independent consistency value.
#[derive(Debug, Clone)]
pub struct EigenSolution {
    pub lambda1: f64,
    pub profile: RadialProfile,
    pub rayleigh: f64,
}

/// `(N-1)(log σ)'` precomputed at half-step multiples, so repeated shooting
/// passes over the same grid cost table lookups instead of σ evaluations.
struct DriftTable {
    half_step: f64,
    values: Vec<f64>, // index k holds the drift at r = k·h/2; k = 0 unused
}

impl DriftTable {
    fn build(ball: &Ball, h: f64, max_radius: f64) -> Result<Self> {
        let half = 0.5 * h;
        let n = (max_radius / half).floor() as usize;
        let mut values = Vec::with_capacity(n + 1);
        values.push(f64::NAN); // r = 0 is handled by the Taylor start
        for k in 1..=n {
            values.push(ball.laplacian_drift(k as f64 * half)?);
        }
        Ok(DriftTable { half_step: half, values })
    }

    /// Largest node index (in steps of h) the table covers.
    fn max_step_index(&self) -> usize {
        (self.values.len() - 1) / 2
    }

    #[inline]
    fn at_half_index(&self, k: usize) -> f64 {
        self.values[k]
    }

    fn half_step(&self) -> f64 {
        self.half_step
    }
}

/// Result of one outward integration of the radial ODE.
struct March {
    /// Values at nodes `0..=last` (`last ≤ m`), `r_i = i·h`.
    values: Vec<f64>,
    /// Radius of the first sign change, if one was found (may exceed `R`).
    first_zero: Option<f64>,
}

/// March the ODE outward from the Taylor start with RK4 on the drift table.
/// Integration stops at the first zero of `v`; `m` nodes cover `[0, R]` and
/// the march may continue to the end of the table hunting for the zero.
fn march(
    dimension: u32,
    table: &DriftTable,
    f: &dyn Fn(f64) -> f64,
    v0: f64,
    m: usize,
) -> Result<March> {
    let h = 2.0 * table.half_step();
    let n_dim = dimension as f64;
    let f_checked = |s: f64| -> Result<f64> {
        let value = f(s.max(0.0));
        if value < 0.0 {
            return Err(Error::Contract(format!("nonlinearity F({s}) = {value} < 0")));
        }
        Ok(value)
    };

    let f_origin = f_checked(v0)?;
    let mut values = vec![v0];
    // Taylor start across the origin cell
    let mut v = v0 - f_origin * h * h / (2.0 * n_dim);
    let mut p = -f_origin * h / n_dim;
    values.push(v);
    if v <= 0.0 {
        let u = hermite_cross(v0, 0.0, v, h * p, 0.0);
        return Ok(March { values, first_zero: Some(u * h) });
    }

    let max_i = table.max_step_index();
    for i in 1..max_i {
        // RK4 on (v, p): stage radii are half-step multiples
        let d0 = table.at_half_index(2 * i);
        let dm = table.at_half_index(2 * i + 1);
        let d1 = table.at_half_index(2 * i + 2);

        let k1v = p;
        let k1p = -d0 * p - f_checked(v)?;
        let v2 = v + 0.5 * h * k1v;
        let p2 = p + 0.5 * h * k1p;
        let k2v = p2;
        let k2p = -dm * p2 - f_checked(v2)?;
        let v3 = v + 0.5 * h * k2v;
        let p3 = p + 0.5 * h * k2p;
        let k3v = p3;
        let k3p = -dm * p3 - f_checked(v3)?;
        let v4 = v + h * k3v;
        let p4 = p + h * k3p;
        let k4v = p4;
        let k4p = -d1 * p4 - f_checked(v4)?;

        let v_new = v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        let p_new = p + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);

        if i < m {
            values.push(v_new);
        }
        if v > 0.0 && v_new <= 0.0 {
            let u = hermite_cross(v, h * p, v_new, h * p_new, 0.0);
            return Ok(March { values, first_zero: Some((i as f64 + u) * h) });
        }
        v = v_new;
        p = p_new;
    }
    Ok(March { values, first_zero: None })
}

fn build_table(ball: &Ball, m: usize) -> Result<DriftTable> {
    let h = ball.radius() / m as f64;
    // hunt zeros up to 4R (capped inside the factor domain)
    let max_radius = (4.0 * ball.radius()).min(0.999 * ball.factor().domain_end());
    DriftTable::build(ball, h, max_radius)
}

/// Solve the Dirichlet problem `v'' + (N-1)(log σ)'v' + F(v) = 0` on `[0, R]`
/// by bisection on `v(0)`.
///
/// `F` must be continuous, nonnegative, and positive on `(0, ∞)`. The
/// returned profile has `v > 0` on `[0, R)` and `|v(R)| ≤ tol·v(0)`.
pub fn solve_dirichlet_bvp(
    ball: &Ball,
    f: impl Fn(f64) -> f64,
    tol: f64,
    m: usize,
) -> Result<RadialProfile> {
    solve_named_bvp(ball, &f, tol, m, "dirichlet-bvp")
}

fn solve_named_bvp(
    ball: &Ball,
    f: &dyn Fn(f64) -> f64,
    tol: f64,
    m: usize,
    problem: &str,
) -> Result<RadialProfile> {
    if !(tol > 0.0) || m < 8 {
        return Err(Error::Domain("need tol > 0 and m >= 8".into()));
    }
    let r_max = ball.radius();
    let table = build_table(ball, m)?;
    let zero_of = |v0: f64| -> Result<Option<f64>> {
        Ok(march(ball.dimension(), &table, f, v0, m)?.first_zero)
    };

    // bracket: first zero below R for small v0, beyond R for large v0
    let mut lo = 1e-8;
    match zero_of(lo)? {
        Some(z) if z < r_max => {}
        _ => {
            return Err(Error::Bracket(
                "shooting map has no sign change over [1e-8, v_hi]: first zero of the \
                 v(0)=1e-8 trajectory already reaches R"
                    .into(),
            ))
        }
    }
    let mut hi = 1.0;
    let mut grow = 0;
    while matches!(zero_of(hi)?, Some(z) if z < r_max) {
        hi *= 2.0;
        grow += 1;
        if grow > 60 {
            return Err(Error::Bracket("no v(0) with first zero beyond R up to 2^60".into()));
        }
    }

    let mut result: Option<March> = None;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let run = march(ball.dimension(), &table, f, mid, m)?;
        match run.first_zero {
            Some(z) if z < r_max => lo = mid,
            _ => {
                // first zero at or beyond R: v > 0 on the whole grid
                let residual = run.values[m].abs();
                if residual <= tol * mid {
                    result = Some(run);
                    break;
                }
                hi = mid;
            }
        }
        if (hi - lo) <= 1e-16 * hi {
            break;
        }
    }
    let run = result.ok_or_else(|| {
        Error::SolverFailure(format!(
            "v(0) bisection stalled before reaching |v(R)| <= {tol}·v(0)"
        ))
    })?;

    let v0 = run.values[0];
    let mut values = run.values;
    let residual = values[m].abs();
    values[m] = 0.0; // pin the Dirichlet node; the achieved miss is recorded
    let mut profile = RadialProfile::new(r_max, values, problem)?;
    profile.boundary_residual = residual;
    profile.shooting_parameter = v0;
    Ok(profile)
}

/// Solve problem `-Δu = λ u^γ` (`λ > 0`, `0 ≤ γ < 1`).
///
/// `γ = 1` is the eigenvalue problem: solvable only at `λ = λ₁`, so it is
/// rejected here with a pointer to [`first_eigenpair`].
pub fn solve_power_bvp(
    ball: &Ball,
    lambda: f64,
    gamma: f64,
    tol: f64,
    m: usize,
) -> Result<RadialProfile> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("lambda = {lambda} must be positive")));
    }
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::Domain(format!("gamma = {gamma} outside [0, 1]")));
    }
    if gamma == 1.0 {
        return Err(Error::Domain(
            "gamma = 1 is the eigenvalue problem, solvable only at lambda = lambda_1; \
             use first_eigenpair"
                .into(),
        ));
    }
    solve_named_bvp(ball, &move |s: f64| lambda * s.powf(gamma), tol, m, "power-bvp")
}

/// First zero of the `v(0) = 1` trajectory of `v'' + (N-1)(log σ)'v' + λv = 0`,
/// hunted up to `4R`. This is the Sturm shooting map used by
/// [`first_eigenpair`]; exposed for monotonicity diagnostics.
pub fn eigen_first_zero(ball: &Ball, lambda: f64, m: usize) -> Result<Option<f64>> {
    let table = build_table(ball, m)?;
    Ok(march(ball.dimension(), &table, &|s| lambda * s, 1.0, m)?.first_zero)
}

/// First Dirichlet eigenpair by bisection on `λ`: the first zero `z(λ)` of
/// the normalized trajectory decreases strictly in `λ`; bisection stops when
/// `|z(λ) - R| ≤ tol·R`.
pub fn first_eigenpair(ball: &Ball, tol: f64, m: usize) -> Result<EigenSolution> {
    if !(tol > 0.0) || m < 8 {
        return Err(Error::Domain("need tol > 0 and m >= 8".into()));
    }
    let r_max = ball.radius();
    let table = build_table(ball, m)?;
    let run_at = |lambda: f64| -> Result<March> {
        march(ball.dimension(), &table, &|s| lambda * s, 1.0, m)
    };

    let mut lo = 1e-6;
    if matches!(run_at(lo)?.first_zero, Some(z) if z <= r_max) {
        return Err(Error::Bracket("eigenvalue below the 1e-6 search floor".into()));
    }
    let mut hi = 1.0;
    let mut grow = 0;
    loop {
        match run_at(hi)?.first_zero {
            Some(z) if z < r_max => break,
            _ => {
                hi *= 2.0;
                grow += 1;
                if grow > 60 {
                    return Err(Error::Bracket("no eigenvalue bracket up to 2^60".into()));
                }
            }
        }
    }

    let mut best: Option<(f64, March)> = None;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let run = run_at(mid)?;
        match run.first_zero {
            Some(z) => {
                if (z - r_max).abs() <= tol * r_max {
                    best = Some((mid, run));
                    break;
                }
                if z < r_max {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            None => lo = mid,
        }
        if (hi - lo) <= 1e-15 * hi {
            return Err(Error::SolverFailure(
                "lambda bracket collapsed before |z - R| <= tol·R; tol is below the \
                 integrator resolution"
                    .into(),
            ));
        }
    }
    let (lambda1, run) = best.ok_or_else(|| {
        Error::SolverFailure("eigenvalue bisection did not converge in 200 iterations".into())
    })?;

    // the trajectory may cross zero inside the last cell; clip to the grid
    let mut values = run.values;
    values.resize(m + 1, 0.0);
    let residual = values[m].abs();
    values[m] = 0.0;
    let mut profile = RadialProfile::new(r_max, values, "eigenfunction")?;
    profile.boundary_residual = residual;
    profile.shooting_parameter = lambda1;

    let rayleigh = rayleigh_quotient(ball, &profile)?;
    if (rayleigh - lambda1).abs() / lambda1 > 1e-4 {
        return Err(Error::SolverFailure(format!(
            "Rayleigh quotient {rayleigh} disagrees with shooting eigenvalue {lambda1}"
        )));
    }
    Ok(EigenSolution { lambda1, profile, rayleigh })
}

/// `∫ v'² σ^{N-1} dr / ∫ v² σ^{N-1} dr` on the profile grid (trapezoid rule;
/// the weight vanishes at the origin).
pub fn rayleigh_quotient(ball: &Ball, profile: &RadialProfile) -> Result<f64> {
    let m = profile.intervals();
    let h = profile.step();
    let n_dim = ball.dimension();
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..=m {
        let weight = if i == 0 {
            0.0
        } else {
            ball.factor().eval(profile.r(i))?.sigma.powi(n_dim as i32 - 1)
        };
        let trap = if i == 0 || i == m { 0.5 } else { 1.0 };
        let v = profile.values()[i];
        let dv = profile.deriv1(i);
        num += trap * weight * dv * dv;
        den += trap * weight * v * v;
    }
    let _ = h; // common factor cancels
    Ok(num / den)
}

/// `λ₁(K, R, N)`: first Dirichlet eigenvalue of the radius-`R` ball in the
/// constant-curvature model. For `K > 0` requires `R ≤ π/(2√K)`.
pub fn eigenvalue_space_form(curvature: f64, radius: f64, dimension: u32, tol: f64) -> Result<f64> {
    let ball = Ball::space_form(dimension, radius, curvature)?;
    Ok(first_eigenpair(&ball, tol, DEFAULT_GRID)?.lambda1)
}
