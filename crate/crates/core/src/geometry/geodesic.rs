//! Geodesics of the 2-D warped section `(a, φ)` with metric `da² + σ(a)²dφ²`.
//!
//! By rotational symmetry every geodesic of the ball lies in such a section,
//! so the geodesic equations reduce to
//!
//! ```text
//! a''  = (φ')² σ(a) σ'(a)
//! φ''  = -2 (σ'(a)/σ(a)) a' φ'
//! ```
//!
//! The quantity `σ(a)² φ'` (the Clairaut constant) and the speed
//! `(a')² + σ(a)²(φ')²` are conserved and serve as built-in error monitors.
//! Curves through the pole are handled by the exact radial representation:
//! the φ equation is singular there and φ itself is undefined at `a = 0`.

use super::Ball;
use crate::error::{Error, Result};
use crate::interp::{hermite, hermite_cross};

/// Relative radius below which a point counts as the pole.
const POLE_FRACTION: f64 = 1e-8;
/// Angles closer than this are treated as equal when routing chord cases.
const ANGLE_EPS: f64 = 1e-12;
/// Coarse probes of the launch angle before bisection.
const SHOOTING_PROBES: usize = 64;

/// One integration node: affine parameter, position, and velocities with
/// respect to the `[0, 1]` parameter.
#[derive(Debug, Clone, Copy)]
pub struct GeodesicSample {
    pub t: f64,
    pub radius: f64,
    pub angle: f64,
    pub radial_vel: f64,
    pub angular_vel: f64,
}

/// An integrated geodesic, affinely parametrized over `[0, 1]`.
#[derive(Debug, Clone)]
pub struct Geodesic {
    pub samples: Vec<GeodesicSample>,
    /// Metric length of the curve.
    pub length: f64,
    /// `σ(a)² φ'` at launch.
    pub clairaut: f64,
    /// Requested endpoints `(p, q)` as `(radius, angle)` pairs.
    pub endpoints: ((f64, f64), (f64, f64)),
    /// Set to the exit parameter if the curve left the ball before reaching
    /// the requested length.
    pub truncated: Option<f64>,
}

impl Geodesic {
    /// Radius `a(t)` by cubic Hermite interpolation between samples.
    pub fn radius_at(&self, t: f64) -> f64 {
        let n = self.samples.len();
        if n == 1 || t <= self.samples[0].t {
            return self.samples[0].radius;
        }
        let last = &self.samples[n - 1];
        if t >= last.t {
            return last.radius;
        }
        let idx = self
            .samples
            .partition_point(|s| s.t <= t)
            .min(n - 1)
            .max(1);
        let (s0, s1) = (&self.samples[idx - 1], &self.samples[idx]);
        let h = s1.t - s0.t;
        let u = (t - s0.t) / h;
        let (u2, u3) = (u * u, u * u * u);
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        h00 * s0.radius + h10 * h * s0.radial_vel + h01 * s1.radius + h11 * h * s1.radial_vel
    }

    /// Parameter and value of the closest approach to the pole.
    pub fn min_radius(&self) -> (f64, f64) {
        self.samples
            .iter()
            .map(|s| (s.t, s.radius))
            .fold((0.0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc })
    }

    /// Largest relative drift of the speed `(a')² + σ(a)²(φ')²` over samples.
    pub fn max_speed_drift(&self, ball: &Ball) -> Result<f64> {
        let speeds = self.conserved(ball, |j_sigma, s| {
            s.radial_vel * s.radial_vel + j_sigma * j_sigma * s.angular_vel * s.angular_vel
        })?;
        Ok(relative_drift(&speeds))
    }

    /// Largest relative drift of the Clairaut constant `σ(a)² φ'`.
    pub fn max_clairaut_drift(&self, ball: &Ball) -> Result<f64> {
        let values = self.conserved(ball, |j_sigma, s| j_sigma * j_sigma * s.angular_vel)?;
        // Radial curves carry clairaut = 0; measure drift against the speed
        // scale instead of dividing by zero.
        if values.iter().all(|v| v.abs() < 1e-14 * self.length * self.length) {
            return Ok(0.0);
        }
        Ok(relative_drift(&values))
    }

    fn conserved(&self, ball: &Ball, f: impl Fn(f64, &GeodesicSample) -> f64) -> Result<Vec<f64>> {
        self.samples
            .iter()
            .map(|s| {
                let sigma = if s.radius < POLE_FRACTION * ball.radius() {
                    0.0 // at the pole only radial motion contributes
                } else {
                    ball.factor().eval(s.radius)?.sigma
                };
                Ok(f(sigma, s))
            })
            .collect()
    }
}

fn relative_drift(values: &[f64]) -> f64 {
    let first = values[0];
    let scale = first.abs().max(1e-300);
    values.iter().map(|v| (v - first).abs() / scale).fold(0.0, f64::max)
}

/// Wrap an angle into `(-π, π]`.
fn wrap_angle(a: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut x = a % two_pi;
    if x <= -std::f64::consts::PI {
        x += two_pi;
    } else if x > std::f64::consts::PI {
        x -= two_pi;
    }
    x
}

/// State `[a, a', ψ, ψ']` of the section ODE.
fn deriv(ball: &Ball, y: [f64; 4]) -> Result<[f64; 4]> {
    let j = ball.factor().eval(y[0])?;
    Ok([
        y[1],
        y[3] * y[3] * j.sigma * j.d1,
        y[3],
        -2.0 * (j.d1 / j.sigma) * y[1] * y[3],
    ])
}

fn rk4_step(ball: &Ball, y: [f64; 4], h: f64) -> Result<[f64; 4]> {
    let add = |y: [f64; 4], k: [f64; 4], c: f64| {
        [y[0] + c * k[0], y[1] + c * k[1], y[2] + c * k[2], y[3] + c * k[3]]
    };
    let k1 = deriv(ball, y)?;
    let k2 = deriv(ball, add(y, k1, h / 2.0))?;
    let k3 = deriv(ball, add(y, k2, h / 2.0))?;
    let k4 = deriv(ball, add(y, k3, h))?;
    Ok([
        y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        y[2] + h / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
        y[3] + h / 6.0 * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3]),
    ])
}

/// Advance by `h`, substepping where the curve swings close to the pole: the
/// angular equation stiffens like `1/a`, so the local arclength per substep
/// is kept under `0.02·a`. `speed` converts parameter steps to arclength.
fn advance(ball: &Ball, y: [f64; 4], h: f64, speed: f64) -> Result<[f64; 4]> {
    let mut state = y;
    let mut done = 0.0;
    loop {
        let rem = h - done;
        if rem <= 0.0 {
            return Ok(state);
        }
        let hs = rem.min((0.02 * state[0] / speed).max(h / 4096.0));
        state = rk4_step(ball, state, hs)?;
        done += hs;
    }
}

/// Exact representation of a radial geodesic: signed position `x(t)` moving
/// from `x_start` to `x_end` along the axis at `angle_out` (negative `x`
/// means the antipodal ray).
fn radial_geodesic(
    angle_out: f64,
    x_start: f64,
    x_end: f64,
    endpoints: ((f64, f64), (f64, f64)),
    n: usize,
) -> Geodesic {
    let length = (x_end - x_start).abs();
    let dx = x_end - x_start;
    let samples = (0..=n)
        .map(|i| {
            let t = i as f64 / n as f64;
            let x = x_start + t * dx;
            GeodesicSample {
                t,
                radius: x.abs(),
                angle: if x >= 0.0 { angle_out } else { wrap_angle(angle_out + std::f64::consts::PI) },
                radial_vel: if x >= 0.0 { dx } else { -dx },
                angular_vel: 0.0,
            }
        })
        .collect();
    Geodesic { samples, length, clairaut: 0.0, endpoints, truncated: None }
}

/// Integrate a geodesic launched from `start = (radius, angle)` with initial
/// coordinate velocities `direction = (radial, angular)`, rescaled so the
/// affine `[0, 1]` parametrization has constant metric speed `length`.
///
/// A launch with zero angular velocity (or from the pole) uses the exact
/// radial representation. If the curve exits the ball before `t = 1` the
/// result is truncated at the exit parameter.
pub fn integrate_geodesic(
    ball: &Ball,
    start: (f64, f64),
    direction: (f64, f64),
    length: f64,
    steps: usize,
) -> Result<Geodesic> {
    let r_max = ball.radius();
    let (a0, phi0) = start;
    if !(0.0..r_max).contains(&a0) {
        return Err(Error::Domain(format!("start radius {a0} outside [0, R)")));
    }
    if direction.0 == 0.0 && direction.1 == 0.0 {
        return Err(Error::Domain("direction must be nonzero".into()));
    }
    if !(length > 0.0) || steps < 2 {
        return Err(Error::Domain("length must be positive and steps >= 2".into()));
    }

    let at_pole = a0 < POLE_FRACTION * r_max;
    if at_pole && direction.0 == 0.0 {
        return Err(Error::Domain("angular velocity is meaningless at the pole".into()));
    }
    if at_pole || direction.1 == 0.0 {
        // exact radial representation, reflecting through the pole if needed
        let sign = if direction.0 >= 0.0 { 1.0 } else { -1.0 };
        let x_start = a0;
        let mut x_end = a0 + sign * length;
        let mut truncated = None;
        if x_end.abs() >= r_max {
            let t_exit = if sign > 0.0 { (r_max - a0) / length } else { (r_max + a0) / length };
            truncated = Some(t_exit);
            x_end = x_start + sign * length * t_exit;
        }
        let mut g = radial_geodesic(
            phi0,
            x_start,
            x_end,
            ((a0, phi0), (x_end.abs(), if x_end >= 0.0 { phi0 } else { wrap_angle(phi0 + std::f64::consts::PI) })),
            steps,
        );
        g.truncated = truncated;
        return Ok(g);
    }

    // scale the coordinate direction to metric speed = length
    let j0 = ball.factor().eval(a0)?;
    let speed0 = (direction.0 * direction.0
        + j0.sigma * j0.sigma * direction.1 * direction.1)
        .sqrt();
    let scale = length / speed0;
    let mut y = [a0, direction.0 * scale, phi0, direction.1 * scale];
    let clairaut = j0.sigma * j0.sigma * y[3];

    let h = 1.0 / steps as f64;
    let mut samples = Vec::with_capacity(steps + 1);
    samples.push(GeodesicSample { t: 0.0, radius: y[0], angle: y[2], radial_vel: y[1], angular_vel: y[3] });
    let mut truncated = None;

    for i in 0..steps {
        let t0 = i as f64 * h;
        let y_new = match advance(ball, y, h, length) {
            Ok(v) => v,
            Err(_) => {
                // stage evaluation left the factor domain: refine the exit
                // from the last in-domain state
                let frac = if y[1] > 0.0 { ((r_max - y[0]) / (y[1] * h)).clamp(0.0, 1.0) } else { 0.0 };
                truncated = Some(t0 + frac * h);
                break;
            }
        };
        if y_new[0] >= r_max {
            let u = hermite_cross(y[0], h * y[1], y_new[0], h * y_new[1], r_max);
            truncated = Some(t0 + u * h);
            break;
        }
        if y_new[0] < POLE_FRACTION * r_max {
            return Err(Error::Domain(
                "geodesic passed through the pole region; use a radial launch".into(),
            ));
        }
        y = y_new;
        samples.push(GeodesicSample {
            t: t0 + h,
            radius: y[0],
            angle: y[2],
            radial_vel: y[1],
            angular_vel: y[3],
        });
    }

    let end = samples.last().unwrap();
    let reached = truncated.unwrap_or(1.0);
    Ok(Geodesic {
        length: length * reached,
        clairaut,
        endpoints: ((a0, phi0), (end.radius, end.angle)),
        truncated,
        samples,
    })
}

/// Outcome of one shooting integration.
enum Shot {
    /// The relative angle crossed the target: arclength and radius there.
    Crossed { tau: f64, radius: f64 },
    /// The curve left the ball (or ran past the length cap) first.
    Exited,
}

/// Integrate at unit speed from `(rp, ψ=0)` with launch angle `beta` until the
/// relative angle reaches `delta` or the curve exits. Steps adapt near the
/// pole so that steep angular swings stay resolved; events are detected at
/// the adaptive step granularity and refined by Hermite interpolation.
fn shoot(ball: &Ball, rp: f64, beta: f64, delta: f64, h_base: f64, cap: f64) -> Result<Shot> {
    let r_max = ball.radius();
    let sigma_p = ball.factor().eval(rp)?.sigma;
    let mut y = [rp, beta.cos(), 0.0, beta.sin() / sigma_p];
    let pole_guard = POLE_FRACTION * r_max;
    let mut tau = 0.0;

    while tau < cap {
        let h = h_base.min((0.02 * y[0]).max(h_base / 4096.0));
        let y_new = match rk4_step(ball, y, h) {
            Ok(v) => v,
            Err(_) => {
                // stage evaluation left the σ domain; moving inward near the
                // pole this is a pole transit, otherwise an outward exit
                if y[1] < 0.0 && y[0] < 0.5 * r_max {
                    return Ok(Shot::Crossed { tau, radius: y[0] });
                }
                return Ok(Shot::Exited);
            }
        };
        let crossed = y_new[2] >= delta;
        let exited = y_new[0] >= r_max;
        if crossed || exited {
            let u_cross = if crossed {
                hermite_cross(y[2], h * y[3], y_new[2], h * y_new[3], delta)
            } else {
                f64::INFINITY
            };
            let u_exit = if exited {
                hermite_cross(y[0], h * y[1], y_new[0], h * y_new[1], r_max)
            } else {
                f64::INFINITY
            };
            if u_cross <= u_exit {
                let radius = hermite(u_cross, y[0], h * y[1], y_new[0], h * y_new[1]);
                return Ok(Shot::Crossed { tau: tau + u_cross * h, radius });
            }
            return Ok(Shot::Exited);
        }
        if y_new[0] <= pole_guard {
            // effectively a radial pass: all remaining angle is gained at the
            // pole, so the crossing radius is ~0
            return Ok(Shot::Crossed { tau: tau + h, radius: y_new[0] });
        }
        y = y_new;
        tau += h;
    }
    Ok(Shot::Exited)
}

/// Connect `p` to `q` by the minimal geodesic, found by shooting on the
/// launch angle with bisection. `tol` bounds the metric distance between the
/// achieved endpoint and `q`. Degenerate configurations (common ray, chord
/// through the pole, an endpoint at the center) use exact radial chords.
pub fn connect_geodesic(ball: &Ball, p: (f64, f64), q: (f64, f64), tol: f64) -> Result<Geodesic> {
    let r_max = ball.radius();
    let (rp, tp) = p;
    let (rq, tq) = q;
    for (r, name) in [(rp, "p"), (rq, "q")] {
        if !(0.0..r_max).contains(&r) {
            return Err(Error::Domain(format!("{name} radius {r} outside [0, R)")));
        }
    }
    if !(tol > 0.0) {
        return Err(Error::Domain("tol must be positive".into()));
    }
    let dth = wrap_angle(tq - tp);
    let pole = POLE_FRACTION * r_max;
    let same_angle = dth.abs() < ANGLE_EPS;
    if (same_angle || rp.max(rq) < pole) && (rp - rq).abs() < pole {
        return Err(Error::Domain("p and q coincide".into()));
    }

    const CHORD_SAMPLES: usize = 1024;
    if rp < pole {
        return Ok(radial_geodesic(tq, 0.0, rq, (p, q), CHORD_SAMPLES));
    }
    if rq < pole {
        return Ok(radial_geodesic(tp, rp, 0.0, (p, q), CHORD_SAMPLES));
    }
    if same_angle {
        return Ok(radial_geodesic(tp, rp, rq, (p, q), CHORD_SAMPLES));
    }
    if (std::f64::consts::PI - dth.abs()) < ANGLE_EPS {
        return Ok(radial_geodesic(tp, rp, -rq, (p, q), CHORD_SAMPLES));
    }

    let orient = dth.signum();
    let delta = dth.abs();
    let cap = 4.0 * r_max + rp + rq;
    let residual = |beta: f64, h: f64| -> Result<(f64, Option<f64>)> {
        match shoot(ball, rp, beta, delta, h, cap)? {
            Shot::Crossed { tau, radius } => Ok((radius - rq, Some(tau))),
            Shot::Exited => Ok((f64::INFINITY, None)),
        }
    };

    // coarse sweep: the crossing radius decreases from "exits first" (+∞) to
    // nearly 0 as the launch swings from outward-radial to inward-radial.
    // The endpoints are included (just inside (0, π)) because near-antipodal
    // targets put the solution in the last sliver before the radial launch.
    let h_probe = r_max / 96.0;
    let mut bracket = None;
    let mut prev: Option<(f64, f64)> = None;
    for j in 0..=SHOOTING_PROBES + 1 {
        let beta = match j {
            0 => 1e-9,
            j if j == SHOOTING_PROBES + 1 => std::f64::consts::PI - 1e-9,
            j => std::f64::consts::PI * (j as f64 - 0.5) / SHOOTING_PROBES as f64,
        };
        let (g, _) = residual(beta, h_probe)?;
        if let Some((b_prev, g_prev)) = prev {
            if g_prev > 0.0 && g <= 0.0 {
                bracket = Some((b_prev, beta));
                break;
            }
        }
        prev = Some((beta, g));
    }
    let (mut lo, mut hi) = bracket.ok_or_else(|| {
        Error::SolverFailure(format!(
            "no launch-angle bracket found connecting ({rp}, {tp}) to ({rq}, {tq}); \
             the geometry may violate strong convexity"
        ))
    })?;

    let h_fine = r_max / 768.0;
    let mut best: Option<(f64, f64)> = None; // (beta, tau)
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let (g, tau) = residual(mid, h_fine)?;
        if g.abs() <= tol {
            best = Some((mid, tau.unwrap()));
            break;
        }
        if g > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    let (beta, tau_star) = best.ok_or_else(|| {
        Error::SolverFailure(format!(
            "launch-angle bisection did not reach tol = {tol}; tol may be below the \
             integrator resolution"
        ))
    })?;

    // final pass: fixed number of uniform steps over [0, tau*]
    let n_final: usize = 1024;
    let h = tau_star / n_final as f64;
    let sigma_p = ball.factor().eval(rp)?.sigma;
    let mut y = [rp, beta.cos(), 0.0, beta.sin() / sigma_p];
    let mut samples = Vec::with_capacity(n_final + 1);
    let to_sample = |t: f64, y: &[f64; 4]| GeodesicSample {
        t,
        radius: y[0],
        angle: wrap_angle(tp + orient * y[2]),
        radial_vel: y[1] * tau_star,
        angular_vel: orient * y[3] * tau_star,
    };
    samples.push(to_sample(0.0, &y));
    for i in 0..n_final {
        y = advance(ball, y, h, 1.0)?;
        samples.push(to_sample((i + 1) as f64 / n_final as f64, &y));
    }
    let clairaut = sigma_p * sigma_p * samples[0].angular_vel;
    Ok(Geodesic { samples, length: tau_star, clairaut, endpoints: (p, q), truncated: None })
}
