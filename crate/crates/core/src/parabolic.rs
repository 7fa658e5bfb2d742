//! Method-of-lines evolution of the radial parabolic problems
//! `∂_t v = v'' + (N-1)(log σ)' v' + Φ(v)` on `[0, R]` with `v(R) = 0`.
//!
//! The linear radial Laplacian is treated by Crank–Nicolson; reactions are
//! explicit with one fixed-point correction per step (Heun on the reaction),
//! which keeps the scheme second order and makes its fixed points coincide
//! exactly with the discrete elliptic equation `-Lv = Φ(v)`. The origin row
//! uses `Δv ≈ 2N(v₁ - v₀)/h²`, the second-order symmetric form of the pole
//! limit `Δv → N v''(0)`.

use crate::concavity::{certify_radial, Verdict, DEFAULT_BOUNDARY_CUT_FRACTION};
use crate::elliptic::solve_power_bvp;
use crate::error::{Error, Result};
use crate::geometry::Ball;
use crate::linalg::thomas_solve;
use crate::profile::RadialProfile;
use std::sync::Arc;

/// Relative undershoot the positivity guard tolerates before rejecting a step.
const POSITIVITY_SLACK: f64 = 1e-12;

/// Reaction term of the parabolic problem, written so that the evolution is
/// always `∂_t v = Δv + rate(v)`.
#[derive(Clone)]
pub enum Reaction {
    /// Absorption `-G(v)` with a caller-supplied `G` (problem with a general
    /// monotone absorption term).
    Absorption(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
    /// Absorption `-λ vᵛ` with `λ ≥ 0`, `ν ≥ 1`.
    PowerAbsorption { lambda: f64, nu: f64 },
    /// Source `+λ v^γ` with `λ ≥ 0`, `γ ∈ [0, 1]`.
    PowerSource { lambda: f64, gamma: f64 },
}

impl std::fmt::Debug for Reaction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Reaction::Absorption(_) => write!(f, "Absorption(<fn>)"),
            Reaction::PowerAbsorption { lambda, nu } => {
                write!(f, "PowerAbsorption {{ lambda: {lambda}, nu: {nu} }}")
            }
            Reaction::PowerSource { lambda, gamma } => {
                write!(f, "PowerSource {{ lambda: {lambda}, gamma: {gamma} }}")
            }
        }
    }
}

impl Reaction {
    /// Pure heat flow.
    pub fn heat() -> Self {
        Reaction::PowerAbsorption { lambda: 0.0, nu: 1.0 }
    }

    fn rate(&self, s: f64) -> f64 {
        let s = s.max(0.0);
        match self {
            Reaction::Absorption(g) => -g(s),
            Reaction::PowerAbsorption { lambda, nu } => -lambda * s.powf(*nu),
            Reaction::PowerSource { lambda, gamma } => lambda * s.powf(*gamma),
        }
    }

    /// Pure diffusion: there is no explicit reaction sub-step, so the
    /// positivity rejection does not apply (undershoot can only be rounding).
    fn is_zero(&self) -> bool {
        matches!(
            self,
            Reaction::PowerAbsorption { lambda: 0.0, .. } | Reaction::PowerSource { lambda: 0.0, .. }
        )
    }

    /// Verify the structural preconditions: parameter ranges for the power
    /// kinds, and for a general absorption the sampled condition that
    /// `s ↦ e⁻ˢG(eˢ)` is nonnegative, nondecreasing and convex.
    pub fn check(&self) -> Result<()> {
        match self {
            Reaction::PowerAbsorption { lambda, nu } => {
                if *lambda < 0.0 || *nu < 1.0 {
                    return Err(Error::Contract(format!(
                        "power absorption needs lambda >= 0 and nu >= 1, got ({lambda}, {nu})"
                    )));
                }
                Ok(())
            }
            Reaction::PowerSource { lambda, gamma } => {
                if *lambda < 0.0 || !(0.0..=1.0).contains(gamma) {
                    return Err(Error::Contract(format!(
                        "power source needs lambda >= 0 and gamma in [0, 1], got ({lambda}, {gamma})"
                    )));
                }
                Ok(())
            }
            Reaction::Absorption(g) => {
                let rep = absorption_condition_report(g.as_ref(), -300.0, 20.0, 161);
                if rep.ok() {
                    Ok(())
                } else {
                    Err(Error::Contract(format!(
                        "absorption fails the e^-s G(e^s) condition: {rep:?}"
                    )))
                }
            }
        }
    }
}

/// Sampled check that `h(s) = e⁻ˢ G(eˢ)` is nonnegative, nondecreasing and
/// convex on `[lo, hi]`. A grid-level witness, not a proof.
#[derive(Debug, Clone, Copy)]
pub struct ConditionTwoReport {
    pub nonnegative: bool,
    pub nondecreasing: bool,
    pub convex: bool,
}

impl ConditionTwoReport {
    pub fn ok(&self) -> bool {
        self.nonnegative && self.nondecreasing && self.convex
    }
}

pub fn absorption_condition_report(
    g: &dyn Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    n: usize,
) -> ConditionTwoReport {
    let h: Vec<f64> = (0..n)
        .map(|i| {
            let s = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            (-s).exp() * g(s.exp())
        })
        .collect();
    let slack = 1e-10 * h.iter().fold(1.0f64, |a, x| a.max(x.abs()));
    let nonnegative = h.iter().all(|&x| x >= -slack);
    let nondecreasing = h.windows(2).all(|w| w[1] >= w[0] - slack);
    let convex = h.windows(3).all(|w| w[0] + w[2] - 2.0 * w[1] >= -slack);
    ConditionTwoReport { nonnegative, nondecreasing, convex }
}

/// One snapshot of an evolution.
#[derive(Debug, Clone)]
pub struct EvolutionState {
    pub time: f64,
    pub profile: RadialProfile,
}

/// Tridiagonal radial Laplacian rows on the uniform grid (row `m` pinned to
/// the Dirichlet boundary).
struct Laplacian {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
}

impl Laplacian {
    /// Flux (divergence) form `(σ^{N-1} v')' / σ^{N-1}` on interior rows:
    /// identical to `v'' + (N-1)(log σ)'v'` to second order, but the interior
    /// fluxes telescope, so the discrete mass `Σ σ_i^{N-1} v_i h` is
    /// conserved up to the boundary flux alone.
    fn build(ball: &Ball, m: usize, r_max: f64) -> Result<Self> {
        let h = r_max / m as f64;
        let n_dim = ball.dimension() as f64;
        let nm1 = ball.dimension() as i32 - 1;
        let mut lower = vec![0.0; m];
        let mut diag = vec![0.0; m + 1];
        let mut upper = vec![0.0; m];
        // origin row: the pole limit Δv → N v''(0)
        diag[0] = -2.0 * n_dim / (h * h);
        upper[0] = 2.0 * n_dim / (h * h);
        let weight = |r: f64| -> Result<f64> { Ok(ball.factor().eval(r)?.sigma.powi(nm1)) };
        for i in 1..m {
            let w_c = weight(i as f64 * h)?;
            let w_lo = weight((i as f64 - 0.5) * h)?;
            let w_hi = weight((i as f64 + 0.5) * h)?;
            lower[i - 1] = w_lo / (h * h * w_c);
            diag[i] = -(w_lo + w_hi) / (h * h * w_c);
            upper[i] = w_hi / (h * h * w_c);
        }
        // Dirichlet row
        lower[m - 1] = 0.0;
        diag[m] = 0.0;
        Ok(Laplacian { lower, diag, upper })
    }

    fn apply(&self, v: &[f64], out: &mut [f64]) {
        let n = v.len();
        out[0] = self.diag[0] * v[0] + self.upper[0] * v[1];
        for i in 1..n - 1 {
            out[i] = self.lower[i - 1] * v[i - 1] + self.diag[i] * v[i] + self.upper[i] * v[i + 1];
        }
        out[n - 1] = 0.0;
    }
}

/// One Crank–Nicolson step with a single reaction correction.
fn cn_step(lap: &Laplacian, reaction: &Reaction, v: &[f64], dt: f64) -> Result<Vec<f64>> {
    let n = v.len();
    let mut lv = vec![0.0; n];
    lap.apply(v, &mut lv);

    // A = I - dt/2 L with the boundary row pinned to identity
    let a_lower: Vec<f64> = lap.lower.iter().map(|x| -0.5 * dt * x).collect();
    let mut a_diag: Vec<f64> = lap.diag.iter().map(|x| 1.0 - 0.5 * dt * x).collect();
    let a_upper: Vec<f64> = lap.upper.iter().map(|x| -0.5 * dt * x).collect();
    a_diag[n - 1] = 1.0;

    let phi0: Vec<f64> = v.iter().map(|&s| reaction.rate(s)).collect();
    let mut rhs: Vec<f64> = (0..n).map(|i| v[i] + 0.5 * dt * lv[i] + dt * phi0[i]).collect();
    rhs[n - 1] = 0.0;
    let predictor = thomas_solve(&a_lower, &a_diag, &a_upper, &rhs);

    let mut rhs2: Vec<f64> = (0..n)
        .map(|i| v[i] + 0.5 * dt * lv[i] + 0.5 * dt * (phi0[i] + reaction.rate(predictor[i])))
        .collect();
    rhs2[n - 1] = 0.0;
    let v_new = thomas_solve(&a_lower, &a_diag, &a_upper, &rhs2);

    let sup = v_new.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let min = v_new.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -POSITIVITY_SLACK * sup && !reaction.is_zero() {
        return Err(Error::StepRejected { dt, violation: min });
    }
    Ok(v_new)
}

/// Evolve `initial` to `t_end` with step `dt`, returning snapshots at
/// `sample_times` (clamped to `[0, t_end]`, sorted, deduplicated; steps are
/// shortened to land on each sample exactly).
pub fn evolve(
    ball: &Ball,
    reaction: &Reaction,
    initial: &RadialProfile,
    t_end: f64,
    dt: f64,
    sample_times: &[f64],
) -> Result<Vec<EvolutionState>> {
    reaction.check()?;
    if !(dt > 0.0) || !(t_end >= 0.0) {
        return Err(Error::Domain("need dt > 0 and t_end >= 0".into()));
    }
    let scale = initial.sup_norm();
    if initial.values().iter().any(|&v| v < -1e-14 * scale) {
        return Err(Error::Domain("initial data must be nonnegative".into()));
    }
    if initial.values().last().unwrap().abs() > 1e-12 * scale.max(1e-300) {
        return Err(Error::Domain("initial data must vanish at r = R".into()));
    }
    let m = initial.intervals();
    let r_max = initial.radius();
    let lap = Laplacian::build(ball, m, r_max)?;

    let mut samples: Vec<f64> = sample_times
        .iter()
        .copied()
        .filter(|&t| (0.0..=t_end + 1e-12 * t_end.max(1.0)).contains(&t))
        .collect();
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    samples.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * a.abs().max(1.0));

    let mut v = initial.values().to_vec();
    v[m] = 0.0;
    let mut t = 0.0;
    let mut out = Vec::with_capacity(samples.len());
    let mut record = |time: f64, values: &[f64]| -> Result<()> {
        let mut p = RadialProfile::new(r_max, values.to_vec(), initial.problem.clone())?;
        p.shooting_parameter = time;
        out.push(EvolutionState { time, profile: p });
        Ok(())
    };

    let mut next_sample = 0usize;
    while next_sample < samples.len() && samples[next_sample] <= 1e-15 {
        record(0.0, &v)?;
        next_sample += 1;
    }
    let time_slack = 1e-12 * t_end.max(1.0);
    while t < t_end - time_slack {
        let target = if next_sample < samples.len() {
            samples[next_sample].min(t_end)
        } else {
            t_end
        };
        while t < target - time_slack {
            let step = dt.min(target - t);
            v = cn_step(&lap, reaction, &v, step)?;
            t += step;
        }
        t = target;
        if next_sample < samples.len() && (samples[next_sample] - t).abs() <= time_slack {
            record(t, &v)?;
            next_sample += 1;
        }
    }
    Ok(out)
}

/// Long-time limit of problem `∂_t u = Δu + λ u^γ` with zero initial data:
/// marches until `‖v(t+1) - v(t)‖_∞ ≤ tol·‖v‖_∞`, then cross-checks against
/// the elliptic shooting solution within `10·tol` relative.
///
/// For `γ ∈ (0, 1)` the zero state is itself stationary for the discrete
/// dynamics, so the march starts from a tiny positive seed; the limit is the
/// positive branch and does not depend on the seed.
pub fn steady_state(ball: &Ball, lambda: f64, gamma: f64, tol: f64) -> Result<RadialProfile> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("lambda = {lambda} must be positive")));
    }
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::Domain(format!("gamma = {gamma} outside [0, 1]")));
    }
    if gamma == 1.0 {
        return Err(Error::Domain(
            "gamma = 1 resonates with the spectrum (no steady state unless lambda = lambda_1); \
             rejected"
                .into(),
        ));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain("tol must be positive".into()));
    }
    let m = 2048usize;
    let r_max = ball.radius();
    let reaction = Reaction::PowerSource { lambda, gamma };
    let lap = Laplacian::build(ball, m, r_max)?;

    let seed_scale = 1e-10 * (lambda * r_max * r_max).powf(1.0 / (1.0 - gamma));
    let mut v: Vec<f64> = (0..=m)
        .map(|i| {
            let r = i as f64 / m as f64;
            seed_scale * (1.0 - r * r)
        })
        .collect();
    v[m] = 0.0;

    let mut dt = 2.5e-4 * r_max * r_max;
    let t_max = 1000.0;
    let mut t = 0.0;
    let mut prev = v.clone();
    let mut halvings = 0;
    while t < t_max {
        // march one time unit, then test the sup change
        let target = t + 1.0;
        while t < target {
            let step = dt.min(target - t);
            match cn_step(&lap, &reaction, &v, step) {
                Ok(next) => {
                    v = next;
                    t += step;
                }
                Err(Error::StepRejected { .. }) if halvings < 8 => {
                    dt *= 0.5;
                    halvings += 1;
                }
                Err(e) => return Err(e),
            }
        }
        let sup = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        let diff = v.iter().zip(&prev).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
        if sup > 0.0 && diff <= tol * sup {
            break;
        }
        prev = v.clone();
        if t >= t_max {
            return Err(Error::SolverFailure(format!(
                "steady state not reached within t = {t_max}"
            )));
        }
    }

    let mut profile = RadialProfile::new(r_max, v, "steady-state")?;
    profile.shooting_parameter = t;

    let oracle = solve_power_bvp(ball, lambda, gamma, 1e-9, m)?;
    let sup = profile.sup_norm();
    let worst = profile
        .values()
        .iter()
        .zip(oracle.values())
        .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
    if worst > 10.0 * tol * sup {
        return Err(Error::SolverFailure(format!(
            "steady state disagrees with the elliptic solution: sup diff {worst:e} > 10·tol·scale"
        )));
    }
    Ok(profile)
}

/// Earliest sampled time `T` from which `certify_radial` at the given `alpha`
/// and strictness margin passes at every later sampled time; `None` if the
/// final state still fails.
pub fn concavity_onset_time(
    ball: &Ball,
    states: &[EvolutionState],
    alpha: f64,
    margin: f64,
) -> Result<Option<f64>> {
    if states.is_empty() {
        return Err(Error::Domain("no states supplied".into()));
    }
    let mut onset = None;
    for state in states.iter().rev() {
        let cut = DEFAULT_BOUNDARY_CUT_FRACTION * state.profile.radius();
        // a state that is not everywhere positive cannot be certified: treat
        // the transform's domain error as a plain failure at this time
        let strict = match certify_radial(&state.profile, ball, alpha, cut, margin) {
            Ok(cert) => cert.verdict == Verdict::CertifiedStrict,
            Err(Error::Domain(_)) => false,
            Err(e) => return Err(e),
        };
        if strict {
            onset = Some(state.time);
        } else {
            break;
        }
    }
    Ok(onset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::first_eigenpair;
    use approx::assert_relative_eq;

    fn flat3() -> Ball {
        Ball::space_form(3, 1.0, 0.0).unwrap()
    }

    fn bump_profile(m: usize, r_max: f64) -> RadialProfile {
        let values: Vec<f64> = (0..=m)
            .map(|i| {
                let r = r_max * i as f64 / m as f64;
                (std::f64::consts::FRAC_PI_2 * r / r_max).cos()
            })
            .collect();
        RadialProfile::new(r_max, values, "bump").unwrap()
    }

    /// Pure decay of the first eigenfunction: v(·,t) = e^{-λ₁ t} φ.
    #[test]
    fn eigenfunction_decays_at_rate_lambda1() {
        let ball = flat3();
        let sol = first_eigenpair(&ball, 1e-9, 1024).unwrap();
        let t = 0.1;
        let states = evolve(&ball, &Reaction::heat(), &sol.profile, t, 1e-4, &[t]).unwrap();
        assert_eq!(states.len(), 1);
        let decay = (-sol.lambda1 * t).exp();
        let got = &states[0].profile;
        for i in (0..1024).step_by(61) {
            assert_relative_eq!(
                got.values()[i],
                decay * sol.profile.values()[i],
                max_relative = 1e-5,
                epsilon = 1e-12
            );
        }
    }

    /// Maximum principle: with absorption the sup norm never grows.
    #[test]
    fn absorption_is_sup_nonincreasing() {
        let ball = Ball::space_form(2, 1.0, -1.0).unwrap();
        let initial = bump_profile(512, 1.0);
        let reaction = Reaction::PowerAbsorption { lambda: 0.5, nu: 2.0 };
        let times = [0.01, 0.05, 0.2, 1.0];
        let states = evolve(&ball, &reaction, &initial, 1.0, 5e-4, &times).unwrap();
        let mut sup = initial.sup_norm();
        for s in &states {
            let next = s.profile.sup_norm();
            assert!(next <= sup * (1.0 + 1e-10), "sup grew at t = {}", s.time);
            assert!(s.profile.values().iter().all(|&v| v >= -1e-12 * sup));
            sup = next;
        }
    }

    /// Evolving to t then to t+s matches evolving straight to t+s (heat flow
    /// is autonomous, so the chained march repeats the same arithmetic).
    #[test]
    fn semigroup_consistency() {
        let ball = flat3();
        let initial = bump_profile(256, 1.0);
        let dt = 1e-3;
        let direct = evolve(&ball, &Reaction::heat(), &initial, 0.1, dt, &[0.1]).unwrap();

        let first = evolve(&ball, &Reaction::heat(), &initial, 0.05, dt, &[0.05]).unwrap();
        let second = evolve(&ball, &Reaction::heat(), &first[0].profile, 0.05, dt, &[0.05]).unwrap();
        let sup = direct[0].profile.sup_norm();
        for (a, b) in direct[0].profile.values().iter().zip(second[0].profile.values()) {
            assert!((a - b).abs() <= 1e-8 * sup);
        }
    }

    /// Halving dt shrinks the terminal change by ~4 (second-order stepping).
    #[test]
    fn second_order_in_dt() {
        let ball = flat3();
        let initial = bump_profile(512, 1.0);
        let run = |dt: f64| {
            evolve(&ball, &Reaction::heat(), &initial, 0.1, dt, &[0.1]).unwrap()[0]
                .profile
                .values()
                .to_vec()
        };
        let (a, b, c) = (run(4e-3), run(2e-3), run(1e-3));
        let d1 = a.iter().zip(&b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        let d2 = b.iter().zip(&c).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        let ratio = d1 / d2;
        assert!((2.5..=6.0).contains(&ratio), "dt convergence ratio {ratio} not ~4");
    }

    /// Strong absorption with an oversized step trips the positivity guard.
    #[test]
    fn oversized_step_is_rejected() {
        let ball = flat3();
        let initial = bump_profile(128, 1.0);
        let reaction = Reaction::PowerAbsorption { lambda: 200.0, nu: 1.0 };
        let res = evolve(&ball, &reaction, &initial, 1.0, 0.05, &[1.0]);
        assert!(matches!(res, Err(Error::StepRejected { .. })));
        // halving the step far enough succeeds
        let ok = evolve(&ball, &reaction, &initial, 0.02, 1e-4, &[0.02]);
        assert!(ok.is_ok());
    }

    #[test]
    fn condition_two_screens_reactions() {
        // G(s) = s² : e^{-s}G(e^s) = e^{s} is admissible
        let good = Reaction::Absorption(Arc::new(|s: f64| s * s));
        assert!(good.check().is_ok());
        // G(s) = sqrt(s): e^{-s}G(e^s) = e^{-s/2} is decreasing -> rejected
        let bad = Reaction::Absorption(Arc::new(|s: f64| s.sqrt()));
        assert!(matches!(bad.check(), Err(Error::Contract(_))));
        // nu < 1 rejected
        assert!(Reaction::PowerAbsorption { lambda: 1.0, nu: 0.5 }.check().is_err());
    }

    /// Theorem 3.1 scenario: (P'') with γ = 0 converges to the torsion
    /// profile (1 - r²)/6 on the flat 3-ball.
    #[test]
    fn steady_state_matches_torsion() {
        let ball = flat3();
        let ss = steady_state(&ball, 1.0, 0.0, 1e-7).unwrap();
        for i in (0..=2048).step_by(128) {
            let r = ss.r(i);
            assert_relative_eq!(
                ss.values()[i],
                (1.0 - r * r) / 6.0,
                max_relative = 1e-6,
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn steady_state_gamma_one_rejected() {
        let ball = Ball::space_form(2, 1.0, 0.0).unwrap();
        assert!(matches!(steady_state(&ball, 1.0, 1.0, 1e-6), Err(Error::Domain(_))));
    }

    /// Nonlinear steady state against the elliptic shooting oracle (the
    /// cross-check inside steady_state is the assertion).
    #[test]
    fn steady_state_nonlinear_cross_check() {
        let ball = Ball::space_form(2, 1.0, -1.0).unwrap();
        let ss = steady_state(&ball, 1.0, 0.5, 1e-6).unwrap();
        assert!(ss.sup_norm() > 0.0);
    }

    /// Log-concave data stays strictly log-concave for all sampled t > 0
    /// under Eq. (1.3) geometry; onset is the first sample.
    #[test]
    fn log_concavity_preserved_from_start() {
        let ball = Ball::space_form(2, 1.0, -1.0).unwrap();
        let initial = bump_profile(512, 1.0);
        let times = [0.001, 0.01, 0.1, 0.5];
        let states = evolve(&ball, &Reaction::heat(), &initial, 0.5, 2e-4, &times).unwrap();
        let margin = 1e-10;
        let onset = concavity_onset_time(&ball, &states, 0.0, margin).unwrap();
        assert_eq!(onset, Some(0.001));
    }

    /// A non-log-concave ring smooths into log-concavity in finite time.
    #[test]
    fn ring_data_has_finite_onset() {
        let ball = Ball::space_form(2, 1.0, -1.0).unwrap();
        let m = 512;
        let values: Vec<f64> = (0..=m)
            .map(|i| {
                let r = i as f64 / m as f64;
                let x = (r - 0.5) / 0.15;
                (-x * x).exp() - (-(0.5f64 / 0.15).powi(2)).exp()
            })
            .collect();
        let initial = RadialProfile::new(1.0, values, "ring").unwrap();
        let times = [0.001, 0.004, 0.016, 0.064, 0.256, 1.0];
        let states = evolve(&ball, &Reaction::heat(), &initial, 1.0, 1e-4, &times).unwrap();
        let onset = concavity_onset_time(&ball, &states, 0.0, 1e-10).unwrap();
        let t = onset.expect("ring must become log-concave");
        assert!(t > 0.001, "ring cannot be log-concave immediately");
        assert!(t <= 1.0);
    }
}
