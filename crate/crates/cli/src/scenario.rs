//! Scenario pipeline: conditions → solve → thresholds → certify → verdicts.
//! Every stage failure is wrapped with the stage name.

use crate::config::{InitialData, ParabolicKind, ProblemConfig, ScenarioConfig};
use crate::report::{NamedProfile, ReportBundle, TheoremVerdict};
use anyhow::{bail, Context, Result};
use warpcav_core::concavity::{
    certify_both, certify_radial, default_strictness, Verdict, DEFAULT_BOUNDARY_CUT_FRACTION,
};
use warpcav_core::elliptic::{first_eigenpair, solve_power_bvp};
use warpcav_core::geometry::{check_condition, Ball, Condition};
use warpcav_core::heat_kernel::{kernel_log_concavity, KernelSpec};
use warpcav_core::parabolic::{concavity_onset_time, evolve, EvolutionState, Reaction};
use warpcav_core::profile::RadialProfile;
use warpcav_core::thresholds::alpha_threshold;

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ReportBundle> {
    let mut bundle = ReportBundle::new(&cfg.name, &cfg.hash());
    let ball = cfg.build_ball().context("stage: geometry")?;
    let grid = 2048;

    // geometry conditions that need no solution data
    bundle
        .condition_reports
        .push(check_condition(&ball, Condition::C2Necessary, grid).context("stage: conditions")?);
    bundle
        .condition_reports
        .push(check_condition(&ball, Condition::Eq13, grid).context("stage: conditions")?);

    match &cfg.problem {
        ProblemConfig::Elliptic { lambda, gamma } => {
            run_elliptic(cfg, &ball, *lambda, *gamma, &mut bundle)?;
        }
        ProblemConfig::Eigen {} => {
            run_eigen(cfg, &ball, &mut bundle)?;
        }
        ProblemConfig::Parabolic { kind, lambda, nu, gamma, initial, t_end, times } => {
            run_parabolic(
                cfg,
                &ball,
                (*kind, *lambda, *nu, *gamma),
                *initial,
                *t_end,
                times,
                &mut bundle,
            )?;
        }
        ProblemConfig::HeatKernel { times, sample_box } => {
            run_kernel(cfg, &ball, times, *sample_box, &mut bundle)?;
        }
    }
    Ok(bundle)
}

fn resolved_alphas(cfg: &ScenarioConfig, ball: &Ball, bundle: &mut ReportBundle) -> Result<Vec<f64>> {
    let mut alphas = cfg.certification.alphas.clone();
    if cfg.certification.alpha_auto {
        let lambda1 = match bundle.lambda1 {
            Some(l) => l,
            None => {
                let l = first_eigenpair(ball, cfg.solver.tol, cfg.solver.grid)
                    .context("stage: thresholds (eigenvalue)")?
                    .lambda1;
                bundle.lambda1 = Some(l);
                l
            }
        };
        let rep = alpha_threshold(ball, lambda1, 2048).context("stage: thresholds")?;
        if !rep.admissible {
            bail!("stage: thresholds: no admissible alpha (A = {})", rep.alpha_max);
        }
        alphas.push(rep.alpha_max);
        bundle.threshold = Some(rep);
    }
    Ok(alphas)
}

fn alpha_conditions(
    ball: &Ball,
    alphas: &[f64],
    lambda1: Option<f64>,
    bundle: &mut ReportBundle,
) -> Result<()> {
    for &alpha in alphas {
        bundle.condition_reports.push(
            check_condition(ball, Condition::Eq11 { alpha }, 2048).context("stage: conditions")?,
        );
        if let Some(l) = lambda1 {
            if alpha > 0.0 && alpha < 1.0 {
                bundle.condition_reports.push(
                    check_condition(ball, Condition::Eq12 { alpha, lambda1: l }, 2048)
                        .context("stage: conditions")?,
                );
            }
        }
    }
    Ok(())
}

fn certify_profile(
    cfg: &ScenarioConfig,
    ball: &Ball,
    profile: &RadialProfile,
    label: &str,
    time: Option<f64>,
    alphas: &[f64],
    bundle: &mut ReportBundle,
) -> Result<Vec<Verdict>> {
    let cert_cfg = &cfg.certification;
    let cut = cert_cfg
        .boundary_cut
        .unwrap_or(DEFAULT_BOUNDARY_CUT_FRACTION * profile.radius());
    let mut verdicts = Vec::new();
    for (i, &alpha) in alphas.iter().enumerate() {
        let eps = cert_cfg.epsilon.unwrap_or_else(|| default_strictness(profile));
        let cert = certify_both(
            ball,
            profile,
            alpha,
            cut,
            cert_cfg.pairs,
            cert_cfg.params,
            eps,
            cert_cfg.seed.wrapping_add(i as u64),
        )
        .context("stage: certify")?;
        verdicts.push(cert.verdict);
        bundle.push_certificate(format!("{label} alpha={alpha}"), time, cert);
    }
    Ok(verdicts)
}

fn run_elliptic(
    cfg: &ScenarioConfig,
    ball: &Ball,
    lambda: f64,
    gamma: f64,
    bundle: &mut ReportBundle,
) -> Result<()> {
    if gamma == 1.0 {
        bail!("stage: solve: gamma = 1 is the eigenvalue problem; use `type = \"eigen\"`");
    }
    let profile =
        solve_power_bvp(ball, lambda, gamma, cfg.solver.tol, cfg.solver.grid).context("stage: solve")?;
    let alphas = resolved_alphas(cfg, ball, bundle)?;
    alpha_conditions(ball, &alphas, bundle.lambda1, bundle)?;
    let verdicts = certify_profile(cfg, ball, &profile, "solution", None, &alphas, bundle)?;
    let alpha0 = alphas.first().copied().unwrap_or(1.0 - gamma);
    bundle.profiles.push(NamedProfile {
        label: "solution".into(),
        time: None,
        alpha: alpha0,
        profile,
    });
    let combined = ReportBundle::combine(verdicts);
    bundle.verdicts.push(TheoremVerdict { tag: "T1.1".into(), verdict: combined });
    bundle.verdicts.push(TheoremVerdict { tag: "C1.1".into(), verdict: combined });
    Ok(())
}

fn run_eigen(cfg: &ScenarioConfig, ball: &Ball, bundle: &mut ReportBundle) -> Result<()> {
    let sol = first_eigenpair(ball, cfg.solver.tol, cfg.solver.grid).context("stage: solve")?;
    bundle.lambda1 = Some(sol.lambda1);
    let alphas = resolved_alphas(cfg, ball, bundle)?;
    alpha_conditions(ball, &alphas, Some(sol.lambda1), bundle)?;
    let verdicts =
        certify_profile(cfg, ball, &sol.profile, "eigenfunction", None, &alphas, bundle)?;
    let alpha0 = alphas.first().copied().unwrap_or(0.0);
    bundle.profiles.push(NamedProfile {
        label: "eigenfunction".into(),
        time: None,
        alpha: alpha0,
        profile: sol.profile,
    });
    let combined = ReportBundle::combine(verdicts);
    bundle.verdicts.push(TheoremVerdict { tag: "T1.2".into(), verdict: combined });
    if cfg.certification.alpha_auto {
        bundle.verdicts.push(TheoremVerdict { tag: "CA.1".into(), verdict: combined });
    }
    if let Some(rep) = &bundle.threshold {
        bundle.verdicts.push(TheoremVerdict {
            tag: "PA.2".into(),
            verdict: if rep.cheng_ok { Verdict::CertifiedStrict } else { Verdict::Violated },
        });
    }
    Ok(())
}

fn build_initial(
    cfg: &ScenarioConfig,
    ball: &Ball,
    which: InitialData,
    m: usize,
) -> Result<RadialProfile> {
    let r_max = ball.radius();
    let values: Vec<f64> = match which {
        InitialData::Eigenfunction => {
            return Ok(first_eigenpair(ball, cfg.solver.tol, m).context("stage: solve (initial)")?.profile)
        }
        InitialData::Bump => (0..=m)
            .map(|i| (std::f64::consts::FRAC_PI_2 * i as f64 / m as f64).cos())
            .collect(),
        InitialData::Ring => (0..=m)
            .map(|i| {
                let r = i as f64 / m as f64;
                let x = (r - 0.5) / 0.15;
                (-x * x).exp() - (-(0.5f64 / 0.15).powi(2)).exp()
            })
            .collect(),
        InitialData::Zero => vec![0.0; m + 1],
    };
    Ok(RadialProfile::new(r_max, values, format!("{which:?}").to_lowercase())?)
}

#[allow(clippy::too_many_arguments)]
fn run_parabolic(
    cfg: &ScenarioConfig,
    ball: &Ball,
    (kind, lambda, nu, gamma): (ParabolicKind, f64, Option<f64>, Option<f64>),
    initial: InitialData,
    t_end: f64,
    times: &[f64],
    bundle: &mut ReportBundle,
) -> Result<()> {
    let reaction = match kind {
        ParabolicKind::Heat => Reaction::heat(),
        ParabolicKind::PowerAbsorption => {
            Reaction::PowerAbsorption { lambda, nu: nu.unwrap_or(1.0) }
        }
        ParabolicKind::PowerSource => Reaction::PowerSource { lambda, gamma: gamma.unwrap_or(0.0) },
    };
    // parabolic grids: capped so dt·λ_max stays moderate
    let m = cfg.solver.grid.min(1024);
    let init = build_initial(cfg, ball, initial, m)?;
    let states: Vec<EvolutionState> = {
        let mut dt = cfg.solver.dt;
        loop {
            match evolve(ball, &reaction, &init, t_end, dt, times) {
                Ok(s) => break s,
                Err(warpcav_core::Error::StepRejected { .. }) if dt > cfg.solver.dt / 256.0 => {
                    dt *= 0.5; // stiffness signalled: halve and retry
                }
                Err(e) => return Err(e).context("stage: solve"),
            }
        }
    };

    let alphas = resolved_alphas(cfg, ball, bundle)?;
    alpha_conditions(ball, &alphas, bundle.lambda1, bundle)?;
    let alpha0 = alphas.first().copied().unwrap_or(0.0);

    // radial certificates at every sampled time, both routes on the final state
    let cut = cfg
        .certification
        .boundary_cut
        .unwrap_or(DEFAULT_BOUNDARY_CUT_FRACTION * ball.radius());
    let mut state_verdicts = Vec::new();
    for state in &states {
        let eps = cfg
            .certification
            .epsilon
            .unwrap_or_else(|| default_strictness(&state.profile));
        let verdict = match certify_radial(&state.profile, ball, alpha0, cut, eps) {
            Ok(cert) => {
                let v = cert.verdict;
                bundle.push_certificate(format!("state alpha={alpha0}"), Some(state.time), cert);
                v
            }
            Err(warpcav_core::Error::Domain(_)) => Verdict::Violated,
            Err(e) => return Err(e).context("stage: certify"),
        };
        state_verdicts.push(verdict);
        bundle.profiles.push(NamedProfile {
            label: "state".into(),
            time: Some(state.time),
            alpha: alpha0,
            profile: state.profile.clone(),
        });
    }
    if let Some(last) = states.last() {
        let _ = certify_profile(
            cfg,
            ball,
            &last.profile,
            "final-state",
            Some(last.time),
            &alphas,
            bundle,
        )?;
    }
    let onset =
        concavity_onset_time(ball, &states, alpha0, cfg.certification.epsilon.unwrap_or(1e-10))
            .context("stage: certify (onset)")?;
    bundle.onset_time = onset;

    let preserved = ReportBundle::combine(state_verdicts);
    let onset_verdict =
        if onset.is_some() { Verdict::CertifiedStrict } else { Verdict::Violated };
    match kind {
        ParabolicKind::Heat => {
            if matches!(initial, InitialData::Bump | InitialData::Eigenfunction) {
                bundle.verdicts.push(TheoremVerdict { tag: "T1.3".into(), verdict: preserved });
            }
            bundle.verdicts.push(TheoremVerdict { tag: "C4.1".into(), verdict: onset_verdict });
        }
        ParabolicKind::PowerAbsorption => {
            bundle.verdicts.push(TheoremVerdict { tag: "C1.2".into(), verdict: preserved });
        }
        ParabolicKind::PowerSource => {
            bundle.verdicts.push(TheoremVerdict { tag: "T3.1".into(), verdict: onset_verdict });
        }
    }
    Ok(())
}

fn run_kernel(
    cfg: &ScenarioConfig,
    ball: &Ball,
    times: &[f64],
    sample_box: f64,
    bundle: &mut ReportBundle,
) -> Result<()> {
    let curvature = match ball.factor() {
        warpcav_core::geometry::WarpedFactor::SpaceForm { curvature } => *curvature,
        _ => bail!("stage: solve: heat kernels are defined on space forms only"),
    };
    let mut verdicts = Vec::new();
    for (i, &t) in times.iter().enumerate() {
        let spec = KernelSpec::new(ball.dimension(), curvature, t).context("stage: solve")?;
        let eps = cfg.certification.epsilon.unwrap_or(1e-10);
        let cert = kernel_log_concavity(
            &spec,
            sample_box,
            cfg.certification.pairs,
            cfg.certification.params,
            eps,
            cfg.certification.seed.wrapping_add(i as u64),
        )
        .context("stage: certify")?;
        verdicts.push(cert.verdict);
        bundle.push_certificate("kernel", Some(t), cert);

        // sampled log-kernel as an emittable profile (α = 0 transform)
        let m = 512;
        let values: Vec<f64> = (0..=m)
            .map(|j| {
                warpcav_core::heat_kernel::kernel_value(&spec, sample_box * j as f64 / m as f64)
            })
            .collect::<warpcav_core::Result<_>>()
            .context("stage: solve")?;
        let mut p = RadialProfile::new(sample_box, values, "kernel")?;
        p.shooting_parameter = t;
        bundle.profiles.push(NamedProfile { label: "kernel".into(), time: Some(t), alpha: 0.0, profile: p });
    }
    bundle
        .verdicts
        .push(TheoremVerdict { tag: "C1.3".into(), verdict: ReportBundle::combine(verdicts) });
    Ok(())
}
