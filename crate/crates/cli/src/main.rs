//! `warpcav`: scenario-driven verification of power concavity for radial
//! elliptic/parabolic problems and space-form heat kernels.

mod config;
mod emit;
mod report;
mod scenario;
mod suite;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use config::{ProblemConfig, ScenarioConfig};
use report::ReportBundle;
use scenario::run_scenario;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "warpcav", version, about = "Power-concavity verification on warped balls")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Scenario configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    io: IoOpts,
}

#[derive(Args, Clone)]
struct IoOpts {
    /// Output directory (overrides the config; env: WARPCAV_OUT).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed override for the certification samplers.
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated formats: csv,json,svg.
    #[arg(long, value_delimiter = ',')]
    format: Option<Vec<String>>,
    /// Worker threads for scenario pools (env: WARPCAV_JOBS).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the geometric conditions on σ for a scenario's ball.
    Conditions(CommonOpts),
    /// Solve the elliptic power problem and emit the profile.
    SolveElliptic(CommonOpts),
    /// Compute the first Dirichlet eigenpair and emit the eigenfunction.
    Eigen(CommonOpts),
    /// Evolve the parabolic problem and emit the sampled states.
    SolveParabolic(CommonOpts),
    /// Evaluate heat kernels and their log-concavity certificates.
    HeatKernel(CommonOpts),
    /// Certify a previously emitted profile CSV.
    Certify {
        #[command(flatten)]
        common: CommonOpts,
        /// Profile CSV produced by an earlier solve.
        #[arg(long)]
        profile: PathBuf,
    },
    /// Compute the admissible-α threshold report.
    Thresholds(CommonOpts),
    /// Run the full pipeline for one or more scenarios.
    Run {
        /// Scenario configuration(s).
        #[arg(long, required = true, num_args = 1..)]
        config: Vec<PathBuf>,
        #[command(flatten)]
        io: IoOpts,
    },
    /// Run the built-in verification suite.
    Suite {
        #[command(flatten)]
        io: IoOpts,
    },
}

fn resolved_out(io: &IoOpts, cfg: Option<&ScenarioConfig>) -> PathBuf {
    io.out
        .clone()
        .or_else(|| std::env::var_os("WARPCAV_OUT").map(PathBuf::from))
        .unwrap_or_else(|| {
            cfg.map(|c| PathBuf::from(&c.output.directory)).unwrap_or_else(|| "out".into())
        })
}

fn resolved_jobs(io: &IoOpts) -> usize {
    io.jobs
        .or_else(|| std::env::var("WARPCAV_JOBS").ok().and_then(|s| s.parse().ok()))
        .unwrap_or(1)
        .max(1)
}

fn resolved_formats(io: &IoOpts, cfg: Option<&ScenarioConfig>) -> Vec<String> {
    io.format
        .clone()
        .or_else(|| cfg.map(|c| c.output.formats.clone()))
        .unwrap_or_else(|| vec!["csv".into(), "json".into()])
}

fn load(common: &CommonOpts) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::load(&common.config)?;
    if let Some(seed) = common.io.seed {
        cfg.certification.seed = seed;
    }
    Ok(cfg)
}

fn finish(bundle: &ReportBundle, io: &IoOpts, cfg: &ScenarioConfig) -> Result<i32> {
    let out = resolved_out(io, Some(cfg));
    let formats = resolved_formats(io, Some(cfg));
    let files = emit::emit(bundle, &formats, &out)?;
    for v in &bundle.verdicts {
        println!("{:6} {:?}", v.tag, v.verdict);
    }
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(bundle.exit_code())
}

fn main() {
    let code = match run() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            1
        }
    };
    std::process::exit(code);
}

fn run() -> Result<i32> {
    match Cli::parse().command {
        Command::Conditions(common) => {
            let cfg = load(&common)?;
            let ball = cfg.build_ball()?;
            use warpcav_core::geometry::{check_condition, Condition};
            let mut reports = vec![
                check_condition(&ball, Condition::C2Necessary, 2048)?,
                check_condition(&ball, Condition::Eq13, 2048)?,
            ];
            for &alpha in &cfg.certification.alphas {
                reports.push(check_condition(&ball, Condition::Eq11 { alpha }, 2048)?);
            }
            for r in &reports {
                println!(
                    "{:32} holds={} worst_margin={:+.6e} at r={:.6}",
                    r.condition, r.holds, r.worst_margin, r.worst_radius
                );
            }
            let mut bundle = ReportBundle::new(&cfg.name, &cfg.hash());
            bundle.condition_reports = reports;
            let out = resolved_out(&common.io, Some(&cfg));
            emit::emit(&bundle, &resolved_formats(&common.io, Some(&cfg)), &out)?;
            Ok(if bundle.condition_reports.iter().all(|r| r.holds) { 0 } else { 2 })
        }
        Command::SolveElliptic(common) => {
            let cfg = load(&common)?;
            anyhow::ensure!(
                matches!(cfg.problem, ProblemConfig::Elliptic { .. }),
                "solve-elliptic needs an elliptic problem config"
            );
            let bundle = run_scenario(&cfg)?;
            println!("v(0) = {}", bundle.profiles[0].profile.values()[0]);
            finish(&bundle, &common.io, &cfg)
        }
        Command::Eigen(common) => {
            let cfg = load(&common)?;
            anyhow::ensure!(
                matches!(cfg.problem, ProblemConfig::Eigen {}),
                "eigen needs an eigen problem config"
            );
            let bundle = run_scenario(&cfg)?;
            if let Some(l) = bundle.lambda1 {
                println!("lambda1 = {l}");
            }
            finish(&bundle, &common.io, &cfg)
        }
        Command::SolveParabolic(common) => {
            let cfg = load(&common)?;
            anyhow::ensure!(
                matches!(cfg.problem, ProblemConfig::Parabolic { .. }),
                "solve-parabolic needs a parabolic problem config"
            );
            let bundle = run_scenario(&cfg)?;
            if let Some(t) = bundle.onset_time {
                println!("concavity onset at t = {t}");
            }
            finish(&bundle, &common.io, &cfg)
        }
        Command::HeatKernel(common) => {
            let cfg = load(&common)?;
            anyhow::ensure!(
                matches!(cfg.problem, ProblemConfig::HeatKernel { .. }),
                "heat-kernel needs a heat_kernel problem config"
            );
            let bundle = run_scenario(&cfg)?;
            finish(&bundle, &common.io, &cfg)
        }
        Command::Certify { common, profile } => {
            let cfg = load(&common)?;
            let ball = cfg.build_ball()?;
            let prof = emit::read_profile_csv(&profile)?;
            let mut bundle = ReportBundle::new(&cfg.name, &cfg.hash());
            let cut = cfg
                .certification
                .boundary_cut
                .unwrap_or(prof.radius() / 64.0);
            for (i, &alpha) in cfg.certification.alphas.iter().enumerate() {
                let eps = cfg
                    .certification
                    .epsilon
                    .unwrap_or_else(|| warpcav_core::concavity::default_strictness(&prof));
                let cert = warpcav_core::concavity::certify_both(
                    &ball,
                    &prof,
                    alpha,
                    cut,
                    cfg.certification.pairs,
                    cfg.certification.params,
                    eps,
                    cfg.certification.seed.wrapping_add(i as u64),
                )?;
                println!("alpha = {alpha}: {:?}", cert.verdict);
                bundle.push_certificate(format!("ingested alpha={alpha}"), None, cert);
            }
            let violated = bundle
                .certificates
                .iter()
                .any(|c| c.certificate.verdict == warpcav_core::concavity::Verdict::Violated);
            let out = resolved_out(&common.io, Some(&cfg));
            emit::emit(&bundle, &resolved_formats(&common.io, Some(&cfg)), &out)?;
            Ok(if violated { 2 } else { 0 })
        }
        Command::Thresholds(common) => {
            let cfg = load(&common)?;
            let ball = cfg.build_ball()?;
            let lambda1 =
                warpcav_core::elliptic::first_eigenpair(&ball, cfg.solver.tol, cfg.solver.grid)?
                    .lambda1;
            let rep = warpcav_core::thresholds::alpha_threshold(&ball, lambda1, 2048)?;
            println!(
                "A = {:.10}  lambda1 = {:.10}  inf at r = {:.6}  K in [{:.6}, {:.6}]  cheng_ok = {}",
                rep.alpha_max,
                rep.lambda1_used,
                rep.inf_point,
                rep.curvature_bounds.0,
                rep.curvature_bounds.1,
                rep.cheng_ok
            );
            let mut bundle = ReportBundle::new(&cfg.name, &cfg.hash());
            bundle.lambda1 = Some(lambda1);
            bundle.threshold = Some(rep);
            let out = resolved_out(&common.io, Some(&cfg));
            emit::emit(&bundle, &resolved_formats(&common.io, Some(&cfg)), &out)?;
            Ok(0)
        }
        Command::Run { config, io } => {
            let jobs = resolved_jobs(&io);
            let mut cfgs = Vec::new();
            for path in &config {
                let mut cfg = ScenarioConfig::load(path)
                    .with_context(|| format!("loading {}", path.display()))?;
                if let Some(seed) = io.seed {
                    cfg.certification.seed = seed;
                }
                cfgs.push(cfg);
            }
            let next = std::sync::atomic::AtomicUsize::new(0);
            let results: Vec<(usize, Result<ReportBundle>)> = std::thread::scope(|scope| {
                let mut handles = Vec::new();
                for _ in 0..jobs.min(cfgs.len()) {
                    let next = &next;
                    let cfgs = &cfgs;
                    handles.push(scope.spawn(move || {
                        let mut out = Vec::new();
                        loop {
                            let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                            if i >= cfgs.len() {
                                break;
                            }
                            out.push((i, run_scenario(&cfgs[i])));
                        }
                        out
                    }));
                }
                handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
            });
            let mut code = 0;
            let mut ordered: Vec<(usize, ReportBundle)> = Vec::new();
            for (i, res) in results {
                ordered.push((i, res.with_context(|| format!("scenario `{}`", cfgs[i].name))?));
            }
            ordered.sort_by_key(|(i, _)| *i);
            for (i, bundle) in ordered {
                println!("== {}", bundle.scenario);
                code = code.max(finish(&bundle, &io, &cfgs[i])?);
            }
            Ok(code)
        }
        Command::Suite { io } => {
            let seed = io.seed.unwrap_or(0);
            let out = resolved_out(&io, None);
            let formats = resolved_formats(&io, None);
            let jobs = resolved_jobs(&io);
            let outcome = suite::run_suite(seed, &out, &formats, jobs)?;
            Ok(outcome.exit_code())
        }
    }
}
