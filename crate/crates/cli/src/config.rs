//! Scenario configuration: a versioned TOML document describing the
//! geometry, the problem, and the certification/solver/output knobs.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use warpcav_core::geometry::{Ball, WarpedFactor};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub config_version: u32,
    pub name: String,
    pub geometry: GeometryConfig,
    pub problem: ProblemConfig,
    #[serde(default)]
    pub certification: CertificationConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curvature: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficient: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    pub dimension: u32,
    pub radius: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemConfig {
    /// `-Δu = λ u^γ` with zero boundary data.
    Elliptic { lambda: f64, gamma: f64 },
    /// First Dirichlet eigenpair.
    Eigen {},
    /// `∂_t u = Δu ∓ reaction`, method of lines.
    Parabolic {
        kind: ParabolicKind,
        #[serde(default)]
        lambda: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        nu: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        gamma: Option<f64>,
        initial: InitialData,
        t_end: f64,
        times: Vec<f64>,
    },
    /// Space-form heat kernels at the listed times.
    HeatKernel { times: Vec<f64>, sample_box: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParabolicKind {
    Heat,
    PowerAbsorption,
    PowerSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialData {
    /// First eigenfunction (log-concave).
    Eigenfunction,
    /// `cos(πr/2R)`: smooth, positive, log-concave.
    Bump,
    /// Gaussian annulus, deliberately not quasi-concave.
    Ring,
    Zero,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificationConfig {
    #[serde(default)]
    pub alphas: Vec<f64>,
    /// Use `A(σ, R, N)` from the threshold computation as the power.
    #[serde(default)]
    pub alpha_auto: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary_cut: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    pub pairs: usize,
    pub params: usize,
    pub seed: u64,
}

impl Default for CertificationConfig {
    fn default() -> Self {
        CertificationConfig {
            alphas: Vec::new(),
            alpha_auto: false,
            boundary_cut: None,
            epsilon: None,
            pairs: 200,
            params: 9,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub grid: usize,
    pub dt: f64,
    pub tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { grid: 4096, dt: 1e-4, tol: 1e-8 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub directory: String,
    pub formats: Vec<String>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { directory: "out".into(), formats: vec!["csv".into(), "json".into()] }
    }
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).context("parsing scenario config")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.config_version != CONFIG_VERSION {
            bail!(
                "config_version {} not supported (expected {CONFIG_VERSION})",
                self.config_version
            );
        }
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            bail!("scenario name must be a nonempty path-safe string");
        }
        match &self.problem {
            ProblemConfig::Elliptic { lambda, gamma } => {
                if !(*lambda > 0.0) {
                    bail!("elliptic lambda must be positive");
                }
                if !(0.0..=1.0).contains(gamma) {
                    bail!("elliptic gamma must lie in [0, 1]");
                }
            }
            ProblemConfig::Eigen {} => {}
            ProblemConfig::Parabolic { kind, lambda, nu, gamma, t_end, times, .. } => {
                if *lambda < 0.0 {
                    bail!("parabolic lambda must be nonnegative");
                }
                match kind {
                    ParabolicKind::Heat => {
                        if *lambda != 0.0 || nu.is_some() || gamma.is_some() {
                            bail!("heat flow takes no reaction parameters");
                        }
                    }
                    ParabolicKind::PowerAbsorption => {
                        if gamma.is_some() {
                            bail!("power absorption uses nu, not gamma");
                        }
                        if !(nu.unwrap_or(1.0) >= 1.0) {
                            bail!("power absorption needs nu >= 1");
                        }
                    }
                    ParabolicKind::PowerSource => {
                        if nu.is_some() {
                            bail!("power source uses gamma, not nu");
                        }
                        let g = gamma.unwrap_or(0.0);
                        if !(0.0..=1.0).contains(&g) {
                            bail!("power source needs gamma in [0, 1]");
                        }
                    }
                }
                if !(*t_end > 0.0) {
                    bail!("t_end must be positive");
                }
                if times.is_empty() {
                    bail!("parabolic runs need at least one sample time");
                }
            }
            ProblemConfig::HeatKernel { times, sample_box } => {
                if times.is_empty() || times.iter().any(|t| !(*t > 0.0)) {
                    bail!("heat kernel times must be positive and nonempty");
                }
                if !(*sample_box > 0.0) {
                    bail!("sample_box must be positive");
                }
            }
        }
        for a in &self.certification.alphas {
            if !(0.0..=1.0).contains(a) {
                bail!("certification alpha {a} outside [0, 1]");
            }
        }
        if self.certification.alphas.is_empty()
            && !self.certification.alpha_auto
            && !matches!(self.problem, ProblemConfig::HeatKernel { .. })
        {
            bail!("no certification powers: set certification.alphas or alpha_auto");
        }
        Ok(())
    }

    pub fn build_ball(&self) -> Result<Ball> {
        let g = &self.geometry;
        let factor = match g.kind.as_str() {
            "space_form" => WarpedFactor::space_form(
                g.curvature.context("space_form geometry needs `curvature`")?,
            ),
            "cubic_perturbed" => WarpedFactor::cubic_perturbed(
                g.coefficient.context("cubic_perturbed geometry needs `coefficient`")?,
            ),
            "tabulated" => WarpedFactor::tabulated(
                g.nodes.clone().context("tabulated geometry needs `nodes`")?,
                g.values.clone().context("tabulated geometry needs `values`")?,
            )?,
            other => bail!("unknown geometry kind `{other}`"),
        };
        Ok(Ball::new(g.dimension, g.radius, factor)?)
    }

    /// Stable hash of the canonical serialized config; certificates embed it.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let canonical = toml::to_string(self).unwrap_or_default();
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
