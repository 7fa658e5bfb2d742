//! The conformal polar factor σ and its derivatives.
//!
//! A rotationally symmetric ball carries the metric `dρ² + σ(ρ)² g_{S^{N-1}}`.
//! Everything downstream (radial Laplacian coefficients, curvature, the
//! concavity conditions) is a function of σ, σ', σ'', σ''', so the factor
//! kinds below all expose an exact jet of those four values.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// σ and its first three derivatives at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaJet {
    pub sigma: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

/// Warping function of a rotationally symmetric ball.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum WarpedFactor {
    /// Constant-curvature model: `sin(√K r)/√K`, `r`, or `sinh(√-K r)/√-K`.
    SpaceForm { curvature: f64 },
    /// `σ(r) = r + c r³`; pinched curvature `-6c/(1 + c r²)`.
    CubicPerturbed { coeff: f64 },
    /// Sampled σ values with a sliding degree-5 local polynomial interpolant.
    ///
    /// Cubic splines have discontinuous third derivatives, which would corrupt
    /// the `(log σ)'''` condition checks; degree 5 keeps the jet meaningful.
    Tabulated { nodes: Vec<f64>, values: Vec<f64> },
}

impl WarpedFactor {
    pub fn space_form(curvature: f64) -> Self {
        WarpedFactor::SpaceForm { curvature }
    }

    pub fn cubic_perturbed(coeff: f64) -> Self {
        WarpedFactor::CubicPerturbed { coeff }
    }

    pub fn tabulated(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if nodes.len() != values.len() {
            return Err(Error::Domain("tabulated factor: nodes/values length mismatch".into()));
        }
        if nodes.len() < 6 {
            return Err(Error::Domain("tabulated factor needs at least 6 nodes".into()));
        }
        if !nodes.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Domain("tabulated nodes must be strictly increasing".into()));
        }
        if !(nodes[0] > 0.0) {
            return Err(Error::Domain("tabulated nodes must be positive".into()));
        }
        if !values.iter().all(|&v| v > 0.0) {
            return Err(Error::Domain("tabulated values must be positive".into()));
        }
        Ok(WarpedFactor::Tabulated { nodes, values })
    }

    /// Largest radius at which σ is defined and positive.
    pub fn domain_end(&self) -> f64 {
        match *self {
            WarpedFactor::SpaceForm { curvature } if curvature > 0.0 => {
                std::f64::consts::PI / curvature.sqrt()
            }
            WarpedFactor::SpaceForm { .. } => f64::INFINITY,
            WarpedFactor::CubicPerturbed { coeff } if coeff < 0.0 => (-1.0 / coeff).sqrt(),
            WarpedFactor::CubicPerturbed { .. } => f64::INFINITY,
            WarpedFactor::Tabulated { ref nodes, .. } => *nodes.last().unwrap(),
        }
    }

    /// Evaluate `(σ, σ', σ'', σ''')` at `r ∈ (0, domain_end)`.
    pub fn eval(&self, r: f64) -> Result<SigmaJet> {
        if !(r > 0.0) {
            return Err(Error::Domain(format!("sigma evaluated at r = {r} <= 0")));
        }
        if r >= self.domain_end() {
            return Err(Error::Domain(format!(
                "sigma evaluated at r = {r} beyond factor domain ({})",
                self.domain_end()
            )));
        }
        match *self {
            WarpedFactor::SpaceForm { curvature: k } => {
                let jet = if k > 0.0 {
                    let s = k.sqrt();
                    let sigma = (s * r).sin() / s;
                    SigmaJet { sigma, d1: (s * r).cos(), d2: -k * sigma, d3: -k * (s * r).cos() }
                } else if k < 0.0 {
                    let s = (-k).sqrt();
                    let sigma = (s * r).sinh() / s;
                    SigmaJet { sigma, d1: (s * r).cosh(), d2: -k * sigma, d3: -k * (s * r).cosh() }
                } else {
                    SigmaJet { sigma: r, d1: 1.0, d2: 0.0, d3: 0.0 }
                };
                Ok(jet)
            }
            WarpedFactor::CubicPerturbed { coeff: c } => Ok(SigmaJet {
                sigma: r + c * r * r * r,
                d1: 1.0 + 3.0 * c * r * r,
                d2: 6.0 * c * r,
                d3: 6.0 * c,
            }),
            WarpedFactor::Tabulated { ref nodes, ref values } => {
                Ok(local_quintic_jet(nodes, values, r))
            }
        }
    }

    /// Numerical check of the origin limits `σ(r)/r → 1`, `σ''(r) → 0`.
    ///
    /// Probes at `r = 10⁻⁶·scale` and demands 10⁻⁴ relative agreement.
    pub fn origin_ok(&self, scale: f64) -> Result<bool> {
        let r = 1e-6 * scale;
        let jet = self.eval(r)?;
        let ratio_err = (jet.sigma / r - 1.0).abs();
        let d2_err = (jet.d2 * r).abs() / jet.sigma.abs().max(1e-300);
        Ok(ratio_err <= 1e-4 && d2_err <= 1e-4)
    }
}

/// Degree-5 Newton interpolation through the 6 nodes nearest `r`, with the
/// polynomial's first three derivatives accumulated during Horner evaluation.
fn local_quintic_jet(nodes: &[f64], values: &[f64], r: f64) -> SigmaJet {
    let n = nodes.len();
    let i = match nodes.binary_search_by(|x| x.partial_cmp(&r).unwrap()) {
        Ok(i) => i,
        Err(i) => i,
    };
    let start = i.saturating_sub(3).min(n - 6);
    let xs = &nodes[start..start + 6];
    let ys = &values[start..start + 6];

    // Newton divided differences
    let mut coef = [0.0; 6];
    let mut work: [f64; 6] = ys.try_into().unwrap();
    coef[0] = work[0];
    for order in 1..6 {
        for j in (order..6).rev() {
            work[j] = (work[j] - work[j - 1]) / (xs[j] - xs[j - order]);
        }
        coef[order] = work[order];
    }

    // Horner with derivative accumulation: p = c_k + (r - x_k) p_old
    let mut p = coef[5];
    let (mut p1, mut p2, mut p3) = (0.0, 0.0, 0.0);
    for k in (0..5).rev() {
        let dx = r - xs[k];
        p3 = 3.0 * p2 + dx * p3;
        p2 = 2.0 * p1 + dx * p2;
        p1 = p + dx * p1;
        p = coef[k] + dx * p;
    }
    SigmaJet { sigma: p, d1: p1, d2: p2, d3: p3 }
}

/// `((log σ)', (log σ)'', (log σ)''')` via the quotient formulas
/// `σ'/σ`, `(σσ'' - σ'²)/σ²`, `(2σ'³ - 3σσ'σ'' + σ²σ''')/σ³`.
pub fn log_sigma_derivs(factor: &WarpedFactor, r: f64) -> Result<(f64, f64, f64)> {
    let j = factor.eval(r)?;
    let s = j.sigma;
    let d1 = j.d1 / s;
    let d2 = (s * j.d2 - j.d1 * j.d1) / (s * s);
    let d3 = (2.0 * j.d1.powi(3) - 3.0 * s * j.d1 * j.d2 + s * s * j.d3) / (s * s * s);
    Ok((d1, d2, d3))
}

/// Sectional curvature of a tangent plane containing the radial direction:
/// `K(r) = -σ''(r)/σ(r)`.
pub fn radial_sectional_curvature(factor: &WarpedFactor, r: f64) -> Result<f64> {
    let j = factor.eval(r)?;
    Ok(-j.d2 / j.sigma)
}
