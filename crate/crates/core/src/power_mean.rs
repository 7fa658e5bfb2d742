//! q-logarithm, q-exponential and α-weighted means.
//!
//! For `0 ≤ q < 1` the q-logarithm is `L_q(ξ) = (ξ^{1-q} - 1)/(1-q)` and its
//! inverse is `E_q(x) = [1 + (1-q)x]^{1/(1-q)}`, defined for `x > ℓ_q` with
//! `ℓ_q = -1/(1-q)`. At `q = 1` these degenerate to the ordinary log/exp pair.
//! The transform `w = L_{1-α}(v)` converts α-concavity of `v` into ordinary
//! concavity of `w`, which is how the certification modules use it.
//!
//! `M_α(a, b; μ)` is the α-weighted mean `[(1-μ)a^α + μb^α]^{1/α}` with the
//! usual conventions: geometric mean at `α = 0`, max/min at `α = ±∞`, and
//! `M_α(a, b; μ) = 0` whenever `α < 0` and `a·b = 0`.

use crate::error::{Error, Result};

/// Below this distance from `q = 1` the transforms switch to exact log/exp.
const Q_ONE_EPS: f64 = 1e-12;

/// Transform index `q ∈ [0, 1]`. Related to the concavity power by `q = 1 - α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QIndex(f64);

impl QIndex {
    pub fn new(q: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::Domain(format!("q = {q} outside [0, 1]")));
        }
        Ok(QIndex(q))
    }

    /// The index `q = 1 - α` used by the concavity transform, `α ∈ [0, 1]`.
    pub fn from_alpha(alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::Domain(format!("alpha = {alpha} outside [0, 1]")));
        }
        Self::new(1.0 - alpha)
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// Domain floor `ℓ_q` of the q-exponential: `-1/(1-q)` for `q < 1`, `-∞` at `q = 1`.
    pub fn floor(self) -> f64 {
        let p = 1.0 - self.0;
        if p.abs() < Q_ONE_EPS {
            f64::NEG_INFINITY
        } else {
            -1.0 / p
        }
    }
}

/// `L_q(ξ)`, the q-logarithm of `ξ > 0`.
///
/// Computed as `expm1((1-q)·ln ξ)/(1-q)` so that small `1-q` does not cancel.
pub fn q_log(q: QIndex, xi: f64) -> Result<f64> {
    if !(xi > 0.0) {
        return Err(Error::Domain(format!("q_log argument {xi} must be positive")));
    }
    let p = 1.0 - q.get();
    if p.abs() < Q_ONE_EPS {
        Ok(xi.ln())
    } else {
        Ok(f64::exp_m1(p * xi.ln()) / p)
    }
}

/// `E_q(x)`, the q-exponential; inverse of [`q_log`]. Requires `x > ℓ_q`.
pub fn q_exp(q: QIndex, x: f64) -> Result<f64> {
    let p = 1.0 - q.get();
    if p.abs() < Q_ONE_EPS {
        return Ok(x.exp());
    }
    let floor = q.floor();
    if !(x > floor) {
        return Err(Error::QExpFloor { arg: x, floor });
    }
    Ok(f64::exp(f64::ln_1p(p * x) / p))
}

/// Mean exponent `α ∈ [-∞, +∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaIndex(f64);

impl AlphaIndex {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_nan() {
            return Err(Error::Domain("alpha must not be NaN".into()));
        }
        Ok(AlphaIndex(alpha))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// The α-weighted mean `M_α(a, b; μ)` of `a, b ≥ 0` with weight `μ ∈ (0, 1)`.
pub fn alpha_mean(alpha: AlphaIndex, a: f64, b: f64, mu: f64) -> Result<f64> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(Error::Domain(format!("weight mu = {mu} outside (0, 1)")));
    }
    if a < 0.0 || b < 0.0 {
        return Err(Error::Domain(format!("alpha_mean arguments ({a}, {b}) must be nonnegative")));
    }
    // Canonicalize to mu <= 1/2 so that M(a, b; mu) and M(b, a; 1-mu) run the
    // same arithmetic and the weight symmetry holds bit-exactly.
    let (a, b, mu) = if mu > 0.5 { (b, a, 1.0 - mu) } else { (a, b, mu) };
    let al = alpha.get();
    if al == f64::INFINITY {
        return Ok(a.max(b));
    }
    if al == f64::NEG_INFINITY {
        return Ok(a.min(b));
    }
    if al < 0.0 && a * b == 0.0 {
        return Ok(0.0);
    }
    if al == 0.0 {
        if a == 0.0 || b == 0.0 {
            return Ok(0.0);
        }
        // log-space keeps extreme a, b from overflowing
        return Ok(f64::exp((1.0 - mu) * a.ln() + mu * b.ln()));
    }
    // Factor out the dominant argument so the powers stay in [0, 1]; this also
    // makes the mean exactly homogeneous under common rescaling. Normalizing
    // by the weight sum keeps the 1/α exponent from amplifying the half-ulp
    // the complement 1-mu may carry.
    let m = if al > 0.0 { a.max(b) } else { a.min(b) };
    if m == 0.0 {
        return Ok(0.0); // only reachable for al > 0 with a = b = 0
    }
    let (wa, wb) = (1.0 - mu, mu);
    let ra = (a / m).powf(al);
    let rb = (b / m).powf(al);
    Ok(m * ((wa * ra + wb * rb) / (wa + wb)).powf(1.0 / al))
}
