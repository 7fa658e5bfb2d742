//! Quadrature helpers: adaptive Simpson and composite Gauss–Legendre.

use crate::error::{Error, Result};

/// Positive abscissae/weights of the 16-point Gauss–Legendre rule on [-1, 1].
const GL16: [(f64, f64); 8] = [
    (9.5012509837637454e-2, 1.8945061045506859e-1),
    (2.8160355077925892e-1, 1.8260341504492361e-1),
    (4.5801677765722737e-1, 1.6915651939500262e-1),
    (6.1787624440264377e-1, 1.4959598881657676e-1),
    (7.5540440835500300e-1, 1.2462897125553403e-1),
    (8.6563120238783176e-1, 9.5158511682492591e-2),
    (9.4457502307323260e-1, 6.2253523938647706e-2),
    (9.8940093499164994e-1, 2.7152459411754037e-2),
];

/// 16-point Gauss–Legendre on a single interval.
pub fn gauss16(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut sum = 0.0;
    for &(x, w) in &GL16 {
        sum += w * (f(mid + half * x) + f(mid - half * x));
    }
    half * sum
}

/// Composite 16-point Gauss–Legendre over `panels` equal subintervals.
pub fn composite_gauss16(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels).map(|i| gauss16(f, a + i as f64 * h, a + (i + 1) as f64 * h)).sum()
}

/// Adaptive Simpson with the classical Richardson acceptance test.
///
/// `tol` is absolute; pick it relative to the expected integral scale.
pub fn adaptive_simpson(
    f: &mut impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<f64> {
    if !(b > a) {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut evals = 0usize;
    let v = simpson_recurse(f, a, b, fa, fm, fb, whole, tol, 52, &mut evals)?;
    Ok(v)
}

#[allow(clippy::too_many_arguments)]
fn simpson_recurse(
    f: &mut impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    evals: &mut usize,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    *evals += 2;
    if *evals > 40_000_000 {
        return Err(Error::SolverFailure("adaptive quadrature exceeded its evaluation budget".into()));
    }
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 {
        return Err(Error::SolverFailure(format!(
            "adaptive quadrature failed to converge on [{a}, {b}]"
        )));
    }
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    let l = simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, evals)?;
    let r = simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, evals)?;
    Ok(l + r)
}
