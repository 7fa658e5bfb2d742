//! Cubic Hermite interpolation on a single step, shared by the integrators.

/// Hermite value on `[0, 1]` from endpoint values and slopes (slopes already
/// scaled by the step length).
pub(crate) fn hermite(u: f64, f0: f64, m0: f64, f1: f64, m1: f64) -> f64 {
    let (u2, u3) = (u * u, u * u * u);
    (2.0 * u3 - 3.0 * u2 + 1.0) * f0
        + (u3 - 2.0 * u2 + u) * m0
        + (-2.0 * u3 + 3.0 * u2) * f1
        + (u3 - u2) * m1
}

/// Solve `hermite(u) = target` on `[0, 1]` by bisection, assuming the
/// endpoint values bracket the target.
pub(crate) fn hermite_cross(f0: f64, m0: f64, f1: f64, m1: f64, target: f64) -> f64 {
    let g = |u: f64| hermite(u, f0, m0, f1, m1) - target;
    let (mut lo, mut hi) = (0.0, 1.0);
    let glo = g(lo);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if (g(mid) > 0.0) == (glo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
