//! Tridiagonal solves (Thomas algorithm).

/// Solve `A x = d` for tridiagonal `A` given by `lower` (len n-1), `diag`
/// (len n), `upper` (len n-1). Overwrites nothing; returns the solution.
pub(crate) fn thomas_solve(lower: &[f64], diag: &[f64], upper: &[f64], d: &[f64]) -> Vec<f64> {
    let n = diag.len();
    debug_assert_eq!(lower.len(), n - 1);
    debug_assert_eq!(upper.len(), n - 1);
    debug_assert_eq!(d.len(), n);
    let mut c_star = vec![0.0; n - 1];
    let mut d_star = vec![0.0; n];
    c_star[0] = upper[0] / diag[0];
    d_star[0] = d[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - lower[i - 1] * c_star[i - 1];
        if i < n - 1 {
            c_star[i] = upper[i] / m;
        }
        d_star[i] = (d[i] - lower[i - 1] * d_star[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d_star[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d_star[i] - c_star[i] * x[i + 1];
    }
    x
}
