//! Numerical verification of power concavity for radial elliptic and
//! parabolic boundary value problems on rotationally symmetric balls.
//!
//! The crate models a ball `B(R)` in an `N`-dimensional rotationally symmetric
//! manifold through its conformal polar factor σ, solves the radial reductions
//! of the Dirichlet problems `-Δu = F(u)` and their parabolic counterparts,
//! computes first Dirichlet eigenpairs and space-form heat kernels, and
//! certifies strict α-concavity of the resulting profiles along geodesics —
//! both through the radial derivative criteria for `w = L_{1-α}(v)` and by
//! sampling the α-mean inequality on integrated geodesics.

// `!(x > 0.0)` deliberately sends NaN down the error path; `x <= 0.0` would
// accept it.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod concavity;
pub mod elliptic;
pub mod error;
pub mod geometry;
pub mod heat_kernel;
mod interp;
mod jet;
mod linalg;
pub mod parabolic;
pub mod power_mean;
pub mod profile;
pub mod quad;
pub mod special;
pub mod thresholds;

pub use concavity::{
    certify_both, certify_geodesic_samples, certify_radial, default_strictness, w_transform,
    CertifyMethod, ConcavityCertificate, GeodesicCheck, Verdict, WTransform,
};
pub use elliptic::{
    eigenvalue_space_form, first_eigenpair, solve_dirichlet_bvp, solve_power_bvp, EigenSolution,
};
pub use error::{Error, Result};
pub use geometry::{
    check_condition, connect_geodesic, integrate_geodesic, log_sigma_derivs,
    radial_sectional_curvature, Ball, Condition, ConditionReport, Geodesic, GeodesicSample,
    SigmaJet, WarpedFactor,
};
pub use heat_kernel::{
    kernel_log_concavity, kernel_log_value, kernel_mass, kernel_value, unit_sphere_area,
    KernelSpec,
};
pub use parabolic::{concavity_onset_time, evolve, steady_state, EvolutionState, Reaction};
pub use power_mean::{alpha_mean, q_exp, q_log, AlphaIndex, QIndex};
pub use profile::RadialProfile;
pub use special::{bessel_first_zero, bessel_j};
pub use thresholds::{
    alpha_threshold, cheng_check, curvature_bounds, small_ball_threshold, ChengReport,
    ThresholdReport,
};
