//! Numerical thresholds shared across modules.
//!
//! Catalog algebras have small integer structure constants, so most residuals
//! below are pure floating-point noise and the thresholds sit a few orders of
//! magnitude above machine epsilon.

/// Jacobi residual bound, relative to `(1 + max|c|)^2`.
pub const JACOBI_TOL: f64 = 1e-10;
/// Ideal, subalgebra and reductivity residuals.
pub const IDEAL_TOL: f64 = 1e-9;
/// Rank decisions: singular values below this fraction of the largest are zero.
pub const RANK_TOL: f64 = 1e-9;
/// Killing-form eigenvalues must lie below `-DEFINITENESS_TOL`.
pub const DEFINITENESS_TOL: f64 = 1e-8;
/// Skewness of the isotropy action and equivariance of metrics.
pub const SKEW_TOL: f64 = 1e-9;
/// Agreement between the Ricci formula and the connection-based oracle.
pub const ORACLE_TOL: f64 = 1e-9;
/// Slack on the Ricci lower bound along the top fiber eigendirection.
pub const BOCHNER_TOL: f64 = 1e-8;
/// Slack on the mean-curvature and mixed-term audit.
pub const AUDIT_TOL: f64 = 1e-9;
/// Slack on discrete slopes of the fiber sup.
pub const SLOPE_TOL: f64 = 1e-4;
/// Extinction time slack, relative to the linear-shrinking bound.
pub const TIME_TOL_REL: f64 = 1e-3;
/// Slack of the discrete comparison check.
pub const COMPARISON_TOL: f64 = 1e-6;
/// Scalar curvature may decrease by at most this much (times `1 + |s|`) per step.
pub const SCALAR_MONOTONE_TOL: f64 = 1e-6;
