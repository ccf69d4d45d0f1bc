//! Numerical tolerances shared across the crate.
//!
//! Comparisons are absolute on eigenvalues and scaled by `(1 + magnitude)` on
//! residuals.

/// Positivity, hermiticity and state-validity tolerance.
pub const POSITIVITY_TOL: f64 = 1e-9;

/// Tolerance on norms in map classification and reporting.
pub const CLASSIFY_TOL: f64 = 1e-8;

/// Jacobi stops once the off-diagonal Frobenius norm is below this times
/// `1 + ||H||_F`.
pub const EIG_CONVERGENCE: f64 = 1e-12;

pub const MAX_JACOBI_SWEEPS: usize = 100;

/// Distribution weights within this of `[0, 1]` are clamped at construction.
pub const DIST_CLAMP: f64 = 1e-12;

/// Row sums of distributions must be within this of 1.
pub const DIST_SUM_TOL: f64 = 1e-9;

/// Entries extracted from a PU map may stray this far before being rejected.
pub const EXTRACTION_TOL: f64 = 1e-8;

/// Default number of rank-one projections per block when certifying
/// positivity on a matrix domain.
pub const DEFAULT_POSITIVITY_SAMPLES: usize = 1000;
