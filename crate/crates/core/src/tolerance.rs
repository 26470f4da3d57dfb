//! Numerical tolerances shared by every construction.
//!
//! Solvers run two orders of magnitude tighter than the comparisons that
//! check them.

/// Exact-formula residuals (collapse widths, convex-combination formulas).
pub const FORMULA: f64 = 1e-12;

/// Inversion of monotone sampled maps.
pub const BISECTION: f64 = 1e-12;

/// Comparison of holonomy maps and leaf-membership residuals.
pub const COMPARISON: f64 = 1e-9;

/// Agreement of holonomy data across shared faces.
pub const FACE_COMPATIBILITY: f64 = 1e-6;

/// Per-box restriction of scene-level blowups versus per-box blowups.
pub const BOX_COMPATIBILITY: f64 = 1e-10;

/// Finite-difference flatness of damping profiles at the endpoints.
pub const FLATNESS: f64 = 1e-9;

/// Maximum number of partition refinements in measure-then-retry loops.
pub const RETRY_CAP: usize = 5;
