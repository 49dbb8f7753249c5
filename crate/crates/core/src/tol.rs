//! Numerical thresholds shared across the crate.
//!
//! Every comparison that decides pass/fail or raises an error reads one of
//! these constants, so the contract lives in a single place.

/// Minimum admissible `|1 + mu*g|` for a regressive function.
pub const REG_TOL: f64 = 1e-12;

/// Relative residual tolerance for constructed solutions on discrete grids.
pub const RESIDUAL_TOL: f64 = 1e-9;

/// Relative guard on `|y(t) y(sigma(t))|` against `max |y|^2`.
pub const DENOM_TOL: f64 = 1e-12;

/// Relative guard on the Wronskian against the product of basis scales.
pub const WRONSKIAN_TOL: f64 = 1e-12;

/// Multiplicative slack on bound verdicts, absorbs roundoff only.
pub const VERDICT_SLACK: f64 = 1e-10;

/// Relative tolerance of the Abel identity `W(t) = e_g(t, t0) W(t0)`.
pub const ABEL_TOL: f64 = 1e-9;

/// Relative tolerance on the Vieta relations of characteristic roots.
pub const VIETA_TOL: f64 = 1e-12;

/// Relative tolerance for matching a configured time value to a grid point.
pub const GRID_MATCH_TOL: f64 = 1e-9;

/// Relative tolerance for the uniform-mesh invariant of continuum grids.
pub const MESH_TOL: f64 = 1e-12;

/// Accepted band for the first-order refinement ratio.
pub const REFINEMENT_BAND: (f64, f64) = (1.8, 2.2);
