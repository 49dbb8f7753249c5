//! Exponential growth bounds and the uniqueness checks built on them.
//!
//! For a homogeneous solution and `k = 1 + |p| + |q|` (or `1 + p1 + q1` with
//! `|p| <= p1`, `|q| <= q1`), the energy `u = y^2 + (y^Δ)^2` obeys
//! `u^Δ <= (k ⊕ k) u`, hence `||y(t)||_2 <= ||y(t0)||_2 e_k(t, t0)` for
//! `t >= t0`. Everything here is checked forward of `t0` only.

use crate::error::{Error, Result};
use crate::particular::{assemble_general, reduction_order_any, variation_particular, Basis};
use crate::solver::{ensure_homogeneous, fundamental_pair, step_ivp, ProblemSpec};
use crate::timescale::{check_regressive, circle_plus, delta_derivative, exp_delta, GridFn, RegressiveFn};
use crate::tol;

/// Which constant drives the envelope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundMode {
    /// `k = 1 + |p| + |q|` for constant coefficients.
    ConstCoeff,
    /// `k = 1 + p1 + q1`; missing bounds default to the maxima over the window.
    VarCoeff { p1: Option<f64>, q1: Option<f64> },
}

/// Norm, envelope and verdicts on the window `t0 <= t` of `T^kappa`.
///
/// Vectors are indexed from `start`, so entry `j` belongs to grid index
/// `start + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub start: usize,
    pub k: f64,
    pub norm: Vec<f64>,
    pub envelope: Vec<f64>,
    pub margin: Vec<f64>,
    pub verdict: Vec<bool>,
    /// First index where `u^Δ <= (k ⊕ k) u` fails, if any.
    pub lemma_violation: Option<usize>,
}

impl BoundReport {
    pub fn all_pass(&self) -> bool {
        self.verdict.iter().all(|&v| v) && self.lemma_violation.is_none()
    }

    pub fn min_margin(&self) -> f64 {
        self.margin.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// `sqrt(y^2 + (y^Δ)^2)` on the common prefix, at most `T^kappa`.
pub fn sol_norm2(y: &GridFn, y_delta: &GridFn) -> Result<GridFn> {
    if !y.same_grid(y_delta) {
        return Err(Error::GridMismatch);
    }
    let len = y.len().min(y_delta.len()).min(y.ts().kappa_len());
    let values = (0..len).map(|i| y.get(i).hypot(y_delta.get(i))).collect();
    GridFn::new(y.ts(), values)
}

fn within(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + tol::VERDICT_SLACK * lhs.abs().max(rhs.abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GronwallReport {
    /// `1 + mu ell > 0` on `T^kappa`.
    pub positively_regressive: bool,
    /// First index `t >= t0` with `v^Δ > ell v`.
    pub hypothesis_violation: Option<usize>,
    /// First index `t >= t0` with `v > v(t0) e_ell(t, t0)`.
    pub conclusion_violation: Option<usize>,
}

impl GronwallReport {
    pub fn holds(&self) -> bool {
        self.positively_regressive && self.hypothesis_violation.is_none() && self.conclusion_violation.is_none()
    }
}

/// Checks the hypothesis and the conclusion of the Gronwall inequality.
pub fn gronwall_check(v: &GridFn, ell: &RegressiveFn, t0_idx: usize) -> GronwallReport {
    let ts = v.ts();
    let positively_regressive = ell.is_positively_regressive();
    let dv = delta_derivative(v);
    let hypothesis_violation =
        (t0_idx..dv.len().min(ts.kappa_len())).find(|&i| !within(dv.get(i), ell.as_grid().get(i) * v.get(i)));
    let conclusion_violation = exp_delta(ell, t0_idx.min(ts.len() - 1)).ok().and_then(|e| {
        let v0 = v.get(t0_idx);
        (t0_idx..v.len()).find(|&i| !within(v.get(i), v0 * e.get(i)))
    });
    GronwallReport { positively_regressive, hypothesis_violation, conclusion_violation }
}

fn window_max(f: &GridFn, from: usize, to: usize) -> f64 {
    (from..to.min(f.len())).fold(0.0, |m, i| m.max(f.get(i).abs()))
}

fn growth_constant(spec: &ProblemSpec, mode: BoundMode) -> Result<f64> {
    let ts = spec.ts();
    let (from, to) = (spec.t0_idx(), ts.kappa2_len());
    match mode {
        BoundMode::ConstCoeff => {
            let (p, q) = (spec.p(), spec.q());
            let constant = |f: &GridFn| (0..ts.kappa2_len()).all(|i| f.get(i) == f.get(0));
            if !constant(p) || !constant(q) {
                return Err(Error::NonConstantCoefficients);
            }
            Ok(1.0 + p.get(0).abs() + q.get(0).abs())
        }
        BoundMode::VarCoeff { p1, q1 } => {
            let pmax = window_max(spec.p(), from, to);
            let qmax = window_max(spec.q(), from, to);
            let p1 = p1.unwrap_or(pmax);
            let q1 = q1.unwrap_or(qmax);
            if !(p1 >= pmax) {
                return Err(Error::InvalidBound(format!("p1 = {p1} is below max |p| = {pmax}")));
            }
            if !(q1 >= qmax) {
                return Err(Error::InvalidBound(format!("q1 = {q1} is below max |q| = {qmax}")));
            }
            Ok(1.0 + p1 + q1)
        }
    }
}

/// Compares `||y(t)||_2` against `||y(t0)||_2 e_k(t, t0)` for `t >= t0`.
///
/// `y` must solve the homogeneous equation of `spec`; the forcing of `spec`
/// is ignored.
pub fn growth_bound_check(spec: &ProblemSpec, y: &GridFn, mode: BoundMode) -> Result<BoundReport> {
    let ts = spec.ts();
    if !y.same_grid(spec.p()) || y.len() != ts.len() {
        return Err(Error::GridMismatch);
    }
    ensure_homogeneous(spec, y, tol::RESIDUAL_TOL)?;
    let k = growth_constant(spec, mode)?;
    let t0 = spec.t0_idx();

    let k_fn = check_regressive(&GridFn::constant(ts, k)?, tol::REG_TOL)?;
    let e_k = exp_delta(&k_fn, t0)?;
    let y_delta = delta_derivative(y);
    let norm_full = sol_norm2(y, &y_delta)?;

    let window = t0..ts.kappa_len();
    let norm: Vec<f64> = window.clone().map(|i| norm_full.get(i)).collect();
    let n0 = norm_full.get(t0);
    let envelope: Vec<f64> = window.clone().map(|i| n0 * e_k.get(i)).collect();
    let margin: Vec<f64> = norm.iter().zip(&envelope).map(|(n, e)| e - n).collect();
    let verdict: Vec<bool> = norm.iter().zip(&envelope).map(|(&n, &e)| n <= e * (1.0 + tol::VERDICT_SLACK)).collect();

    // u^Δ at t needs y^Δ(σ t), so the lemma lives on T^kappa^2.
    let u = |i: usize| norm_full.get(i).powi(2);
    let lemma_violation = (t0..ts.kappa2_len()).find(|&i| {
        let mu = ts.mu(i);
        let u_delta = (u(i + 1) - u(i)) / mu;
        !within(u_delta, circle_plus(k, k, mu) * u(i))
    });

    Ok(BoundReport { start: t0, k, norm, envelope, margin, verdict, lemma_violation })
}

/// Largest gaps between three constructions of the same solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonmultiplicityReport {
    /// `max |y_step - y_ro|` over `t >= t0`.
    pub dev_reduction: f64,
    /// `max |y_step - y_vop|` over `t >= t0`.
    pub dev_variation: f64,
    /// `max |y_step|` over `t >= t0`.
    pub scale: f64,
    pub basis: Basis,
}

impl NonmultiplicityReport {
    /// Largest deviation relative to the solution scale.
    pub fn relative(&self) -> f64 {
        let dev = self.dev_reduction.max(self.dev_variation);
        if dev == 0.0 {
            0.0
        } else if self.scale > 0.0 {
            dev / self.scale
        } else {
            f64::INFINITY
        }
    }
}

/// Builds the solution by stepping, by reduction of order and by variation of
/// parameters, and measures how far apart they are forward of `t0`.
pub fn nonmultiplicity_check(spec: &ProblemSpec) -> Result<NonmultiplicityReport> {
    let ts = spec.ts();
    let t0 = spec.t0_idx();
    let (stepped, _) = step_ivp(spec)?;
    let (y1, y2) = fundamental_pair(spec)?;

    let (basis, yd_ro) = reduction_order_any(spec, &y1, &y2, spec.a_idx())?;
    let ro = assemble_general(spec, &y1, &y2, &yd_ro)?;

    let vop_anchor = if spec.a_idx() < ts.kappa_len() { spec.a_idx() } else { t0 };
    let yd_vop = variation_particular(spec, &y1, &y2, vop_anchor)?;
    let vop = assemble_general(spec, &y1, &y2, &yd_vop)?;

    let dev = |other: &GridFn| (t0..ts.len()).fold(0.0f64, |m, i| m.max((stepped.get(i) - other.get(i)).abs()));
    Ok(NonmultiplicityReport {
        dev_reduction: dev(&ro.y),
        dev_variation: dev(&vop.y),
        scale: window_max(&stepped, t0, ts.len()),
        basis,
    })
}
