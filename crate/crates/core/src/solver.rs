//! Initial value problems for `y^ΔΔ + p y^Δ + q y = r` on a grid.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::timescale::{check_regressive, delta_derivative, GridFn, RegressiveFn, TimeScale};
use crate::tol;

/// Initial data `y(t0) = value`, `y^Δ(t0) = delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Initial {
    pub t0_idx: usize,
    pub value: f64,
    pub delta: f64,
}

/// A validated problem instance.
///
/// Coefficients must be defined at least on `T^kappa`; the composite
/// `-p + mu q` is certified regressive at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    ts: Arc<TimeScale>,
    p: GridFn,
    q: GridFn,
    r: GridFn,
    initial: Initial,
    a_idx: usize,
    composite: RegressiveFn,
}

impl ProblemSpec {
    pub fn new(p: GridFn, q: GridFn, r: GridFn, initial: Initial, a_idx: usize) -> Result<Self> {
        Self::with_reg_tol(p, q, r, initial, a_idx, tol::REG_TOL)
    }

    pub fn with_reg_tol(p: GridFn, q: GridFn, r: GridFn, initial: Initial, a_idx: usize, reg_tol: f64) -> Result<Self> {
        let ts = Arc::clone(p.ts());
        if !p.same_grid(&q) || !p.same_grid(&r) {
            return Err(Error::GridMismatch);
        }
        let kappa = ts.kappa_len();
        if p.len() < kappa || q.len() < kappa || r.len() < kappa {
            return Err(Error::GridMismatch);
        }
        ts.check_index(a_idx)?;
        if initial.t0_idx >= kappa {
            // y^Δ(t0) has to exist on the grid.
            return Err(Error::OutOfKappa { index: initial.t0_idx });
        }
        if !(initial.value.is_finite() && initial.delta.is_finite()) {
            return Err(Error::NonFinite { index: initial.t0_idx });
        }
        let p = p.truncated(kappa);
        let q = q.truncated(kappa);
        let r = r.truncated(kappa);
        let g = GridFn::from_parts(&ts, (0..kappa).map(|i| -p.get(i) + ts.mu(i) * q.get(i)).collect());
        let composite = check_regressive(&g, reg_tol)?;
        Ok(Self { ts, p, q, r, initial, a_idx, composite })
    }

    pub fn ts(&self) -> &Arc<TimeScale> {
        &self.ts
    }

    pub fn p(&self) -> &GridFn {
        &self.p
    }

    pub fn q(&self) -> &GridFn {
        &self.q
    }

    pub fn r(&self) -> &GridFn {
        &self.r
    }

    pub fn initial(&self) -> Initial {
        self.initial
    }

    pub fn t0_idx(&self) -> usize {
        self.initial.t0_idx
    }

    pub fn a_idx(&self) -> usize {
        self.a_idx
    }

    /// `-p + mu q`, the exponent of the Wronskian.
    pub fn composite(&self) -> &RegressiveFn {
        &self.composite
    }

    /// Same coefficients with `r = 0`.
    pub fn homogeneous(&self) -> Self {
        Self { r: GridFn::from_parts(&self.ts, vec![0.0; self.ts.kappa_len()]), ..self.clone() }
    }

    pub fn with_initial(&self, value: f64, delta: f64) -> Self {
        Self { initial: Initial { value, delta, ..self.initial }, ..self.clone() }
    }

    pub fn with_forcing(&self, r: &GridFn) -> Result<Self> {
        if !r.same_grid(&self.r) || r.len() < self.ts.kappa_len() {
            return Err(Error::GridMismatch);
        }
        Ok(Self { r: r.truncated(self.ts.kappa_len()), ..self.clone() })
    }

    pub fn with_anchor(&self, a_idx: usize) -> Result<Self> {
        self.ts.check_index(a_idx)?;
        Ok(Self { a_idx, ..self.clone() })
    }
}

/// Solution of the initial value problem with its delta derivative.
///
/// Both returned functions cover the whole grid; `y^Δ` at the last point is
/// the value the one-step update produces.
pub fn step_ivp(spec: &ProblemSpec) -> Result<(GridFn, GridFn)> {
    let ts = spec.ts();
    let n = ts.len();
    let t0 = spec.t0_idx();
    let (p, q, r) = (spec.p.values(), spec.q.values(), spec.r.values());
    let mut y = vec![0.0; n];
    let mut d = vec![0.0; n];
    y[t0] = spec.initial.value;
    d[t0] = spec.initial.delta;

    for i in t0..n - 1 {
        let mu = ts.mu(i);
        y[i + 1] = y[i] + mu * d[i];
        d[i + 1] = d[i] + mu * (r[i] - p[i] * d[i] - q[i] * y[i]);
    }
    // Inverse of [[1, mu], [-mu q, 1 - mu p]]; its determinant is 1 + mu(-p + mu q).
    for i in (0..t0).rev() {
        let mu = ts.mu(i);
        let det = 1.0 - mu * p[i] + mu * mu * q[i];
        if det.abs() < tol::REG_TOL {
            return Err(Error::NotRegressive { index: i, t: ts.point(i), value: det });
        }
        let y_next = y[i + 1];
        let d_next = d[i + 1] - mu * r[i];
        y[i] = ((1.0 - mu * p[i]) * y_next - mu * d_next) / det;
        d[i] = (mu * q[i] * y_next + d_next) / det;
    }
    Ok((GridFn::new(ts, y)?, GridFn::new(ts, d)?))
}

/// Homogeneous solutions with `(y1, y1^Δ)(t0) = (1, 0)` and `(y2, y2^Δ)(t0) = (0, 1)`.
pub fn fundamental_pair(spec: &ProblemSpec) -> Result<(GridFn, GridFn)> {
    let homog = spec.homogeneous();
    let (y1, _) = step_ivp(&homog.with_initial(1.0, 0.0))?;
    let (y2, _) = step_ivp(&homog.with_initial(0.0, 1.0))?;
    Ok((y1, y2))
}

/// `W = y1 y2^Δ - y2 y1^Δ` on `T^kappa`.
pub fn wronskian(y1: &GridFn, y2: &GridFn) -> Result<GridFn> {
    if !y1.same_grid(y2) || y1.len() != y2.len() || y1.len() < 2 {
        return Err(Error::GridMismatch);
    }
    let d1 = delta_derivative(y1);
    let d2 = delta_derivative(y2);
    let values = (0..d1.len()).map(|i| y1.get(i) * d2.get(i) - y2.get(i) * d1.get(i)).collect();
    Ok(GridFn::from_parts(y1.ts(), values))
}

/// Defect `y^ΔΔ + p y^Δ + q y - r` on `T^kappa^2`.
pub fn residual(spec: &ProblemSpec, y: &GridFn) -> Result<GridFn> {
    let ts = spec.ts();
    if !y.same_grid(&spec.p) || y.len() != ts.len() {
        return Err(Error::GridMismatch);
    }
    let d = delta_derivative(y);
    let dd = delta_derivative(&d);
    let values = (0..ts.kappa2_len())
        .map(|i| dd.get(i) + spec.p.get(i) * d.get(i) + spec.q.get(i) * y.get(i) - spec.r.get(i))
        .collect();
    Ok(GridFn::from_parts(ts, values))
}

/// Size of the terms that make up the residual, used to make it relative.
///
/// Includes `|y|/mu^2`, the magnitude the second difference is computed at,
/// so roundoff on fine meshes is not mistaken for a defect.
pub(crate) fn residual_scale(spec: &ProblemSpec, y: &GridFn) -> f64 {
    let ts = spec.ts();
    let d = delta_derivative(y);
    let mut scale = 1.0f64;
    for i in 0..ts.kappa2_len() {
        let mu2 = ts.mu(i) * ts.mu(i + 1).min(ts.mu(i));
        let diff = (y.get(i).abs() + y.get(i + 1).abs() + y.get(i + 2).abs()) / mu2;
        let terms = (spec.p.get(i) * d.get(i)).abs() + (spec.q.get(i) * y.get(i)).abs();
        scale = scale.max(diff + terms);
    }
    scale
}

/// Rejects `y` when it is not a homogeneous solution of `spec`.
pub(crate) fn ensure_homogeneous(spec: &ProblemSpec, y: &GridFn, rel_tol: f64) -> Result<()> {
    let homog = spec.homogeneous();
    let res = residual(&homog, y)?;
    let limit = rel_tol * residual_scale(&homog, y);
    for (i, &v) in res.values().iter().enumerate() {
        if !(v.abs() <= limit) {
            return Err(Error::NotHomogeneousSolution { index: i, t: spec.ts().point(i), residual: v });
        }
    }
    Ok(())
}
