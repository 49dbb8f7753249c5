//! Finite time scales and the delta calculus on them.
//!
//! A [`TimeScale`] is a strictly increasing finite grid. The forward jump of
//! point `i` is point `i + 1` and the graininess is the gap between them, so
//! every derivative, integral and exponential below is an exact finite
//! computation. The real line is represented by a uniform mesh tagged
//! [`Mode::ContinuumApprox`]; results there are first-order approximations.
//!
//! Grid functions are stored as a prefix of the grid: a function on the full
//! scale has `len` values, one on `T^kappa` has `len - 1`, one on
//! `T^kappa^2` has `len - 2`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::tol;

/// How a grid relates to the time scale it models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    /// The grid is the time scale (subsets of `Z`, `hZ`, `h^Z`, explicit points).
    ExactDiscrete,
    /// The grid is a uniform mesh of width `h` standing in for an interval of `R`.
    ContinuumApprox { h: f64 },
}

/// Recipes for building a [`TimeScale`].
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `{a, a+1, ..., b}`.
    Integers { a: i64, b: i64 },
    /// `{a, a+h, ...}` up to and including `b`.
    HZ { h: f64, a: f64, b: f64 },
    /// `{a, ah, ah^2, ..., ah^k_max}` with `h > 1`, `a > 0`.
    Quantum { h: f64, a: f64, k_max: u32 },
    /// Uniform mesh of `[a, b]` with width `h`, tagged as a continuum approximation.
    Reals { a: f64, b: f64, h: f64 },
    /// Arbitrary strictly increasing points.
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeScale {
    points: Vec<f64>,
    mu: Vec<f64>,
    mode: Mode,
}

fn mesh(a: f64, b: f64, h: f64) -> Result<Vec<f64>> {
    if !(a.is_finite() && b.is_finite() && h.is_finite()) {
        return Err(Error::BadFamilyParam("non-finite mesh parameter".into()));
    }
    if !(h > 0.0) {
        return Err(Error::BadFamilyParam(format!("mesh width h = {h} must be positive")));
    }
    if !(a < b) {
        return Err(Error::BadFamilyParam(format!("need a < b, got a = {a}, b = {b}")));
    }
    let steps = ((b - a) / h + 1e-9).floor();
    if steps > 1e8 {
        return Err(Error::BadFamilyParam(format!("mesh of {steps} steps is too large")));
    }
    let steps = steps as usize;
    Ok((0..=steps).map(|i| a + i as f64 * h).collect())
}

impl TimeScale {
    pub fn new(family: Family) -> Result<Self> {
        match family {
            Family::Integers { a, b } => {
                if a >= b {
                    return Err(Error::BadFamilyParam(format!("need a < b, got a = {a}, b = {b}")));
                }
                let points: Vec<f64> = (a..=b).map(|t| t as f64).collect();
                let mu = vec![1.0; points.len() - 1];
                Self::checked(points, Some(mu), Mode::ExactDiscrete)
            }
            Family::HZ { h, a, b } => {
                let points = mesh(a, b, h)?;
                let mu = vec![h; points.len().saturating_sub(1)];
                Self::checked(points, Some(mu), Mode::ExactDiscrete)
            }
            Family::Reals { a, b, h } => {
                let points = mesh(a, b, h)?;
                let mu = vec![h; points.len().saturating_sub(1)];
                Self::checked(points, Some(mu), Mode::ContinuumApprox { h })
            }
            Family::Quantum { h, a, k_max } => {
                if !(h > 1.0 && h.is_finite()) {
                    return Err(Error::BadFamilyParam(format!("quantum scale needs h > 1, got {h}")));
                }
                if !(a > 0.0 && a.is_finite()) {
                    return Err(Error::BadFamilyParam(format!("quantum scale needs a > 0, got {a}")));
                }
                let mut points = Vec::with_capacity(k_max as usize + 1);
                let mut t = a;
                for _ in 0..=k_max {
                    points.push(t);
                    t *= h;
                }
                if points.iter().any(|t| !t.is_finite()) {
                    return Err(Error::BadFamilyParam("quantum scale overflows".into()));
                }
                Self::checked(points, None, Mode::ExactDiscrete)
            }
            Family::Explicit(points) => Self::checked(points, None, Mode::ExactDiscrete),
        }
    }

    fn checked(points: Vec<f64>, mu: Option<Vec<f64>>, mode: Mode) -> Result<Self> {
        if let Some(index) = points.iter().position(|t| !t.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        if let Some(index) = points.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::NonIncreasingPoints { index: index + 1 });
        }
        if points.len() < 3 {
            return Err(Error::TooFewPoints { count: points.len() });
        }
        let mu = mu.unwrap_or_else(|| points.windows(2).map(|w| w[1] - w[0]).collect());
        Ok(Self { points, mu, mode })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn point(&self, i: usize) -> f64 {
        self.points[i]
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Graininess on `T^kappa`, one value per point except the last.
    pub fn graininess(&self) -> &[f64] {
        &self.mu
    }

    /// Graininess at index `i`; panics on the last point.
    pub fn mu(&self, i: usize) -> f64 {
        self.mu[i]
    }

    /// Number of points in `T^kappa`.
    pub fn kappa_len(&self) -> usize {
        self.points.len() - 1
    }

    /// Number of points in `T^kappa^2`.
    pub fn kappa2_len(&self) -> usize {
        self.points.len() - 2
    }

    /// Forward jump as an index.
    pub fn sigma(&self, i: usize) -> Result<usize> {
        if i + 1 < self.points.len() {
            Ok(i + 1)
        } else if i + 1 == self.points.len() {
            Err(Error::OutOfKappa { index: i })
        } else {
            Err(Error::IndexOutOfRange { index: i, len: self.points.len() })
        }
    }

    /// Index of the grid point within a relative tolerance of `t`.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let tol = tol::GRID_MATCH_TOL * t.abs().max(1.0);
        let pos = self.points.partition_point(|&s| s < t - tol);
        (pos < self.points.len() && (self.points[pos] - t).abs() <= tol).then_some(pos)
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i < self.points.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: i, len: self.points.len() })
        }
    }
}

/// Convenience constructor returning a shareable handle.
pub fn make_timescale(family: Family) -> Result<Arc<TimeScale>> {
    TimeScale::new(family).map(Arc::new)
}

/// Real values sampled on a prefix of a time scale.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFn {
    ts: Arc<TimeScale>,
    values: Vec<f64>,
}

impl GridFn {
    pub fn new(ts: &Arc<TimeScale>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.len() > ts.len() {
            return Err(Error::GridMismatch);
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { ts: Arc::clone(ts), values })
    }

    /// Samples `f` at every grid point.
    pub fn from_fn(ts: &Arc<TimeScale>, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(ts, ts.points().iter().map(|&t| f(t)).collect())
    }

    pub fn constant(ts: &Arc<TimeScale>, c: f64) -> Result<Self> {
        Self::new(ts, vec![c; ts.len()])
    }

    pub fn zeros(ts: &Arc<TimeScale>) -> Self {
        Self { ts: Arc::clone(ts), values: vec![0.0; ts.len()] }
    }

    pub(crate) fn from_parts(ts: &Arc<TimeScale>, values: Vec<f64>) -> Self {
        debug_assert!(values.len() <= ts.len());
        Self { ts: Arc::clone(ts), values }
    }

    pub fn ts(&self) -> &Arc<TimeScale> {
        &self.ts
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn same_grid(&self, other: &GridFn) -> bool {
        Arc::ptr_eq(&self.ts, &other.ts) || *self.ts == *other.ts
    }

    /// Keeps the first `len` values.
    pub fn truncated(&self, len: usize) -> GridFn {
        Self::from_parts(&self.ts, self.values[..len.min(self.values.len())].to_vec())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridFn {
        Self::from_parts(&self.ts, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Pointwise combination over the common prefix.
    pub fn zip_with(&self, other: &GridFn, f: impl Fn(f64, f64) -> f64) -> Result<GridFn> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self::from_parts(&self.ts, values))
    }

    fn require_len(&self, min: usize) -> Result<()> {
        if self.values.len() < min {
            Err(Error::GridMismatch)
        } else {
            Ok(())
        }
    }
}

/// A grid function `g` with `|1 + mu g| >= reg_tol` on `T^kappa`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressiveFn {
    g: GridFn,
}

impl RegressiveFn {
    pub fn as_grid(&self) -> &GridFn {
        &self.g
    }

    /// `1 + mu g > 0` everywhere on `T^kappa`.
    pub fn is_positively_regressive(&self) -> bool {
        let ts = self.g.ts();
        (0..ts.kappa_len()).all(|i| 1.0 + ts.mu(i) * self.g.get(i) > 0.0)
    }
}

/// Forward difference quotient; the result is one point shorter than `f`.
pub fn delta_derivative(f: &GridFn) -> GridFn {
    let ts = f.ts();
    let values = f.values().windows(2).enumerate().map(|(i, w)| (w[1] - w[0]) / ts.mu(i)).collect();
    GridFn::from_parts(ts, values)
}

/// `int_{t_a}^{t_b} f Δs` as a signed Riemann sum over the grid.
pub fn delta_integral(f: &GridFn, a_idx: usize, b_idx: usize) -> Result<f64> {
    let ts = f.ts();
    ts.check_index(a_idx)?;
    ts.check_index(b_idx)?;
    let (lo, hi, sign) = if a_idx <= b_idx { (a_idx, b_idx, 1.0) } else { (b_idx, a_idx, -1.0) };
    f.require_len(hi)?;
    let sum: f64 = (lo..hi).map(|i| f.get(i) * ts.mu(i)).sum();
    Ok(sign * sum)
}

/// Antiderivative `F(t) = int_a^t f Δs` on the full grid, `F(a) = 0`.
///
/// `f` must be defined on `T^kappa`.
pub fn cumulative_integral(f: &GridFn, a_idx: usize) -> Result<GridFn> {
    let ts = f.ts();
    ts.check_index(a_idx)?;
    f.require_len(ts.kappa_len())?;
    let mut out = vec![0.0; ts.len()];
    for i in a_idx..ts.kappa_len() {
        out[i + 1] = out[i] + f.get(i) * ts.mu(i);
    }
    for i in (0..a_idx).rev() {
        out[i] = out[i + 1] - f.get(i) * ts.mu(i);
    }
    Ok(GridFn::from_parts(ts, out))
}

/// `z ⊕ w = z + w + mu z w`.
pub fn circle_plus(z: f64, w: f64, mu: f64) -> f64 {
    z + w + mu * z * w
}

/// `⊖p = -p / (1 + mu p)`.
pub fn ominus(p: f64, mu: f64) -> Result<f64> {
    let d = 1.0 + mu * p;
    if d.abs() < tol::REG_TOL {
        return Err(Error::NotRegressive { index: 0, t: f64::NAN, value: d });
    }
    Ok(-p / d)
}

/// Certifies `|1 + mu g| >= reg_tol` on `T^kappa`.
pub fn check_regressive(g: &GridFn, reg_tol: f64) -> Result<RegressiveFn> {
    let ts = g.ts();
    g.require_len(ts.kappa_len())?;
    for i in 0..ts.kappa_len() {
        let value = 1.0 + ts.mu(i) * g.get(i);
        if !(value.abs() >= reg_tol) {
            return Err(Error::NotRegressive { index: i, t: ts.point(i), value });
        }
    }
    Ok(RegressiveFn { g: g.truncated(ts.kappa_len()) })
}

/// Pointwise `⊖g` on `T^kappa`.
pub fn ominus_fn(g: &RegressiveFn) -> RegressiveFn {
    let ts = g.g.ts();
    let values = (0..ts.kappa_len())
        .map(|i| {
            let p = g.g.get(i);
            -p / (1.0 + ts.mu(i) * p)
        })
        .collect();
    // 1 + mu ⊖g = 1 / (1 + mu g), finite and nonzero whenever g is regressive.
    RegressiveFn { g: GridFn::from_parts(ts, values) }
}

/// Delta exponential `e_p(t, t_a)` on the full grid.
///
/// Built from `e(sigma t) = (1 + mu p) e(t)` forward of the anchor and by
/// division backward of it.
pub fn exp_delta(p: &RegressiveFn, a_idx: usize) -> Result<GridFn> {
    let ts = p.g.ts();
    ts.check_index(a_idx)?;
    let mut out = vec![0.0; ts.len()];
    out[a_idx] = 1.0;
    for i in a_idx..ts.kappa_len() {
        out[i + 1] = out[i] * (1.0 + ts.mu(i) * p.g.get(i));
    }
    for i in (0..a_idx).rev() {
        out[i] = out[i + 1] / (1.0 + ts.mu(i) * p.g.get(i));
    }
    GridFn::new(ts, out)
}
