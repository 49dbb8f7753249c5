//! Particular solutions by reduction of order and by variation of parameters.
//!
//! With `g = -p + mu q` and a homogeneous solution `y_i`, reduction of order
//! gives
//!
//! ```text
//! y_d(t) = y_i(t) ∫_a^t  e_g(s,a) / (y_i(s) y_i(σ s)) · [ ∫_a^s r y_i^σ e_{⊖g}(σ τ, a) Δτ ]  Δs
//! ```
//!
//! Every antiderivative is anchored at `a` with constant zero, so `y_d(a) = 0`
//! and `y_d^Δ(a) = 0`. Variation of parameters is kept alongside as an
//! independent route to the same family of solutions.

use crate::error::{Error, Result};
use crate::solver::{ensure_homogeneous, residual, ProblemSpec};
use crate::timescale::{check_regressive, cumulative_integral, delta_derivative, exp_delta, GridFn};
use crate::tol;

/// Fundamental system, particular solution and the assembled solution of an IVP.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionBundle {
    pub y1: GridFn,
    pub y2: GridFn,
    pub y1_delta: GridFn,
    pub y2_delta: GridFn,
    pub wronskian: GridFn,
    pub yd: GridFn,
    pub c1: f64,
    pub c2: f64,
    /// `c1 y1 + c2 y2 + yd`.
    pub y: GridFn,
    pub residual: GridFn,
}

impl SolutionBundle {
    /// The complementary part `c1 y1 + c2 y2`.
    pub fn complementary(&self) -> GridFn {
        let (c1, c2) = (self.c1, self.c2);
        self.y1.zip_with(&self.y2, |a, b| c1 * a + c2 * b).expect("basis shares the grid")
    }
}

/// Which homogeneous solution feeds reduction of order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    /// `y1`, with `(y, y^Δ)(t0) = (1, 0)`.
    First,
    /// `y1 + y2`, with `(y, y^Δ)(t0) = (1, 1)`. The normalized `y2` itself
    /// vanishes at `t0` and can never be used.
    Sum,
}

impl Basis {
    pub fn select(self, y1: &GridFn, y2: &GridFn) -> GridFn {
        match self {
            Basis::First => y1.clone(),
            Basis::Sum => y1.zip_with(y2, |a, b| a + b).expect("basis shares the grid"),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Basis::First => "y1",
            Basis::Sum => "y1+y2",
        }
    }
}

/// Reduction of order on `y1`, falling back to `y1 + y2` when `y1` has a zero.
pub fn reduction_order_any(spec: &ProblemSpec, y1: &GridFn, y2: &GridFn, a_idx: usize) -> Result<(Basis, GridFn)> {
    match reduction_order_particular(spec, y1, a_idx) {
        Ok(yd) => Ok((Basis::First, yd)),
        Err(Error::ZeroDenominator { .. }) => {
            let alt = Basis::Sum.select(y1, y2);
            reduction_order_particular(spec, &alt, a_idx).map(|yd| (Basis::Sum, yd))
        }
        Err(e) => Err(e),
    }
}

fn check_basis(spec: &ProblemSpec, y: &GridFn) -> Result<()> {
    if !y.same_grid(spec.p()) || y.len() != spec.ts().len() {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

/// `1 / (y(t) y(σ t))` on `T^kappa`, rejecting near-zero products.
fn reciprocal_products(y: &GridFn) -> Result<Vec<f64>> {
    let ts = y.ts();
    let n = ts.len();
    (0..ts.kappa_len())
        .map(|i| {
            let d = y.get(i) * y.get(i + 1);
            // near-zero relative to the neighbouring values, i.e. a zero lost to rounding
            let local = (i.saturating_sub(1)..(i + 3).min(n)).fold(0.0f64, |m, j| m.max(y.get(j).abs()));
            if d == 0.0 || d.abs() < tol::DENOM_TOL * local * local {
                Err(Error::ZeroDenominator { index: i, t: ts.point(i) })
            } else {
                Ok(1.0 / d)
            }
        })
        .collect()
}

/// Particular solution built from the single homogeneous solution `yi`.
pub fn reduction_order_particular(spec: &ProblemSpec, yi: &GridFn, a_idx: usize) -> Result<GridFn> {
    check_basis(spec, yi)?;
    spec.ts().check_index(a_idx)?;
    ensure_homogeneous(spec, yi, tol::RESIDUAL_TOL)?;
    let inv = reciprocal_products(yi)?;
    let ts = spec.ts();
    let kappa = ts.kappa_len();

    let e = exp_delta(spec.composite(), a_idx)?;
    // e_{⊖g}(σ t, a) = 1 / e_g(σ t, a)
    let inner_integrand: Vec<f64> = (0..kappa).map(|i| spec.r().get(i) * yi.get(i + 1) / e.get(i + 1)).collect();
    let inner = cumulative_integral(&GridFn::from_parts(ts, inner_integrand), a_idx)?;
    let v_delta: Vec<f64> = (0..kappa).map(|i| e.get(i) * inner.get(i) * inv[i]).collect();
    let v = cumulative_integral(&GridFn::from_parts(ts, v_delta), a_idx)?;
    yi.zip_with(&v, |y, v| y * v)
}

/// Second solution `y1 ∫_a^t e_g(s,a) / (y1 y1^σ) Δs`, independent of `y1`.
///
/// The inner antiderivative of the general formula is replaced by the
/// constant 1, which makes `W(y1, y2) = e_g(·, a)` exactly.
pub fn roo_second_solution(spec: &ProblemSpec, y1: &GridFn, a_idx: usize) -> Result<GridFn> {
    check_basis(spec, y1)?;
    spec.ts().check_index(a_idx)?;
    ensure_homogeneous(spec, y1, tol::RESIDUAL_TOL)?;
    let inv = reciprocal_products(y1)?;
    let ts = spec.ts();
    let e = exp_delta(spec.composite(), a_idx)?;
    let v_delta: Vec<f64> = (0..ts.kappa_len()).map(|i| e.get(i) * inv[i]).collect();
    let v = cumulative_integral(&GridFn::from_parts(ts, v_delta), a_idx)?;
    y1.zip_with(&v, |y, v| y * v)
}

/// Particular solution by variation of parameters, `y_d(a) = y_d^Δ(a) = 0`.
///
/// `y_d(t) = y2(t) ∫_a^t y1^σ r / W^σ Δs - y1(t) ∫_a^t y2^σ r / W^σ Δs`.
/// For `t > a` the contribution of the last subinterval `[ρ t, t]` cancels
/// between the two terms, so `W` is only needed on `T^kappa`. Anchors left
/// of the last point are required because points left of `a` do use
/// `W(a)`.
pub fn variation_particular(spec: &ProblemSpec, y1: &GridFn, y2: &GridFn, a_idx: usize) -> Result<GridFn> {
    check_basis(spec, y1)?;
    check_basis(spec, y2)?;
    let ts = spec.ts();
    let n = ts.len();
    ts.check_index(a_idx)?;
    if a_idx >= ts.kappa_len() {
        return Err(Error::OutOfKappa { index: a_idx });
    }
    let w = wronskian_checked(y1, y2)?;

    // Integrands on s = 0..n-3, where W(σ s) exists.
    let m = n - 2;
    let mut i1 = vec![0.0; m];
    let mut i2 = vec![0.0; m];
    for s in 0..m {
        let ws = w.get(s + 1);
        i1[s] = y1.get(s + 1) * spec.r().get(s) / ws * ts.mu(s);
        i2[s] = y2.get(s + 1) * spec.r().get(s) / ws * ts.mu(s);
    }
    // c[k] = ∫_a^{t_k}, k = 0..n-2.
    let mut c1 = vec![0.0; n - 1];
    let mut c2 = vec![0.0; n - 1];
    for k in a_idx..n - 2 {
        c1[k + 1] = c1[k] + i1[k];
        c2[k + 1] = c2[k] + i2[k];
    }
    for k in (0..a_idx).rev() {
        c1[k] = c1[k + 1] - i1[k];
        c2[k] = c2[k + 1] - i2[k];
    }

    let values = (0..n)
        .map(|i| {
            let k = if i > a_idx { i - 1 } else { i };
            y2.get(i) * c1[k] - y1.get(i) * c2[k]
        })
        .collect();
    GridFn::new(ts, values)
}

fn wronskian_checked(y1: &GridFn, y2: &GridFn) -> Result<GridFn> {
    let ts = y1.ts();
    let d1 = delta_derivative(y1);
    let d2 = delta_derivative(y2);
    let mut values = Vec::with_capacity(ts.kappa_len());
    for i in 0..ts.kappa_len() {
        let a = y1.get(i) * d2.get(i);
        let b = y2.get(i) * d1.get(i);
        let w = a - b;
        if w == 0.0 || w.abs() < tol::WRONSKIAN_TOL * (a.abs() + b.abs()) {
            return Err(Error::SingularWronskian { index: i, t: ts.point(i) });
        }
        values.push(w);
    }
    Ok(GridFn::from_parts(ts, values))
}

/// Matches `c1 y1 + c2 y2 + yd` to the initial data of `spec`.
pub fn assemble_general(spec: &ProblemSpec, y1: &GridFn, y2: &GridFn, yd: &GridFn) -> Result<SolutionBundle> {
    check_basis(spec, y1)?;
    check_basis(spec, y2)?;
    check_basis(spec, yd)?;
    let ts = spec.ts();
    let t0 = spec.t0_idx();
    let y1_delta = delta_derivative(y1);
    let y2_delta = delta_derivative(y2);
    let yd_delta = delta_derivative(yd);

    let (a11, a12) = (y1.get(t0), y2.get(t0));
    let (a21, a22) = (y1_delta.get(t0), y2_delta.get(t0));
    let det = a11 * a22 - a12 * a21;
    if det == 0.0 || det.abs() < tol::WRONSKIAN_TOL * ((a11 * a22).abs() + (a12 * a21).abs()) {
        return Err(Error::SingularWronskian { index: t0, t: ts.point(t0) });
    }
    let init = spec.initial();
    let b1 = init.value - yd.get(t0);
    let b2 = init.delta - yd_delta.get(t0);
    let c1 = (b1 * a22 - a12 * b2) / det;
    let c2 = (a11 * b2 - a21 * b1) / det;

    let y = GridFn::new(ts, (0..ts.len()).map(|i| c1 * y1.get(i) + c2 * y2.get(i) + yd.get(i)).collect())?;
    let residual = residual(spec, &y)?;
    let wronskian = crate::solver::wronskian(y1, y2)?;
    Ok(SolutionBundle {
        y1: y1.clone(),
        y2: y2.clone(),
        y1_delta,
        y2_delta,
        wronskian,
        yd: yd.clone(),
        c1,
        c2,
        y,
        residual,
    })
}

/// Coefficients of `y^ΔΔ + α y^Δσ + β y^σ = r` rewritten as `y^ΔΔ + p y^Δ + q y`.
///
/// Returns `p = (α + mu β) / (1 + mu α)` and `q = β / (1 + mu α)` on
/// `T^kappa`. The forcing must be rescaled as well, see
/// [`sigma_form_forcing`].
pub fn convert_sigma_form(alpha: &GridFn, beta: &GridFn) -> Result<(GridFn, GridFn)> {
    if !alpha.same_grid(beta) {
        return Err(Error::GridMismatch);
    }
    let ts = alpha.ts();
    let kappa = ts.kappa_len();
    if beta.len() < kappa {
        return Err(Error::GridMismatch);
    }
    check_regressive(alpha, tol::REG_TOL)?;
    let mut p = Vec::with_capacity(kappa);
    let mut q = Vec::with_capacity(kappa);
    for i in 0..kappa {
        let mu = ts.mu(i);
        let d = 1.0 + mu * alpha.get(i);
        p.push((alpha.get(i) + mu * beta.get(i)) / d);
        q.push(beta.get(i) / d);
    }
    Ok((GridFn::new(ts, p)?, GridFn::new(ts, q)?))
}

/// Forcing of the converted equation, `r / (1 + mu α)` on `T^kappa`.
pub fn sigma_form_forcing(alpha: &GridFn, r: &GridFn) -> Result<GridFn> {
    if !alpha.same_grid(r) {
        return Err(Error::GridMismatch);
    }
    let ts = alpha.ts();
    if r.len() < ts.kappa_len() {
        return Err(Error::GridMismatch);
    }
    let reg = check_regressive(alpha, tol::REG_TOL)?;
    let values = (0..ts.kappa_len()).map(|i| r.get(i) / (1.0 + ts.mu(i) * reg.as_grid().get(i))).collect();
    GridFn::new(ts, values)
}

/// Defect of `y^ΔΔ + α y^Δσ + β y^σ - r` on `T^kappa^2`.
pub fn sigma_residual(alpha: &GridFn, beta: &GridFn, r: &GridFn, y: &GridFn) -> Result<GridFn> {
    let ts = y.ts();
    if !y.same_grid(alpha) || !y.same_grid(beta) || !y.same_grid(r) || y.len() != ts.len() {
        return Err(Error::GridMismatch);
    }
    let n2 = ts.kappa2_len();
    if alpha.len() < n2 || beta.len() < n2 || r.len() < n2 {
        return Err(Error::GridMismatch);
    }
    let d = delta_derivative(y);
    let dd = delta_derivative(&d);
    let values =
        (0..n2).map(|i| dd.get(i) + alpha.get(i) * d.get(i + 1) + beta.get(i) * y.get(i + 1) - r.get(i)).collect();
    Ok(GridFn::from_parts(ts, values))
}
