//! Difference equations on `Z` written with explicit products and sums.
//!
//! These routines do not go through [`crate::timescale`]; exponentials are
//! spelled out as products of `1 - p + q` (or `β`), which makes them an
//! independent check of the general time scale code on the integer grid.

use crate::error::{Error, Result};
use crate::tol;

/// A real sequence on the integer window `start..start + values.len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZSeq {
    pub start: i64,
    pub values: Vec<f64>,
}

impl ZSeq {
    pub fn new(start: i64, values: Vec<f64>) -> Self {
        Self { start, values }
    }

    pub fn from_fn(start: i64, end: i64, f: impl Fn(i64) -> f64) -> Self {
        Self { start, values: (start..=end).map(f).collect() }
    }

    pub fn constant(start: i64, end: i64, c: f64) -> Self {
        Self::from_fn(start, end, |_| c)
    }

    /// Last index of the window.
    pub fn end(&self) -> i64 {
        self.start + self.values.len() as i64 - 1
    }

    pub fn contains(&self, t: i64) -> bool {
        t >= self.start && t <= self.end()
    }

    pub fn at(&self, t: i64) -> Result<f64> {
        if self.contains(t) {
            Ok(self.values[(t - self.start) as usize])
        } else {
            Err(Error::OutsideWindow { t })
        }
    }

    pub fn times(&self) -> impl Iterator<Item = i64> {
        self.start..=self.end()
    }
}

/// `y(t+2) + α(t) y(t+1) + β(t) y(t) = r(t)` on a window, with `β != 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftFormSpec {
    alpha: ZSeq,
    beta: ZSeq,
    r: ZSeq,
}

impl ShiftFormSpec {
    pub fn new(alpha: ZSeq, beta: ZSeq, r: ZSeq) -> Result<Self> {
        if alpha.start != beta.start || alpha.start != r.start {
            return Err(Error::GridMismatch);
        }
        if alpha.values.len() != beta.values.len() || alpha.values.len() != r.values.len() {
            return Err(Error::GridMismatch);
        }
        if beta.values.contains(&0.0) {
            return Err(Error::ZeroBeta);
        }
        Ok(Self { alpha, beta, r })
    }

    pub fn alpha(&self) -> &ZSeq {
        &self.alpha
    }

    pub fn beta(&self) -> &ZSeq {
        &self.beta
    }

    pub fn r(&self) -> &ZSeq {
        &self.r
    }

    /// Delta-form coefficients `(p, q)`.
    pub fn to_delta(&self) -> (ZSeq, ZSeq) {
        shift_to_delta(&self.alpha, &self.beta)
    }

    /// `y(t+2) + α y(t+1) + β y(t) - r(t)` wherever `y(t+2)` is in the window.
    pub fn residual(&self, y: &ZSeq) -> Result<ZSeq> {
        let end = y.end().min(self.alpha.end() + 2);
        let start = y.start.max(self.alpha.start);
        let values = (start..=end - 2)
            .map(|t| Ok(y.at(t + 2)? + self.alpha.at(t)? * y.at(t + 1)? + self.beta.at(t)? * y.at(t)? - self.r.at(t)?))
            .collect::<Result<Vec<f64>>>()?;
        Ok(ZSeq::new(start, values))
    }
}

/// `p = α + 2`, `q = α + β + 1`, so that `1 - p + q = β`.
pub fn shift_to_delta(alpha: &ZSeq, beta: &ZSeq) -> (ZSeq, ZSeq) {
    let p = ZSeq::new(alpha.start, alpha.values.iter().map(|a| a + 2.0).collect());
    let q = ZSeq::new(alpha.start, alpha.values.iter().zip(&beta.values).map(|(a, b)| a + b + 1.0).collect());
    (p, q)
}

/// `prod_{j=a}^{x-1} c(j)`, read as `1 / prod_{j=x}^{a-1} c(j)` when `x < a`.
fn signed_product(c: &ZSeq, a: i64, x: i64) -> Result<f64> {
    if x >= a {
        (a..x).try_fold(1.0, |acc, j| Ok(acc * c.at(j)?))
    } else {
        Ok(1.0 / (x..a).try_fold(1.0, |acc, j| Ok(acc * c.at(j)?))?)
    }
}

/// `sum_{s=a}^{x-1} f(s)`, read as `-sum_{s=x}^{a-1} f(s)` when `x < a`.
fn signed_sum(a: i64, x: i64, f: impl Fn(i64) -> Result<f64>) -> Result<f64> {
    if x >= a {
        (a..x).try_fold(0.0, |acc, s| Ok(acc + f(s)?))
    } else {
        (x..a).try_fold(0.0, |acc, s| Ok(acc - f(s)?))
    }
}

/// Particular solution of `Δ²y + p Δy + q y = r` from one homogeneous solution.
///
/// ```text
/// y_d(t) = y(t) Σ_{x=a}^{t-1} [ P(x) Σ_{s=a}^{x-1} r(s) y(s+1) / P(s+1) ] / (y(x) y(x+1)),
/// P(x) = Π_{j=a}^{x-1} (1 - p(j) + q(j))
/// ```
///
/// Evaluated on the window of `y`.
pub fn product_sum_particular(p: &ZSeq, q: &ZSeq, r: &ZSeq, a: i64, y: &ZSeq) -> Result<ZSeq> {
    let start = y.start;
    let end = y.end();
    if !y.contains(a) {
        return Err(Error::OutsideWindow { t: a });
    }
    let factor = ZSeq::from_fn(start, end - 1, |j| 1.0 - p.at(j).unwrap_or(f64::NAN) + q.at(j).unwrap_or(f64::NAN));
    for t in factor.times() {
        let c = factor.at(t)?;
        if c.is_nan() {
            return Err(Error::OutsideWindow { t });
        }
        if c.abs() < tol::REG_TOL {
            return Err(Error::NotRegressive { index: (t - start) as usize, t: t as f64, value: c });
        }
    }
    for x in start..end {
        let d = y.at(x)? * y.at(x + 1)?;
        let local =
            (x - 1..=x + 2).filter(|&j| y.contains(j)).fold(0.0f64, |m, j| m.max(y.values[(j - start) as usize].abs()));
        if d == 0.0 || d.abs() < tol::DENOM_TOL * local * local {
            return Err(Error::ZeroDenominator { index: (x - start) as usize, t: x as f64 });
        }
    }

    // Outer summand for each x in [start, end - 1].
    let outer = ZSeq::new(
        start,
        (start..end)
            .map(|x| {
                let inner = signed_sum(a, x, |s| Ok(r.at(s)? * y.at(s + 1)? / signed_product(&factor, a, s + 1)?))?;
                Ok(signed_product(&factor, a, x)? * inner / (y.at(x)? * y.at(x + 1)?))
            })
            .collect::<Result<Vec<f64>>>()?,
    );
    let values = y.times().map(|t| Ok(y.at(t)? * signed_sum(a, t, |x| outer.at(x))?)).collect::<Result<Vec<f64>>>()?;
    Ok(ZSeq::new(start, values))
}

/// Which characteristic root to build the particular solution on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Root {
    /// `λ1 = -α - sqrt(α² - β)`.
    Minus,
    /// `λ2 = -α + sqrt(α² - β)`.
    Plus,
}

/// Roots of `λ² + 2αλ + β = 0` for `y(t+2) + 2α y(t+1) + β y(t) = r(t)`.
///
/// Takes `α` itself, not the coefficient `2α`.
pub fn const_coeff_roots(alpha: f64, beta: f64) -> Result<(f64, f64)> {
    if beta == 0.0 {
        return Err(Error::ZeroBeta);
    }
    let disc = alpha * alpha - beta;
    if disc == 0.0 {
        return Err(Error::DegenerateRoots);
    }
    if disc < 0.0 {
        return Err(Error::ComplexRoots);
    }
    let root = disc.sqrt();
    let l1 = -alpha - root;
    let l2 = -alpha + root;
    let vieta_ok =
        |got: f64, want: f64, scale: f64| (got - want).abs() <= tol::VIETA_TOL * scale.max(f64::MIN_POSITIVE);
    let scale = l1.abs() * l2.abs();
    if !vieta_ok(l1 * l2, beta, scale) || !vieta_ok(l1 + l2, -2.0 * alpha, l1.abs() + l2.abs()) {
        // Cancellation in -α ± sqrt(..) when α² >> |β|: fall back to β / λ for the small root.
        let (big, small) = if alpha >= 0.0 { (l1, beta / l1) } else { (l2, beta / l2) };
        let (l1, l2) = if alpha >= 0.0 { (big, small) } else { (small, big) };
        return Ok((l1, l2));
    }
    Ok((l1, l2))
}

/// `Σ_{x=a}^{t-1} Σ_{s=a}^{x-1} r(s) λ^{t+s-2x} β^{x-1-s}` on the window of `r`, `t >= a`.
pub fn const_coeff_particular(alpha: f64, beta: f64, r: &ZSeq, a: i64, which: Root) -> Result<ZSeq> {
    let (l1, l2) = const_coeff_roots(alpha, beta)?;
    let lambda = match which {
        Root::Minus => l1,
        Root::Plus => l2,
    };
    if !r.contains(a) {
        return Err(Error::OutsideWindow { t: a });
    }
    let end = r.end() + 2;
    let values = (a..=end)
        .map(|t| {
            let mut acc = 0.0;
            for x in a..t {
                for s in a..x {
                    let e1 = (t + s - 2 * x) as i32;
                    let e2 = (x - 1 - s) as i32;
                    acc += r.at(s)? * lambda.powi(e1) * beta.powi(e2);
                }
            }
            Ok(acc)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ZSeq::new(a, values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_conversions() {
        let cases = [(-1.0, -1.0, 1.0, -1.0), (0.0, -1.0, 2.0, 0.0), (-2.0, 1.0, 0.0, 0.0)];
        for (a, b, p_want, q_want) in cases {
            let (p, q) = shift_to_delta(&ZSeq::constant(0, 3, a), &ZSeq::constant(0, 3, b));
            assert_eq!(p.values[0], p_want);
            assert_eq!(q.values[0], q_want);
            assert_eq!(1.0 - p.values[0] + q.values[0], b);
        }
    }

    #[test]
    fn double_sum_of_one() {
        let z = ZSeq::constant(0, 12, 0.0);
        let y = ZSeq::constant(0, 12, 1.0);
        let r = ZSeq::constant(0, 12, 1.0);
        let yd = product_sum_particular(&z, &z, &r, 0, &y).unwrap();
        for t in yd.times() {
            let tf = t as f64;
            assert_eq!(yd.at(t).unwrap(), tf * (tf - 1.0) / 2.0);
        }
        let zero = product_sum_particular(&z, &z, &z, 4, &y).unwrap();
        assert!(zero.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn product_sum_guards() {
        let p = ZSeq::constant(0, 6, 1.0);
        let z = ZSeq::constant(0, 6, 0.0);
        let y = ZSeq::constant(0, 6, 1.0);
        assert!(matches!(product_sum_particular(&p, &z, &z, 0, &y), Err(Error::NotRegressive { .. })));
        let y0 = ZSeq::from_fn(0, 6, |t| t as f64 - 2.0);
        assert!(matches!(product_sum_particular(&z, &z, &z, 0, &y0), Err(Error::ZeroDenominator { .. })));
    }

    #[test]
    fn roots() {
        let (l1, l2) = const_coeff_roots(-0.5, -1.0).unwrap();
        let s5 = 5f64.sqrt();
        assert!((l1 - (1.0 - s5) / 2.0).abs() < 1e-15);
        assert!((l2 - (1.0 + s5) / 2.0).abs() < 1e-15);
        assert!((l1 * l2 + 1.0).abs() <= 1e-12);
        assert_eq!(const_coeff_roots(-1.0, 1.0), Err(Error::DegenerateRoots));
        assert_eq!(const_coeff_roots(0.0, -1.0).unwrap(), (-1.0, 1.0));
        assert_eq!(const_coeff_roots(0.0, 1.0), Err(Error::ComplexRoots));
        assert_eq!(const_coeff_roots(1.0, 0.0), Err(Error::ZeroBeta));
    }

    #[test]
    fn zero_forcing_double_sum() {
        let r = ZSeq::constant(0, 9, 0.0);
        let yd = const_coeff_particular(-0.5, -1.0, &r, 0, Root::Plus).unwrap();
        assert!(yd.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn shift_form_rejects_zero_beta() {
        let a = ZSeq::constant(0, 4, 1.0);
        let mut b = ZSeq::constant(0, 4, 2.0);
        b.values[2] = 0.0;
        assert_eq!(ShiftFormSpec::new(a.clone(), b, a.clone()), Err(Error::ZeroBeta));
    }
}
