//! Seeded random problems shared by the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use dyneq::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Case {
    pub seed: u64,
    pub label: String,
    pub spec: ProblemSpec,
}

fn grid(rng: &mut ChaCha8Rng, kind: u64) -> (Family, &'static str) {
    match kind {
        0 => {
            let n = rng.gen_range(5..=200i64);
            let a = rng.gen_range(-20..=20i64);
            (Family::Integers { a, b: a + n - 1 }, "integers")
        }
        1 => {
            let n = rng.gen_range(5..=200usize);
            let h: f64 = rng.gen_range(0.05..1.5);
            let a: f64 = rng.gen_range(-5.0..5.0);
            (Family::HZ { h, a, b: a + (n - 1) as f64 * h }, "hz")
        }
        2 => {
            let k_max = rng.gen_range(4..=39u32);
            (Family::Quantum { h: rng.gen_range(1.02..1.2), a: rng.gen_range(0.5..2.0), k_max }, "quantum")
        }
        _ => {
            let n = rng.gen_range(5..=200usize);
            let mut t: f64 = rng.gen_range(-3.0..3.0);
            let mut pts = Vec::with_capacity(n);
            for _ in 0..n {
                pts.push(t);
                t += rng.gen_range(0.05..0.5);
            }
            (Family::Explicit(pts), "explicit")
        }
    }
}

/// Coefficients `(p, q)` sampled on the grid; `monotone` keeps `q <= 0` and `1 - mu p >= 0`.
fn coefficients(rng: &mut ChaCha8Rng, ts: &Arc<TimeScale>, quantum: bool, monotone: bool) -> (Vec<f64>, Vec<f64>) {
    let pts = ts.points();
    let (t_first, span) = (pts[0], pts[pts.len() - 1] - pts[0]);
    let s = 1.0 / span;
    let n = ts.len();
    if quantum {
        let c1: f64 = rng.gen_range(-3.0..3.0);
        let c2: f64 = if monotone { rng.gen_range(-3.0..0.0) } else { rng.gen_range(-3.0..3.0) };
        let c1 = if monotone { c1.min(1.0 / (ts.mu(0) / pts[0])) } else { c1 };
        return (pts.iter().map(|t| c1 / t).collect(), pts.iter().map(|t| c2 / (t * t)).collect());
    }
    let (a0, a1, b0, b1): (f64, f64, f64, f64) =
        (rng.gen_range(-3.0..3.0), rng.gen_range(-1.5..1.5), rng.gen_range(-3.0..3.0), rng.gen_range(-1.5..1.5));
    let w: f64 = rng.gen_range(0.0..6.0);
    let mut p: Vec<f64> = pts.iter().map(|t| s * (a0 + a1 * (w * (t - t_first) * s).cos())).collect();
    let mut q: Vec<f64> = pts.iter().map(|t| s * s * (b0 + b1 * (w * (t - t_first) * s).sin())).collect();
    if monotone {
        for i in 0..n {
            q[i] = -q[i].abs();
            let mu = if i + 1 < n { ts.mu(i) } else { ts.mu(i - 1) };
            p[i] = p[i].min(1.0 / mu);
        }
    }
    (p, q)
}

/// Largest spread, in decades, of the Wronskian `e_g(t, t0)` over the grid.
/// Beyond this the fundamental pair is numerically parallel somewhere.
pub const MAX_LOG10_RANGE: f64 = 6.0;

fn log_range(factors: &[f64]) -> f64 {
    let (mut lo, mut hi, mut acc) = (0.0f64, 0.0f64, 0.0f64);
    for f in factors {
        acc += f.log10();
        lo = lo.min(acc);
        hi = hi.max(acc);
    }
    hi - lo
}

/// A regressive problem with `|1 + mu (-p + mu q)| >= 0.1` everywhere and a
/// Wronskian that stays within [`MAX_LOG10_RANGE`] decades.
pub fn random_case(seed: u64, forced: bool) -> Case {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + seed);
    let kind = seed % 4;
    for _ in 0..1000 {
        let (family, name) = grid(&mut rng, kind);
        let ts = make_timescale(family).expect("generated grids are valid");
        let monotone = rng.gen_bool(0.3);
        let (p, q) = coefficients(&mut rng, &ts, kind == 2, monotone);
        let factors: Vec<f64> = (0..ts.kappa_len())
            .map(|i| {
                let mu = ts.mu(i);
                (1.0 + mu * (-p[i] + mu * q[i])).abs()
            })
            .collect();
        if factors.iter().any(|&f| f < 0.1) || log_range(&factors) > MAX_LOG10_RANGE {
            continue;
        }
        let pts = ts.points();
        let span = pts[pts.len() - 1] - pts[0];
        let (r0, r1, r2, w): (f64, f64, f64, f64) =
            (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(0.0..6.0));
        let r: Vec<f64> = if forced {
            pts.iter()
                .map(|t| {
                    let tau = (t - pts[0]) / span;
                    r0 + r1 * tau + r2 * (w * tau).sin()
                })
                .collect()
        } else {
            vec![0.0; ts.len()]
        };
        let t0_idx = if monotone { 0 } else { rng.gen_range(0..ts.kappa_len()) };
        let a_idx = rng.gen_range(0..ts.len());
        let initial = Initial { t0_idx, value: rng.gen_range(-2.0..2.0), delta: rng.gen_range(-2.0..2.0) / span };
        let spec = ProblemSpec::new(
            GridFn::new(&ts, p).unwrap(),
            GridFn::new(&ts, q).unwrap(),
            GridFn::new(&ts, r).unwrap(),
            initial,
            a_idx,
        )
        .expect("regressivity was screened");
        let label = format!(
            "seed {seed} {name} n={} t0={t0_idx} a={a_idx}{}",
            ts.len(),
            if monotone { " monotone" } else { "" }
        );
        return Case { seed, label, spec };
    }
    panic!("seed {seed}: no regressive draw in 1000 attempts");
}

pub fn suite(count: u64, forced: bool) -> Vec<Case> {
    (0..count).map(|s| random_case(s, forced)).collect()
}
