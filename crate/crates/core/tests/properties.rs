mod common;

use dyneq::config::{parse_problem, Coef, Form, ProblemConfig, SolverOptions};
use dyneq::particular::reduction_order_any;
use dyneq::prelude::*;
use dyneq::zspec::{product_sum_particular, ZSeq};
use proptest::prelude::*;

fn explicit_grid() -> impl Strategy<Value = Vec<f64>> {
    (-5.0..5.0f64, prop::collection::vec(0.05..2.0f64, 2..40)).prop_map(|(start, gaps)| {
        let mut t = start;
        let mut pts = vec![t];
        for g in gaps {
            t += g;
            pts.push(t);
        }
        pts
    })
}

proptest! {
    #[test]
    fn ominus_inverts_circle_plus(p in -10.0..10.0f64, mu in 0.0..3.0f64) {
        prop_assume!((1.0 + mu * p).abs() > 1e-3);
        let m = ominus(p, mu).unwrap();
        prop_assert!(circle_plus(p, m, mu).abs() <= 1e-12 * (1.0 + p.abs() + m.abs()));
    }

    #[test]
    fn exponential_cocycle(pts in explicit_grid(), c in -0.4..0.4f64, i in 0usize..40, j in 0usize..40) {
        let ts = make_timescale(Family::Explicit(pts)).unwrap();
        let (i, j) = (i % ts.len(), j % ts.len());
        let g = check_regressive(&GridFn::constant(&ts, c).unwrap(), 1e-12).unwrap();
        let e0 = exp_delta(&g, 0).unwrap();
        let ei = exp_delta(&g, i).unwrap();
        // e(t, i) = e(t, 0) / e(i, 0)
        let want = e0.get(j) / e0.get(i);
        prop_assert!((ei.get(j) - want).abs() <= 1e-12 * want.abs().max(1.0));
    }

    #[test]
    fn integral_then_derivative(pts in explicit_grid(), seed in 0u64..1000, a in 0usize..40) {
        let ts = make_timescale(Family::Explicit(pts)).unwrap();
        let a = a % ts.len();
        let f = GridFn::from_fn(&ts, |t| (t * (1.0 + seed as f64 * 1e-3)).sin()).unwrap();
        let big_f = cumulative_integral(&f, a).unwrap();
        prop_assert_eq!(big_f.get(a), 0.0);
        let d = delta_derivative(&big_f);
        for k in 0..ts.kappa_len() {
            prop_assert!((d.get(k) - f.get(k)).abs() <= 1e-12 * (1.0 + big_f.max_abs() / ts.mu(k)));
        }
    }

    #[test]
    fn stepping_is_reversible(seed in 0u64..400) {
        let case = common::random_case(seed, true);
        let spec = &case.spec;
        let (y, d) = step_ivp(spec).unwrap();
        // restart from the first point with the values the first run produced there
        let restarted = ProblemSpec::new(
            spec.p().clone(), spec.q().clone(), spec.r().clone(),
            Initial { t0_idx: 0, value: y.get(0), delta: d.get(0) }, 0,
        ).unwrap();
        let (y2, _) = step_ivp(&restarted).unwrap();
        let scale = y.max_abs().max(1.0);
        for i in 0..y.len() {
            prop_assert!((y.get(i) - y2.get(i)).abs() <= 1e-9 * scale, "{} at {}", case.label, i);
        }
    }

    #[test]
    fn particular_solution_has_zero_data_at_anchor(seed in 0u64..400) {
        let case = common::random_case(seed, true);
        let spec = &case.spec;
        let (y1, y2) = fundamental_pair(spec).unwrap();
        if let Ok((_, yd)) = reduction_order_any(spec, &y1, &y2, spec.a_idx()) {
            let a = spec.a_idx();
            prop_assert_eq!(yd.get(a), 0.0);
            if a + 1 < yd.len() {
                prop_assert!(yd.get(a + 1).abs() <= 1e-12 * yd.max_abs().max(1.0));
            }
        }
    }

    #[test]
    fn product_sum_matches_reduction_on_integers(seed in 0u64..100) {
        let case = common::random_case(4 * seed, true);
        let spec = &case.spec;
        let ts = spec.ts();
        let (y1, y2) = fundamental_pair(spec).unwrap();
        let Ok((basis, yd)) = reduction_order_any(spec, &y1, &y2, spec.a_idx()) else { return Ok(()) };
        let y = basis.select(&y1, &y2);
        let start = ts.point(0) as i64;
        let z = |g: &GridFn| ZSeq::new(start, g.values().to_vec());
        let zd = product_sum_particular(&z(spec.p()), &z(spec.q()), &z(spec.r()), ts.point(spec.a_idx()) as i64, &z(&y)).unwrap();
        let scale = yd.max_abs().max(1.0);
        for i in 0..yd.len() {
            prop_assert!((yd.get(i) - zd.values[i]).abs() <= 1e-9 * scale, "{} at {}", case.label, i);
        }
    }

    #[test]
    fn config_echo_roundtrip(
        pts in explicit_grid(),
        sigma in any::<bool>(),
        c in prop::collection::vec(-1e3..1e3f64, 1..5),
        k in -5.0..5.0f64,
        t0 in 0usize..40,
        basis in 1u8..=2,
        oracle in any::<bool>(),
        tol in 1e-14..1e-6f64,
    ) {
        let n = pts.len();
        let table: Vec<(f64, f64)> = pts.iter().map(|&t| (t, k * t)).collect();
        let cfg = ProblemConfig {
            family: Family::Explicit(pts.clone()),
            form: if sigma { Form::Sigma } else { Form::Delta },
            c1: Coef::Poly(c.clone()),
            c2: Coef::Table(table),
            r: Coef::Constant(k),
            t0: Some(pts[t0 % (n - 1)]),
            a: Some(pts[n - 1]),
            value: k,
            delta: -k,
            solver: SolverOptions { basis, oracle, reg_tol: tol, residual_tol: tol * 3.0 },
        };
        let text = cfg.echo();
        let back = parse_problem(&text).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.echo(), text);
        prop_assert_eq!(back.hash(), cfg.hash());
    }
}
