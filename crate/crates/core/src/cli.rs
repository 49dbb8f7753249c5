//! The commands behind the `dyneq` binary.
//!
//! Each command takes a parsed [`ProblemConfig`] and returns a value that can
//! be rendered; reading files, printing and exit codes live in the binary.

use std::fmt::Write as _;

use crate::bounds::{growth_bound_check, nonmultiplicity_check, BoundMode, BoundReport};
use crate::config::{Coef, Problem, ProblemConfig};
use crate::error::{Error, Result};
use crate::particular::{
    assemble_general, reduction_order_any, reduction_order_particular, sigma_residual, variation_particular, Basis,
    SolutionBundle,
};
use crate::solver::{ensure_homogeneous, fundamental_pair, residual, residual_scale, step_ivp, wronskian, ProblemSpec};
use crate::table::{Metadata, ResultTable, Row};
use crate::timescale::{delta_derivative, exp_delta, ominus, Family, GridFn, Mode};
use crate::tol;
use crate::zspec::{const_coeff_particular, product_sum_particular, Root, ZSeq};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exit status for a command that ran but found a failed check.
pub const EXIT_FAIL: i32 = 1;
/// Exit status for unreadable, invalid or unsolvable input.
pub const EXIT_INPUT: i32 = 2;

/// Fundamental pair, reduction-of-order particular solution and the assembled IVP solution.
pub fn pipeline(problem: &Problem, basis: u8) -> Result<(Basis, SolutionBundle)> {
    let spec = &problem.spec;
    let (y1, y2) = fundamental_pair(spec)?;
    let (used, yd) = if basis == 2 {
        (Basis::Sum, reduction_order_particular(spec, &Basis::Sum.select(&y1, &y2), spec.a_idx())?)
    } else {
        reduction_order_any(spec, &y1, &y2, spec.a_idx())?
    };
    Ok((used, assemble_general(spec, &y1, &y2, &yd)?))
}

/// Residual of the equation as written in the config, on `T^kappa^2`.
fn original_residual(problem: &Problem, y: &GridFn) -> Result<GridFn> {
    match &problem.sigma {
        Some((alpha, beta, r)) => sigma_residual(alpha, beta, r, y),
        None => residual(&problem.spec, y),
    }
}

/// Largest admissible residual for `y`.
fn residual_limit(problem: &Problem, y: &GridFn, rel_tol: f64) -> f64 {
    let spec = &problem.spec;
    let mut scale = residual_scale(spec, y).max(1.0 + spec.r().max_abs());
    if let Some((alpha, _, r)) = &problem.sigma {
        let ts = spec.ts();
        let stretch = (0..ts.kappa_len()).fold(1.0f64, |m, i| m.max((1.0 + ts.mu(i) * alpha.get(i)).abs()));
        scale = scale.max(1.0 + r.max_abs()) * stretch;
    }
    rel_tol * scale
}

fn max_abs_diff(a: &GridFn, b: &GridFn, from: usize) -> f64 {
    (from..a.len().min(b.len())).fold(0.0f64, |m, i| m.max((a.get(i) - b.get(i)).abs()))
}

/// `solve`: the IVP solution by reduction of order, with residuals and growth envelope.
pub fn cmd_solve(cfg: &ProblemConfig) -> Result<ResultTable> {
    let problem = cfg.build()?;
    let spec = &problem.spec;
    let ts = spec.ts();
    let (basis, sol) = pipeline(&problem, cfg.solver.basis)?;

    let res = original_residual(&problem, &sol.y)?;
    let limit = residual_limit(&problem, &sol.y, cfg.solver.residual_tol);
    let bound = growth_bound_check(spec, &sol.complementary(), BoundMode::VarCoeff { p1: None, q1: None })?;
    let ydelta = delta_derivative(&sol.y);
    let oracle_max_dev = if cfg.solver.oracle {
        let (stepped, _) = step_ivp(spec)?;
        Some(max_abs_diff(&stepped, &sol.y, 0))
    } else {
        None
    };

    let rows = (0..ts.len())
        .map(|i| {
            let residual = (i < res.len()).then(|| res.get(i));
            let j = i.checked_sub(bound.start).filter(|&j| j < bound.norm.len());
            let res_ok = residual.map(|r| r.abs() <= limit);
            let bound_ok = j.map(|j| bound.verdict[j]);
            let verdict = match (res_ok, bound_ok) {
                (None, None) => None,
                (a, b) => Some(a.unwrap_or(true) && b.unwrap_or(true)),
            };
            Row {
                t: ts.point(i),
                y: sol.y.get(i),
                ydelta: (i < ydelta.len()).then(|| ydelta.get(i)),
                yd: sol.yd.get(i),
                residual,
                norm: j.map(|j| bound.norm[j]),
                envelope: j.map(|j| bound.envelope[j]),
                verdict,
            }
        })
        .collect();

    Ok(ResultTable {
        metadata: Metadata {
            config_hash: cfg.hash(),
            version: VERSION.to_string(),
            method: format!("reduction-of-order[{}]", basis.label()),
            c1: sol.c1,
            c2: sol.c2,
            reg_tol: cfg.solver.reg_tol,
            residual_tol: cfg.solver.residual_tol,
            k: bound.k,
            oracle_max_dev,
        },
        rows,
    })
}

/// Outcome of one property check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, pass: bool, detail: impl Into<String>) -> Self {
        Self { name, pass, detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let _ = writeln!(s, "{:<16} {}  {}", c.name, if c.pass { "PASS" } else { "FAIL" }, c.detail);
        }
        let _ = writeln!(s, "{}", if self.passed() { "all checks passed" } else { "some checks failed" });
        s
    }
}

/// `verify`: runs the property checks and reports each one.
///
/// A regressivity violation is a failed check; other library errors are
/// returned.
pub fn cmd_verify(cfg: &ProblemConfig) -> Result<VerifyReport> {
    let mut checks = Vec::new();
    let problem = match cfg.build() {
        Ok(p) => p,
        Err(Error::NotRegressive { index, t, value }) => {
            checks.push(Check::new("regressivity", false, format!("1 + mu*g = {value:e} at t = {t} (index {index})")));
            return Ok(VerifyReport { checks });
        }
        Err(e) => return Err(e),
    };
    let spec = &problem.spec;
    let ts = spec.ts();
    let tol_rel = cfg.solver.residual_tol;

    let g = spec.composite().as_grid();
    let worst = (0..g.len()).map(|i| (1.0 + ts.mu(i) * g.get(i)).abs()).fold(f64::INFINITY, f64::min);
    checks.push(Check::new("regressivity", true, format!("min |1 + mu*g| = {worst:e}")));

    let (basis, sol) = pipeline(&problem, cfg.solver.basis)?;
    let res = original_residual(&problem, &sol.y)?;
    let limit = residual_limit(&problem, &sol.y, tol_rel);
    let worst = res.max_abs();
    checks.push(Check::new("residual", worst <= limit, format!("max |res| = {worst:e}, limit {limit:e}")));

    if let Some((alpha, _, _)) = &problem.sigma {
        let mut dev = 0.0f64;
        for i in 0..ts.kappa_len() {
            let mu = ts.mu(i);
            let want = ominus(alpha.get(i), mu)?;
            dev = dev.max((g.get(i) - want).abs() / want.abs().max(1.0));
        }
        checks.push(Check::new("sigma-conversion", dev <= tol::VIETA_TOL, format!("max |g - (-)alpha| = {dev:e}")));
    }

    let e = exp_delta(spec.composite(), spec.t0_idx())?;
    let w = wronskian(&sol.y1, &sol.y2)?;
    let w0 = w.get(spec.t0_idx());
    let abel = (0..w.len()).fold(0.0f64, |m, i| {
        let want = e.get(i) * w0;
        m.max((w.get(i) - want).abs() / want.abs().max(f64::MIN_POSITIVE))
    });
    checks.push(Check::new("abel", abel <= tol::ABEL_TOL, format!("max relative |W - e_g W(t0)| = {abel:e}")));

    if spec.a_idx() < ts.kappa_len() {
        let yd_ro = reduction_order_particular(spec, &basis.select(&sol.y1, &sol.y2), spec.a_idx())?;
        let yd_vop = variation_particular(spec, &sol.y1, &sol.y2, spec.a_idx())?;
        let diff = yd_ro.zip_with(&yd_vop, |a, b| a - b)?;
        let scale = residual_scale(spec, &yd_ro).max(residual_scale(spec, &yd_vop));
        let res = residual(&spec.homogeneous(), &diff)?.max_abs();
        checks.push(Check::new(
            "ro-vop",
            res <= tol_rel * scale,
            format!("homogeneous residual of the difference = {res:e}, max |diff| = {:e}", diff.max_abs()),
        ));
    } else {
        checks.push(Check::new("ro-vop", true, "skipped: anchor is the last grid point"));
    }

    let mode = BoundMode::VarCoeff { p1: None, q1: None };
    let b1 = growth_bound_check(spec, &sol.y1, mode)?;
    let b2 = growth_bound_check(spec, &sol.y2, mode)?;
    let margin = b1.min_margin().min(b2.min_margin());
    checks.push(Check::new(
        "growth-bound",
        b1.all_pass() && b2.all_pass(),
        format!("k = {}, min margin = {margin:e}", b1.k),
    ));

    let nm = nonmultiplicity_check(spec)?;
    checks.push(Check::new(
        "nonmultiplicity",
        nm.relative() <= tol_rel,
        format!("max relative deviation = {:e}", nm.relative()),
    ));

    if cfg.solver.oracle {
        if let Some(check) = integer_oracle(&problem, &sol, tol_rel) {
            checks.push(check);
        }
    }

    if let Mode::ContinuumApprox { .. } = ts.mode() {
        checks.push(refinement_check(cfg));
    }

    Ok(VerifyReport { checks })
}

/// Compares the assembled solution with the integer-specific product/sum formula.
fn integer_oracle(problem: &Problem, sol: &SolutionBundle, rel_tol: f64) -> Option<Check> {
    let (p, q, r, y1) = integer_data(problem, &sol.y1)?;
    let a = problem.ts.point(problem.spec.a_idx()) as i64;
    let out = product_sum_particular(&p, &q, &r, a, &y1)
        .and_then(|yd| GridFn::new(&problem.ts, yd.values))
        .and_then(|yd| assemble_general(&problem.spec, &sol.y1, &sol.y2, &yd));
    Some(match out {
        Ok(other) => {
            let dev = max_abs_diff(&other.y, &sol.y, 0);
            let scale = sol.y.max_abs().max(1.0);
            Check::new("integer-oracle", dev <= rel_tol * scale, format!("max |y - y_Z| = {dev:e}"))
        }
        Err(e) => Check::new("integer-oracle", true, format!("skipped: {e}")),
    })
}

/// `(p, q, r, y1)` as integer sequences, when the grid is a block of integers.
fn integer_data(problem: &Problem, y1: &GridFn) -> Option<(ZSeq, ZSeq, ZSeq, ZSeq)> {
    let ts = &problem.ts;
    if !ts.points().iter().all(|t| t.fract() == 0.0) || !ts.graininess().iter().all(|&m| m == 1.0) {
        return None;
    }
    let start = ts.point(0) as i64;
    let spec = &problem.spec;
    let z = |g: &GridFn| ZSeq::new(start, g.values().to_vec());
    Some((z(spec.p()), z(spec.q()), z(spec.r()), z(y1)))
}

/// Self-convergence of the mesh solution under halving of `h`.
fn refinement_check(cfg: &ProblemConfig) -> Check {
    let name = "refinement";
    let Family::Reals { a, b, h } = cfg.family else {
        return Check::new(name, true, "skipped: not a reals mesh");
    };
    if [&cfg.c1, &cfg.c2, &cfg.r].iter().any(|c| matches!(c, Coef::Table(_))) {
        return Check::new(name, true, "skipped: tabulated coefficients cannot be refined");
    }
    let solve_at = |h: f64| -> Result<GridFn> {
        let mut c = cfg.clone();
        c.family = Family::Reals { a, b, h };
        Ok(pipeline(&c.build()?, cfg.solver.basis)?.1.y)
    };
    let ys = match [h, h / 2.0, h / 4.0].map(solve_at) {
        [Ok(a), Ok(b), Ok(c)] => [a, b, c],
        [a, b, c] => {
            let e = [a.err(), b.err(), c.err()].into_iter().flatten().next().expect("one failed");
            return Check::new(name, false, format!("refined solve failed: {e}"));
        }
    };
    let n = ys[0].len();
    if ys[1].len() != 2 * n - 1 || ys[2].len() != 4 * n - 3 {
        return Check::new(name, true, "skipped: interval is not a whole number of half steps");
    }
    let d1 = (0..n).fold(0.0f64, |m, i| m.max((ys[0].get(i) - ys[1].get(2 * i)).abs()));
    let d2 = (0..n).fold(0.0f64, |m, i| m.max((ys[1].get(2 * i) - ys[2].get(4 * i)).abs()));
    let scale = ys[2].max_abs().max(1.0);
    if d1 <= 1e-12 * scale && d2 <= 1e-12 * scale {
        return Check::new(name, true, "mesh solution does not depend on h");
    }
    let ratio = d1 / d2;
    let (lo, hi) = tol::REFINEMENT_BAND;
    Check::new(
        name,
        (lo..=hi).contains(&ratio),
        format!("|y_h - y_h/2| / |y_h/2 - y_h/4| = {ratio:.6} (first order: 2)"),
    )
}

/// One method's IC-matched solution in `compare`.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodColumn {
    pub name: &'static str,
    pub result: std::result::Result<GridFn, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairDiff {
    pub left: &'static str,
    pub right: &'static str,
    pub max_diff: f64,
    pub residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub t: Vec<f64>,
    pub columns: Vec<MethodColumn>,
    pub pairs: Vec<PairDiff>,
}

impl CompareReport {
    pub fn passed(&self) -> bool {
        self.pairs.iter().all(|p| p.pass)
    }

    pub fn column(&self, name: &str) -> Option<&GridFn> {
        self.columns.iter().find(|c| c.name == name).and_then(|c| c.result.as_ref().ok())
    }

    pub fn render(&self) -> String {
        let mut s = String::from("t");
        for c in &self.columns {
            s.push(',');
            s.push_str(c.name);
        }
        s.push('\n');
        for (i, t) in self.t.iter().enumerate() {
            s.push_str(&format!("{t:.16e}"));
            for c in &self.columns {
                s.push(',');
                if let Ok(y) = &c.result {
                    s.push_str(&format!("{:.16e}", y.get(i)));
                }
            }
            s.push('\n');
        }
        for c in &self.columns {
            match &c.result {
                Ok(_) => {
                    let _ = writeln!(s, "# {}: ok", c.name);
                }
                Err(e) => {
                    let _ = writeln!(s, "# {}: failed ({e})", c.name);
                }
            }
        }
        for p in &self.pairs {
            let _ = writeln!(
                s,
                "# {} vs {}: max |diff| = {:e}, homogeneous residual = {:e}, {}",
                p.left,
                p.right,
                p.max_diff,
                p.residual,
                if p.pass { "pass" } else { "fail" }
            );
        }
        s
    }
}

/// `compare`: every applicable construction of `y_d`, matched to the initial data.
pub fn cmd_compare(cfg: &ProblemConfig) -> Result<CompareReport> {
    let problem = cfg.build()?;
    let spec = &problem.spec;
    let ts = spec.ts();
    let (y1, y2) = fundamental_pair(spec)?;
    let a = spec.a_idx();
    let assemble = |yd: Result<GridFn>| -> std::result::Result<GridFn, String> {
        yd.and_then(|yd| assemble_general(spec, &y1, &y2, &yd)).map(|b| b.y).map_err(|e| e.to_string())
    };

    let mut columns = vec![
        MethodColumn { name: "ro_y1", result: assemble(reduction_order_particular(spec, &y1, a)) },
        MethodColumn {
            name: "ro_y1+y2",
            result: assemble(reduction_order_particular(spec, &Basis::Sum.select(&y1, &y2), a)),
        },
        MethodColumn { name: "vop", result: assemble(variation_particular(spec, &y1, &y2, a)) },
    ];

    if let Some((p, q, r, z1)) = integer_data(&problem, &y1) {
        let t_a = ts.point(a) as i64;
        let yd = product_sum_particular(&p, &q, &r, t_a, &z1).and_then(|yd| GridFn::new(ts, yd.values));
        columns.push(MethodColumn { name: "product_sum", result: assemble(yd) });
        for (name, root) in [("const_minus", Root::Minus), ("const_plus", Root::Plus)] {
            columns.push(MethodColumn { name, result: const_column(spec, root).and_then(|yd| assemble(Ok(yd))) });
        }
    }

    let mut pairs = Vec::new();
    let ok: Vec<(&'static str, &GridFn)> =
        columns.iter().filter_map(|c| c.result.as_ref().ok().map(|y| (c.name, y))).collect();
    let homog = spec.homogeneous();
    for (i, (ln, ly)) in ok.iter().enumerate() {
        for (rn, ry) in &ok[i + 1..] {
            let diff = ly.zip_with(ry, |x, y| x - y)?;
            let res = residual(&homog, &diff)?.max_abs();
            let scale = residual_scale(spec, ly).max(residual_scale(spec, ry));
            let max_diff = diff.max_abs();
            let y_scale = ly.max_abs().max(ry.max_abs()).max(1.0);
            pairs.push(PairDiff {
                left: ln,
                right: rn,
                max_diff,
                residual: res,
                pass: res <= cfg.solver.residual_tol * scale && max_diff <= cfg.solver.residual_tol * y_scale,
            });
        }
    }
    Ok(CompareReport { t: ts.points().to_vec(), columns, pairs })
}

/// The constant-coefficient double sum on the integers, anchored at the first point.
fn const_column(spec: &ProblemSpec, root: Root) -> std::result::Result<GridFn, String> {
    let ts = spec.ts();
    let (p, q) = (spec.p().get(0), spec.q().get(0));
    if spec.p().values().iter().any(|&v| v != p) || spec.q().values().iter().any(|&v| v != q) {
        return Err(Error::NonConstantCoefficients.to_string());
    }
    if spec.a_idx() != 0 {
        return Err("needs the anchor at the first grid point".into());
    }
    let start = ts.point(0) as i64;
    let r = ZSeq::new(start, spec.r().values()[..ts.kappa2_len()].to_vec());
    let yd = const_coeff_particular((p - 2.0) / 2.0, 1.0 - p + q, &r, start, root).map_err(|e| e.to_string())?;
    GridFn::new(ts, yd.values).map_err(|e| e.to_string())
}

/// `bound`: growth envelope for the homogeneous solution with the configured initial data.
pub fn cmd_bound(cfg: &ProblemConfig, mode: BoundMode) -> Result<BoundReport> {
    let problem = cfg.build()?;
    let homog = problem.spec.homogeneous();
    let (y, _) = step_ivp(&homog)?;
    ensure_homogeneous(&homog, &y, cfg.solver.residual_tol)?;
    growth_bound_check(&homog, &y, mode)
}

pub fn render_bound(report: &BoundReport, ts_points: &[f64]) -> String {
    let mut s = String::from("t,norm,envelope,margin,verdict\n");
    for j in 0..report.norm.len() {
        let _ = writeln!(
            s,
            "{:.16e},{:.16e},{:.16e},{:.16e},{}",
            ts_points[report.start + j],
            report.norm[j],
            report.envelope[j],
            report.margin[j],
            if report.verdict[j] { "pass" } else { "fail" }
        );
    }
    let _ = writeln!(s, "# k = {:.16e}", report.k);
    match report.lemma_violation {
        None => s.push_str("# energy inequality holds on every point\n"),
        Some(i) => {
            let _ = writeln!(s, "# energy inequality fails at t = {}", ts_points[i]);
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_problem;

    fn cfg(body: &str) -> ProblemConfig {
        parse_problem(body).unwrap()
    }

    const POLY: &str =
        "[timescale]\nfamily = integers\na = 0\nb = 10\n[coefficients]\np = const 0\nq = const 0\nr = const 1\n";

    #[test]
    fn solve_quadratic() {
        let table = cmd_solve(&cfg(POLY)).unwrap();
        for row in &table.rows {
            assert_eq!(row.y, row.t * (row.t - 1.0) / 2.0);
        }
        assert!(table.all_pass());
        assert_eq!(table.rows.last().unwrap().residual, None);
        assert_eq!(table.rows[8].residual, Some(0.0));
    }

    #[test]
    fn solve_without_forcing_is_y1() {
        let text = POLY.replace("r = const 1", "r = const 0\n[initial]\nA = 1\nB = 0");
        let table = cmd_solve(&cfg(&text)).unwrap();
        assert!(table.rows.iter().all(|r| r.y == 1.0));
        assert_eq!((table.metadata.c1, table.metadata.c2), (1.0, 0.0));
    }

    #[test]
    fn compare_quadratic() {
        let report = cmd_compare(&cfg(POLY)).unwrap();
        for name in ["ro_y1", "ro_y1+y2", "vop", "product_sum", "const_minus", "const_plus"] {
            let col = report.column(name);
            assert!(col.is_some() || name.starts_with("const"), "{name}");
            if let Some(y) = col {
                for (i, t) in report.t.iter().enumerate() {
                    assert!((y.get(i) - t * (t - 1.0) / 2.0).abs() < 1e-9, "{name}");
                }
            }
        }
        assert!(report.passed());
    }

    #[test]
    fn compare_survives_zero_in_y1() {
        // y1 = 1, 1, 0, 1, -1, ... vanishes at t = 2
        let text = "[timescale]\nfamily = integers\na = 0\nb = 12\n[coefficients]\nform = shift\nalpha = const 1\nbeta = const -1\nr = const 1\n";
        let report = cmd_compare(&cfg(text)).unwrap();
        let ro = report.columns.iter().find(|c| c.name == "ro_y1").unwrap();
        assert!(ro.result.as_ref().unwrap_err().contains("vanishes"));
        assert!(report.column("vop").is_some());
        assert!(report.column("ro_y1+y2").is_some());
        assert!(report.passed());
    }

    #[test]
    fn verify_flags_regressivity() {
        let report = cmd_verify(&cfg(
            &POLY.replace("p = const 0", "p = table 0:0, 1:0, 2:0, 3:1, 4:0, 5:0, 6:0, 7:0, 8:0, 9:0")
        ))
        .unwrap();
        assert!(!report.passed());
        assert_eq!(report.checks[0].name, "regressivity");
        assert!(report.checks[0].detail.contains("t = 3"));
    }

    #[test]
    fn verify_passes_quadratic() {
        let report = cmd_verify(&cfg(POLY)).unwrap();
        assert!(report.passed(), "{}", report.render());
    }

    #[test]
    fn bound_modes() {
        let text = POLY.replace("r = const 1", "r = const 0\n[initial]\nA = 1\nB = 1");
        let rep = cmd_bound(&cfg(&text), BoundMode::ConstCoeff).unwrap();
        assert!(rep.all_pass());
        let var = POLY.replace("q = const 0", "q = poly 0, -0.01");
        assert_eq!(cmd_bound(&cfg(&var), BoundMode::ConstCoeff).unwrap_err(), Error::NonConstantCoefficients);
    }
}
