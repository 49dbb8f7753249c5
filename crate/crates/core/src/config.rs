//! Line-oriented problem files.
//!
//! ```text
//! # comments start with '#'
//! [timescale]
//! family = integers      # integers | hz | quantum | reals | explicit
//! a = 0
//! b = 10
//!
//! [coefficients]
//! form = delta           # delta (p, q, r) | shift (alpha, beta, r) | sigma (alpha, beta, r)
//! p = const 0
//! q = poly 0, 0.5        # c0 + c1 t + ...
//! r = table 0:1, 1:1, ...
//!
//! [initial]
//! t0 = 0
//! a = 0
//! A = 0
//! B = 0
//!
//! [solver]
//! basis = 1              # 1: reduce on y1, 2: reduce on y1 + y2
//! oracle = on
//! reg_tol = 1e-12
//! residual_tol = 1e-9
//! ```
//!
//! Family keys: `hz` takes `h, a, b`; `quantum` takes `h, a, k_max`;
//! `reals` takes `a, b, h`; `explicit` takes `points = t0, t1, ...`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use sha2::{Digest, Sha256};

use crate::particular::{convert_sigma_form, sigma_form_forcing};
use crate::solver::{Initial, ProblemSpec};
use crate::timescale::{make_timescale, Family, GridFn, TimeScale};
use crate::tol;
use crate::zspec::{ShiftFormSpec, ZSeq};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{}", fmt_validation(*.line, .msg))]
    Validation { line: Option<usize>, msg: String },
}

fn fmt_validation(line: Option<usize>, msg: &str) -> String {
    match line {
        Some(l) => format!("line {l}: {msg}"),
        None => msg.to_string(),
    }
}

impl ConfigError {
    pub fn line(&self) -> Option<usize> {
        match self {
            ConfigError::Parse { line, .. } => Some(*line),
            ConfigError::Validation { line, .. } => *line,
        }
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> ConfigError {
    ConfigError::Parse { line, msg: msg.into() }
}

fn invalid(line: Option<usize>, msg: impl Into<String>) -> ConfigError {
    ConfigError::Validation { line, msg: msg.into() }
}

/// One coefficient as written in the file.
#[derive(Debug, Clone, PartialEq)]
pub enum Coef {
    Constant(f64),
    /// `c0 + c1 t + c2 t^2 + ...`, evaluated in `t`.
    Poly(Vec<f64>),
    /// `(t, value)` pairs; every point of `T^kappa` must be listed.
    Table(Vec<(f64, f64)>),
}

impl Coef {
    /// Samples on the first `len` points of `ts`.
    fn sample(&self, ts: &TimeScale, len: usize, line: Option<usize>, name: &str) -> Result<Vec<f64>, ConfigError> {
        match self {
            Coef::Constant(c) => Ok(vec![*c; len]),
            Coef::Poly(cs) => {
                Ok(ts.points()[..len].iter().map(|&t| cs.iter().rev().fold(0.0, |acc, &c| acc * t + c)).collect())
            }
            Coef::Table(pairs) => {
                let mut out = vec![None; ts.len()];
                for &(t, v) in pairs {
                    let i = ts
                        .index_of(t)
                        .ok_or_else(|| invalid(line, format!("{name}: table point t = {t} is not on the grid")))?;
                    if out[i].is_some() {
                        return Err(invalid(line, format!("{name}: t = {t} listed twice")));
                    }
                    out[i] = Some(v);
                }
                (0..len)
                    .map(|i| {
                        out[i]
                            .ok_or_else(|| invalid(line, format!("{name}: table has no value at t = {}", ts.point(i))))
                    })
                    .collect()
            }
        }
    }

    fn echo(&self) -> String {
        match self {
            Coef::Constant(c) => format!("const {c:?}"),
            Coef::Poly(cs) => format!("poly {}", join(cs.iter().map(|c| format!("{c:?}")))),
            Coef::Table(ps) => format!("table {}", join(ps.iter().map(|(t, v)| format!("{t:?}:{v:?}")))),
        }
    }
}

fn join(items: impl Iterator<Item = String>) -> String {
    items.collect::<Vec<_>>().join(", ")
}

/// Which way the equation is written.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    /// `y^ΔΔ + p y^Δ + q y = r`.
    Delta,
    /// `y(t+2) + α y(t+1) + β y(t) = r` on the integers.
    Shift,
    /// `y^ΔΔ + α y^Δσ + β y^σ = r`.
    Sigma,
}

impl Form {
    fn name(self) -> &'static str {
        match self {
            Form::Delta => "delta",
            Form::Shift => "shift",
            Form::Sigma => "sigma",
        }
    }

    /// Names of the two coefficients besides `r`.
    fn symbols(self) -> [&'static str; 2] {
        match self {
            Form::Delta => ["p", "q"],
            Form::Shift | Form::Sigma => ["alpha", "beta"],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    /// 1 reduces on `y1`, 2 on `y1 + y2`.
    pub basis: u8,
    pub oracle: bool,
    pub reg_tol: f64,
    pub residual_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { basis: 1, oracle: true, reg_tol: tol::REG_TOL, residual_tol: tol::RESIDUAL_TOL }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemConfig {
    pub family: Family,
    pub form: Form,
    /// First and second coefficient: `p, q` or `α, β` depending on `form`.
    pub c1: Coef,
    pub c2: Coef,
    pub r: Coef,
    /// Initial point; the first grid point when absent.
    pub t0: Option<f64>,
    /// Anchor of the particular solution; the first grid point when absent.
    pub a: Option<f64>,
    pub value: f64,
    pub delta: f64,
    pub solver: SolverOptions,
}

/// Everything the commands need, built from a validated config.
#[derive(Debug, Clone)]
pub struct Problem {
    pub ts: Arc<TimeScale>,
    /// Delta form `y^ΔΔ + p y^Δ + q y = r`.
    pub spec: ProblemSpec,
    /// `(α, β, r)` as given, for `form = sigma`.
    pub sigma: Option<(GridFn, GridFn, GridFn)>,
    /// The integer equation as given, for `form = shift`.
    pub shift: Option<ShiftFormSpec>,
}

struct Entry {
    line: usize,
    value: String,
}

type Sections = BTreeMap<String, BTreeMap<String, Entry>>;

const KNOWN: &[(&str, &[&str])] = &[
    ("timescale", &["family", "a", "b", "h", "k_max", "points"]),
    ("coefficients", &["form", "p", "q", "r", "alpha", "beta"]),
    ("initial", &["t0", "a", "A", "B"]),
    ("solver", &["basis", "oracle", "reg_tol", "residual_tol"]),
];

fn split_sections(text: &str) -> Result<Sections, ConfigError> {
    let mut sections: Sections = BTreeMap::new();
    let mut current: Option<String> = None;
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(name) = body.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| parse_err(line, "unterminated section header"))?.trim();
            if !KNOWN.iter().any(|(s, _)| *s == name) {
                return Err(parse_err(line, format!("unknown section [{name}]")));
            }
            if sections.contains_key(name) {
                return Err(parse_err(line, format!("section [{name}] appears twice")));
            }
            sections.insert(name.to_string(), BTreeMap::new());
            current = Some(name.to_string());
            continue;
        }
        let (key, value) =
            body.split_once('=').ok_or_else(|| parse_err(line, format!("expected key = value, got '{body}'")))?;
        let (key, value) = (key.trim(), value.trim());
        let section = current.as_ref().ok_or_else(|| parse_err(line, "key outside of any section"))?;
        let allowed = KNOWN.iter().find(|(s, _)| s == section).map(|(_, k)| *k).unwrap_or(&[]);
        if !allowed.contains(&key) {
            return Err(parse_err(line, format!("unknown key '{key}' in [{section}]")));
        }
        if value.is_empty() {
            return Err(parse_err(line, format!("empty value for '{key}'")));
        }
        let map = sections.get_mut(section).expect("section inserted above");
        if map.contains_key(key) {
            return Err(parse_err(line, format!("'{key}' given twice in [{section}]")));
        }
        map.insert(key.to_string(), Entry { line, value: value.to_string() });
    }
    Ok(sections)
}

fn num(e: &Entry) -> Result<f64, ConfigError> {
    let v: f64 = e.value.parse().map_err(|_| parse_err(e.line, format!("'{}' is not a number", e.value)))?;
    if !v.is_finite() {
        return Err(parse_err(e.line, format!("'{}' is not finite", e.value)));
    }
    Ok(v)
}

fn num_list(line: usize, s: &str) -> Result<Vec<f64>, ConfigError> {
    s.split(',').map(|item| num(&Entry { line, value: item.trim().to_string() })).collect()
}

fn int(e: &Entry) -> Result<i64, ConfigError> {
    e.value.parse().map_err(|_| parse_err(e.line, format!("'{}' is not an integer", e.value)))
}

fn parse_coef(e: &Entry) -> Result<Coef, ConfigError> {
    let (kind, rest) = e.value.split_once(char::is_whitespace).unwrap_or((e.value.as_str(), ""));
    let rest = rest.trim();
    match kind {
        "const" => Ok(Coef::Constant(num(&Entry { line: e.line, value: rest.to_string() })?)),
        "poly" => Ok(Coef::Poly(num_list(e.line, rest)?)),
        "table" => rest
            .split(',')
            .map(|pair| {
                let (t, v) = pair
                    .split_once(':')
                    .ok_or_else(|| parse_err(e.line, format!("table entry '{}' is not t:value", pair.trim())))?;
                let t = num(&Entry { line: e.line, value: t.trim().to_string() })?;
                let v = num(&Entry { line: e.line, value: v.trim().to_string() })?;
                Ok((t, v))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Coef::Table),
        _ => Err(parse_err(e.line, format!("coefficient must start with const, poly or table, got '{kind}'"))),
    }
}

/// Parses and validates a problem file.
pub fn parse_problem(text: &str) -> Result<ProblemConfig, ConfigError> {
    let sections = split_sections(text)?;
    let empty = BTreeMap::new();
    let sec = |name: &str| sections.get(name).unwrap_or(&empty);
    let need = |name: &str, key: &str| -> Result<&Entry, ConfigError> {
        sec(name).get(key).ok_or_else(|| invalid(None, format!("missing '{key}' in [{name}]")))
    };

    let fam = need("timescale", "family")?;
    let family = match fam.value.as_str() {
        "integers" => Family::Integers { a: int(need("timescale", "a")?)?, b: int(need("timescale", "b")?)? },
        "hz" => Family::HZ {
            h: num(need("timescale", "h")?)?,
            a: num(need("timescale", "a")?)?,
            b: num(need("timescale", "b")?)?,
        },
        "quantum" => {
            let k = need("timescale", "k_max")?;
            Family::Quantum {
                h: num(need("timescale", "h")?)?,
                a: num(need("timescale", "a")?)?,
                k_max: k.value.parse().map_err(|_| parse_err(k.line, "k_max must be a nonnegative integer"))?,
            }
        }
        "reals" => Family::Reals {
            a: num(need("timescale", "a")?)?,
            b: num(need("timescale", "b")?)?,
            h: num(need("timescale", "h")?)?,
        },
        "explicit" => {
            let e = need("timescale", "points")?;
            Family::Explicit(num_list(e.line, &e.value)?)
        }
        other => return Err(invalid(Some(fam.line), format!("unknown family '{other}'"))),
    };
    let allowed: &[&str] = match &family {
        Family::Integers { .. } => &["a", "b"],
        Family::HZ { .. } | Family::Reals { .. } => &["a", "b", "h"],
        Family::Quantum { .. } => &["a", "h", "k_max"],
        Family::Explicit(_) => &["points"],
    };
    for (k, e) in sec("timescale") {
        if k != "family" && !allowed.contains(&k.as_str()) {
            return Err(invalid(Some(e.line), format!("'{k}' does not apply to family '{}'", fam.value)));
        }
    }
    let ts = make_timescale(family.clone()).map_err(|e| invalid(Some(fam.line), e.to_string()))?;

    let form = match sec("coefficients").get("form") {
        None => Form::Delta,
        Some(e) => match e.value.as_str() {
            "delta" => Form::Delta,
            "shift" => Form::Shift,
            "sigma" => Form::Sigma,
            other => return Err(invalid(Some(e.line), format!("unknown form '{other}'"))),
        },
    };
    let [s1, s2] = form.symbols();
    for (k, e) in sec("coefficients") {
        if k != "form" && k != "r" && k != s1 && k != s2 {
            return Err(invalid(Some(e.line), format!("'{k}' does not belong to form '{}'", form.name())));
        }
    }
    let e1 = need("coefficients", s1)?;
    let e2 = need("coefficients", s2)?;
    let er = need("coefficients", "r")?;
    let (c1, c2, r) = (parse_coef(e1)?, parse_coef(e2)?, parse_coef(er)?);
    let kappa = ts.kappa_len();
    c1.sample(&ts, kappa, Some(e1.line), s1)?;
    let beta = c2.sample(&ts, kappa, Some(e2.line), s2)?;
    r.sample(&ts, kappa, Some(er.line), "r")?;
    if form == Form::Shift {
        if !matches!(family, Family::Integers { .. }) {
            return Err(invalid(
                sec("coefficients").get("form").map(|e| e.line),
                "form = shift needs family = integers",
            ));
        }
        if let Some(i) = beta.iter().position(|&b| b == 0.0) {
            return Err(invalid(
                Some(e2.line),
                format!("beta vanishes at t = {}; the shift form requires beta(t) != 0", ts.point(i)),
            ));
        }
    }

    let point = |key: &str| -> Result<Option<f64>, ConfigError> {
        sec("initial")
            .get(key)
            .map(|e| {
                let t = num(e)?;
                ts.index_of(t).ok_or_else(|| invalid(Some(e.line), format!("{key} = {t} is not on the grid")))?;
                Ok(t)
            })
            .transpose()
    };
    let t0 = point("t0")?;
    let a = point("a")?;
    if let (Some(t), Some(e)) = (t0, sec("initial").get("t0")) {
        if ts.index_of(t).is_some_and(|i| i >= kappa) {
            return Err(invalid(Some(e.line), "t0 cannot be the last grid point"));
        }
    }
    let value = sec("initial").get("A").map(num).transpose()?.unwrap_or(0.0);
    let delta = sec("initial").get("B").map(num).transpose()?.unwrap_or(0.0);

    let mut solver = SolverOptions::default();
    let s = sec("solver");
    if let Some(e) = s.get("basis") {
        solver.basis = match e.value.as_str() {
            "1" => 1,
            "2" => 2,
            _ => return Err(invalid(Some(e.line), "basis must be 1 or 2")),
        };
    }
    if let Some(e) = s.get("oracle") {
        solver.oracle = match e.value.as_str() {
            "on" => true,
            "off" => false,
            _ => return Err(invalid(Some(e.line), "oracle must be on or off")),
        };
    }
    for (key, slot) in [("reg_tol", &mut solver.reg_tol), ("residual_tol", &mut solver.residual_tol)] {
        if let Some(e) = s.get(key) {
            let v = num(e)?;
            if v <= 0.0 {
                return Err(invalid(Some(e.line), format!("{key} must be positive")));
            }
            *slot = v;
        }
    }

    Ok(ProblemConfig { family, form, c1, c2, r, t0, a, value, delta, solver })
}

impl ProblemConfig {
    /// Canonical text of the config; parsing it gives back an equal config.
    pub fn echo(&self) -> String {
        let mut s = String::from("[timescale]\n");
        match &self.family {
            Family::Integers { a, b } => write!(s, "family = integers\na = {a}\nb = {b}\n"),
            Family::HZ { h, a, b } => write!(s, "family = hz\nh = {h:?}\na = {a:?}\nb = {b:?}\n"),
            Family::Quantum { h, a, k_max } => write!(s, "family = quantum\nh = {h:?}\na = {a:?}\nk_max = {k_max}\n"),
            Family::Reals { a, b, h } => write!(s, "family = reals\na = {a:?}\nb = {b:?}\nh = {h:?}\n"),
            Family::Explicit(pts) => {
                write!(s, "family = explicit\npoints = {}\n", join(pts.iter().map(|t| format!("{t:?}"))))
            }
        }
        .expect("writing to a String");
        let [s1, s2] = self.form.symbols();
        s.push_str("\n[coefficients]\n");
        let _ = writeln!(s, "form = {}", self.form.name());
        let _ = writeln!(s, "{s1} = {}", self.c1.echo());
        let _ = writeln!(s, "{s2} = {}", self.c2.echo());
        let _ = writeln!(s, "r = {}", self.r.echo());
        s.push_str("\n[initial]\n");
        if let Some(t) = self.t0 {
            let _ = writeln!(s, "t0 = {t:?}");
        }
        if let Some(a) = self.a {
            let _ = writeln!(s, "a = {a:?}");
        }
        let _ = writeln!(s, "A = {:?}\nB = {:?}", self.value, self.delta);
        s.push_str("\n[solver]\n");
        let _ = writeln!(
            s,
            "basis = {}\noracle = {}\nreg_tol = {:?}\nresidual_tol = {:?}",
            self.solver.basis,
            if self.solver.oracle { "on" } else { "off" },
            self.solver.reg_tol,
            self.solver.residual_tol
        );
        s
    }

    /// Hex SHA-256 of [`ProblemConfig::echo`].
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.echo().as_bytes()))
    }

    pub fn timescale(&self) -> crate::Result<Arc<TimeScale>> {
        make_timescale(self.family.clone())
    }

    /// Builds the delta-form problem. Regressivity is checked here, not at parse time.
    pub fn build(&self) -> crate::Result<Problem> {
        let ts = self.timescale()?;
        let n = ts.len();
        let sample = |c: &Coef| -> crate::Result<GridFn> {
            let len = match c {
                Coef::Table(_) => ts.kappa_len(),
                _ => n,
            };
            let v = c.sample(&ts, len, None, "").expect("validated when parsed");
            GridFn::new(&ts, v)
        };
        let (g1, g2, gr) = (sample(&self.c1)?, sample(&self.c2)?, sample(&self.r)?);
        let idx = |t: Option<f64>| t.and_then(|t| ts.index_of(t)).unwrap_or(0);
        let initial = Initial { t0_idx: idx(self.t0), value: self.value, delta: self.delta };
        let a_idx = idx(self.a);
        let mk = |p, q, r| ProblemSpec::with_reg_tol(p, q, r, initial, a_idx, self.solver.reg_tol);
        match self.form {
            Form::Delta => Ok(Problem { spec: mk(g1, g2, gr)?, ts, sigma: None, shift: None }),
            Form::Sigma => {
                let (p, q) = convert_sigma_form(&g1, &g2)?;
                let rt = sigma_form_forcing(&g1, &gr)?;
                Ok(Problem { spec: mk(p, q, rt)?, ts, sigma: Some((g1, g2, gr)), shift: None })
            }
            Form::Shift => {
                let start = ts.point(0) as i64;
                let z = |g: &GridFn| ZSeq::new(start, g.values()[..ts.kappa_len()].to_vec());
                let shift = ShiftFormSpec::new(z(&g1), z(&g2), z(&gr))?;
                let (p, q) = shift.to_delta();
                let grid = |s: ZSeq| GridFn::new(&ts, s.values);
                Ok(Problem { spec: mk(grid(p)?, grid(q)?, gr)?, ts, sigma: None, shift: Some(shift) })
            }
        }
    }
}
