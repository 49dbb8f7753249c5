use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dyneq::cli::{cmd_compare, cmd_solve, cmd_verify};
use dyneq::config::parse_problem;
use dyneq::table::{Format, CSV_HEADER};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dyneq")).args(args).output().unwrap()
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

const BUNDLED: [&str; 5] = ["poly.cfg", "fibonacci.cfg", "quantum.cfg", "harmonic.cfg", "sigma.cfg"];

#[test]
fn bundled_configs_verify() {
    for name in BUNDLED {
        let out = bin(&["verify", config(name).to_str().unwrap()]);
        let text = String::from_utf8_lossy(&out.stdout);
        assert_eq!(out.status.code(), Some(0), "{name}\n{text}");
        assert!(text.contains("all checks passed"));
    }
}

#[test]
fn bundled_configs_compare_and_bound() {
    for name in BUNDLED {
        let path = config(name);
        let out = bin(&["compare", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stdout));
        let out = bin(&["bound", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stdout));
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.cfg");
    assert_eq!(bin(&["solve", missing.to_str().unwrap()]).status.code(), Some(2));

    let broken = dir.path().join("broken.cfg");
    std::fs::write(&broken, "[timescale]\nfamily = integers\na = 0\nb = 1.5\n").unwrap();
    let out = bin(&["solve", broken.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));

    let fib = config("fibonacci.cfg");
    let out = bin(&["bound", fib.to_str().unwrap(), "--mode", "const"]);
    assert_eq!(out.status.code(), Some(0));
    let quad = config("quantum.cfg");
    let out = bin(&["bound", quad.to_str().unwrap(), "--mode", "const"]);
    assert_eq!(out.status.code(), Some(0));

    assert_eq!(bin(&["solve"]).status.code(), Some(2));
    assert_eq!(bin(&["frobnicate", "x"]).status.code(), Some(2));
    assert_eq!(bin(&["--version"]).status.code(), Some(0));
}

#[test]
fn solve_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("out.json");
    let cfg = config("poly.cfg");
    let out = bin(&["solve", cfg.to_str().unwrap(), "--format", "json", "--out", out_path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();

    let parsed = parse_problem(&std::fs::read_to_string(&cfg).unwrap()).unwrap();
    let table = cmd_solve(&parsed).unwrap();
    assert_eq!(v["metadata"]["c1"].as_f64().unwrap(), table.metadata.c1);
    assert_eq!(v["metadata"]["c2"].as_f64().unwrap(), table.metadata.c2);
    assert_eq!(v["metadata"]["config_hash"], parsed.hash());
    assert_eq!(v["rows"].as_array().unwrap().len(), 21);
    assert!(v["rows"][20]["residual"].is_null());
}

#[test]
fn csv_layout() {
    let out = bin(&["solve", config("poly.cfg").to_str().unwrap()]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 22);
    for line in &lines[1..] {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 8);
        let y: f64 = fields[1].parse().unwrap();
        assert!(y.is_finite());
        // 17 significant digits: d.dddddddddddddddde±x
        assert_eq!(fields[1].split('e').next().unwrap().trim_start_matches('-').len(), 18);
    }
    assert!(lines[21].ends_with(",,,,"));
}

#[test]
fn quadratic_through_cli() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("q.cfg");
    std::fs::write(
        &path,
        "[timescale]\nfamily = integers\na = 0\nb = 10\n[coefficients]\np = const 0\nq = const 0\nr = const 1\n",
    )
    .unwrap();
    let text = String::from_utf8(bin(&["solve", path.to_str().unwrap()]).stdout).unwrap();
    for line in text.lines().skip(1) {
        let f: Vec<f64> = line.split(',').take(2).map(|s| s.parse().unwrap()).collect();
        assert_eq!(f[1], f[0] * (f[0] - 1.0) / 2.0);
    }
}

#[test]
fn sigma_config_matches_converted_delta_config() {
    let sigma = parse_problem(&std::fs::read_to_string(config("sigma.cfg")).unwrap()).unwrap();
    let problem = sigma.build().unwrap();
    let spec = &problem.spec;
    let ts = spec.ts();
    let table = |g: &dyneq::timescale::GridFn| {
        let mut s = String::from("table ");
        for i in 0..ts.kappa_len() {
            let _ = write!(s, "{}{:?}:{:?}", if i > 0 { ", " } else { "" }, ts.point(i), g.get(i));
        }
        s
    };
    let delta_text = format!(
        "[timescale]\nfamily = hz\nh = 0.5\na = 0\nb = 5\n[coefficients]\np = {}\nq = {}\nr = {}\n\
         [initial]\nt0 = 0\na = 0.5\nA = 0.5\nB = 1\n[solver]\nbasis = 2\n",
        table(spec.p()),
        table(spec.q()),
        table(spec.r())
    );
    let delta = parse_problem(&delta_text).unwrap();
    let a = cmd_solve(&sigma).unwrap();
    let b = cmd_solve(&delta).unwrap();
    assert_eq!((a.metadata.c1, a.metadata.c2), (b.metadata.c1, b.metadata.c2));
    for (ra, rb) in a.rows.iter().zip(&b.rows) {
        assert_eq!((ra.t, ra.y, ra.ydelta, ra.yd), (rb.t, rb.y, rb.ydelta, rb.yd));
        assert_eq!((ra.norm, ra.envelope), (rb.norm, rb.envelope));
    }
}

#[test]
fn compare_fibonacci_columns_agree() {
    let cfg = parse_problem(&std::fs::read_to_string(config("fibonacci.cfg")).unwrap()).unwrap();
    let report = cmd_compare(&cfg).unwrap();
    let ro = report.column("ro_y1").unwrap();
    for name in ["product_sum", "const_minus", "const_plus", "vop"] {
        let other = report.column(name).unwrap();
        for i in 0..ro.len() {
            let scale = ro.get(i).abs().max(1.0);
            assert!((ro.get(i) - other.get(i)).abs() <= 1e-9 * scale, "{name} at {i}");
        }
    }
}

#[test]
fn verify_is_deterministic_and_json_is_stable() {
    let cfg = parse_problem(&std::fs::read_to_string(config("quantum.cfg")).unwrap()).unwrap();
    assert_eq!(cmd_verify(&cfg).unwrap(), cmd_verify(&cfg).unwrap());
    let a = cmd_solve(&cfg).unwrap().emit(Format::Json);
    let b = cmd_solve(&cfg).unwrap().emit(Format::Json);
    assert_eq!(a, b);
}
