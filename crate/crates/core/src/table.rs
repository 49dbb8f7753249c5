//! Result tables and their CSV / JSON renderings.

use std::fmt::Write as _;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format '{other}' (expected csv or json)")),
        }
    }
}

/// One grid point. Quantities that need points past the end of the grid are `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub t: f64,
    pub y: f64,
    pub ydelta: Option<f64>,
    pub yd: f64,
    pub residual: Option<f64>,
    /// `||(y_h, y_h^Δ)||_2` of the homogeneous part, for `t >= t0`.
    pub norm: Option<f64>,
    pub envelope: Option<f64>,
    pub verdict: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub config_hash: String,
    pub version: String,
    pub method: String,
    pub c1: f64,
    pub c2: f64,
    pub reg_tol: f64,
    pub residual_tol: f64,
    /// Growth constant `k` of the envelope.
    pub k: f64,
    /// `max |y - y_step|` when the stepping oracle is on.
    pub oracle_max_dev: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultTable {
    pub metadata: Metadata,
    pub rows: Vec<Row>,
}

pub const CSV_HEADER: &str = "t,y,ydelta,yd,residual,norm,envelope,verdict";

/// 17 significant digits.
fn full(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(full).unwrap_or_default()
}

impl ResultTable {
    pub fn emit(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("table serializes");
                s.push('\n');
                s
            }
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(self.rows.len() * 160);
        s.push_str(CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            let verdict = match r.verdict {
                Some(true) => "pass",
                Some(false) => "fail",
                None => "",
            };
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{}",
                full(r.t),
                full(r.y),
                opt(r.ydelta),
                full(r.yd),
                opt(r.residual),
                opt(r.norm),
                opt(r.envelope),
                verdict
            );
        }
        s
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.verdict != Some(false))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> ResultTable {
        ResultTable {
            metadata: Metadata {
                config_hash: "00".into(),
                version: "0".into(),
                method: "m".into(),
                c1: 0.1,
                c2: -2.0,
                reg_tol: 1e-12,
                residual_tol: 1e-9,
                k: 1.0,
                oracle_max_dev: None,
            },
            rows: vec![
                Row {
                    t: 0.0,
                    y: 0.1,
                    ydelta: Some(1.0 / 3.0),
                    yd: 0.0,
                    residual: Some(0.0),
                    norm: Some(1.0),
                    envelope: Some(1.0),
                    verdict: Some(true),
                },
                Row {
                    t: 1.0,
                    y: 2.0,
                    ydelta: None,
                    yd: 0.0,
                    residual: None,
                    norm: None,
                    envelope: None,
                    verdict: None,
                },
            ],
        }
    }

    #[test]
    fn csv_round_trips_values() {
        let csv = table().to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first[1].parse::<f64>().unwrap(), 0.1);
        assert_eq!(first[2].parse::<f64>().unwrap(), 1.0 / 3.0);
        assert_eq!(first[7], "pass");
        assert_eq!(lines.next().unwrap(), "1.0000000000000000e0,2.0000000000000000e0,,0.0000000000000000e0,,,,");
    }

    #[test]
    fn json_nulls_and_metadata() {
        let v: serde_json::Value = serde_json::from_str(&table().emit(Format::Json)).unwrap();
        assert!(v["rows"][1]["residual"].is_null());
        assert_eq!(v["metadata"]["c2"], -2.0);
        assert_eq!(v["rows"][0]["ydelta"].as_f64().unwrap(), 1.0 / 3.0);
    }
}
