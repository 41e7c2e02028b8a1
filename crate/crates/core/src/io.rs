//! Deterministic CSV/JSON output with parameter provenance.
//!
//! Floats are written with 17 significant digits, lines end in `\n`, and
//! provenance is emitted as `# key = value` header lines (CSV) or a
//! `metadata` object (JSON), both in key order.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::bifurcation::BifurcationCurve;
use crate::dynamics::{ManifoldTrace, PeriodicOrbit};
use crate::pendulum::PendulumCurve;

pub const FORMAT_VERSION: &str = "1";

/// Full-precision float: 17 significant digits, `inf`/`-inf`/`nan` otherwise.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Provenance {
    pub command: String,
    pub entries: BTreeMap<String, String>,
}

impl Provenance {
    pub fn new(command: impl Into<String>) -> Self {
        Self { command: command.into(), entries: BTreeMap::new() }
    }

    pub fn with(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.entries.insert(key.into(), value.to_string());
        self
    }

    pub fn with_f64(self, key: impl Into<String>, value: f64) -> Self {
        self.with(key, fmt_f64(value))
    }

    fn metadata(&self) -> BTreeMap<String, String> {
        let mut m = self.entries.clone();
        m.insert("command".into(), self.command.clone());
        m.insert("crate_version".into(), env!("CARGO_PKG_VERSION").into());
        m.insert("format_version".into(), FORMAT_VERSION.into());
        m
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self, prov: &Provenance) -> String {
        let mut out = String::new();
        for (k, v) in prov.metadata() {
            let _ = writeln!(out, "# {k} = {v}");
        }
        out.push_str(&self.header.join(","));
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.iter().map(|c| escape(c)).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }
}

fn escape(c: &str) -> String {
    if c.contains([',', '"', '\n']) {
        format!("\"{}\"", c.replace('"', "\"\""))
    } else {
        c.to_string()
    }
}

/// `{"metadata": …, "data": …}`, pretty-printed with a trailing newline.
pub fn render_json<T: Serialize>(prov: &Provenance, data: &T) -> serde_json::Result<String> {
    #[derive(Serialize)]
    struct Doc<'a, T> {
        metadata: BTreeMap<String, String>,
        data: &'a T,
    }
    let mut s = serde_json::to_string_pretty(&Doc { metadata: prov.metadata(), data })?;
    s.push('\n');
    Ok(s)
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

pub fn curves_table(curves: &[BifurcationCurve]) -> CsvTable {
    let mut t = CsvTable::new(&["kind", "slope", "nu1_sign", "m", "n", "family", "extremum"]);
    for c in curves {
        t.push(vec![
            c.kind.as_str().into(),
            fmt_f64(c.slope),
            c.nu1_sign.to_string(),
            opt(&c.label.m),
            opt(&c.label.n),
            opt(&c.label.family),
            c.label.extremum.map(|e| e.as_str().to_string()).unwrap_or_default(),
        ]);
    }
    t
}

pub fn pendulum_curves_table(curves: &[PendulumCurve]) -> CsvTable {
    let mut t = CsvTable::new(&["alpha", "gamma", "kind", "m", "n", "extremum", "proposition"]);
    for c in curves {
        for &(a, g) in &c.points {
            t.push(vec![
                fmt_f64(a),
                fmt_f64(g),
                c.kind.as_str().into(),
                opt(&c.m),
                opt(&c.n),
                c.extremum.map(|e| e.as_str().to_string()).unwrap_or_default(),
                c.proposition.as_str().into(),
            ]);
        }
    }
    t
}

/// Trajectory samples `(t, x)` as `t,x1,…,xn`.
pub fn trajectory_table(samples: &[(f64, Vec<f64>)], labels: &[&str]) -> CsvTable {
    let mut header = vec!["t"];
    header.extend_from_slice(labels);
    let mut t = CsvTable::new(&header);
    for (time, x) in samples {
        let mut row = vec![fmt_f64(*time)];
        row.extend(x.iter().map(|v| fmt_f64(*v)));
        t.push(row);
    }
    t
}

/// One row per periodic orbit: section state, stability and multipliers.
pub fn orbits_table(orbits: &[PeriodicOrbit], labels: &[&str]) -> CsvTable {
    let dim = labels.len();
    let mut header: Vec<String> = vec!["index".into(), "m".into(), "stability".into()];
    header.extend(labels.iter().map(|s| s.to_string()));
    for i in 0..dim {
        header.push(format!("mu{}_re", i + 1));
        header.push(format!("mu{}_im", i + 1));
    }
    header.push("residual".into());
    let mut t = CsvTable { header, rows: Vec::new() };
    for (i, o) in orbits.iter().enumerate() {
        let mut row = vec![i.to_string(), o.m.to_string(), o.stability.as_str().into()];
        row.extend(o.state.iter().map(|v| fmt_f64(*v)));
        for &(re, im) in &o.multipliers {
            row.push(fmt_f64(re));
            row.push(fmt_f64(im));
        }
        row.push(fmt_f64(o.residual));
        t.push(row);
    }
    t
}

pub fn manifold_table(traces: &[ManifoldTrace], labels: &[&str]) -> CsvTable {
    let mut header = vec!["branch", "index"];
    header.extend_from_slice(labels);
    let mut t = CsvTable::new(&header);
    for tr in traces {
        for (i, p) in tr.points.iter().enumerate() {
            let mut row = vec![tr.branch.as_str().to_string(), i.to_string()];
            row.extend(p.iter().map(|v| fmt_f64(*v)));
            t.push(row);
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-').replace('.', "");
            assert_eq!(mantissa.len(), 17);
        }
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
    }

    #[test]
    fn csv_has_sorted_header_and_lf() {
        let mut t = CsvTable::new(&["a", "b"]);
        t.push(vec!["1".into(), "x,y".into()]);
        let s = t.render(&Provenance::new("test").with("z", 1).with("a", 2));
        assert!(!s.contains('\r'));
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "# a = 2");
        assert_eq!(lines.last().unwrap(), &"1,\"x,y\"");
    }
}
