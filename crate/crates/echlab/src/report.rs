//! Report bundles: named tables, verdicts, plots and the run manifest.
//!
//! CSV uses '.' as the decimal mark, shortest round-trip float formatting,
//! a fixed column order and a trailing newline. Non-finite values are written
//! as `inf`, `-inf` or `nan` in both CSV and JSON.

use std::fmt::Write as _;
use std::path::Path;

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;
use serde_json::Value as Json;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
    Bool(bool),
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}
impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}
impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}
impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}
impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}
impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}
impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x}")
    }
}

pub fn num_json(x: f64) -> Json {
    if x.is_finite() {
        serde_json::Number::from_f64(x).map(Json::Number).unwrap_or(Json::Null)
    } else {
        Json::String(fmt_f64(x))
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => fmt_f64(*v),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(v) => Some(*v as f64),
            Cell::Num(v) => Some(*v),
            _ => None,
        }
    }

    fn json(&self) -> Json {
        match self {
            Cell::Int(v) => Json::from(*v),
            Cell::Num(v) => num_json(*v),
            Cell::Bool(v) => Json::Bool(*v),
            Cell::Text(s) => Json::String(s.clone()),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.json().serialize(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width for table {}", self.name);
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub margin: Option<f64>,
    pub detail: String,
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(4))?;
        m.serialize_entry("name", &self.name)?;
        m.serialize_entry("pass", &self.pass)?;
        m.serialize_entry("margin", &self.margin.map(num_json))?;
        m.serialize_entry("detail", &self.detail)?;
        m.end()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Calibration {
    pub kappa: f64,
    pub reference_action: f64,
    pub offset_per_height: f64,
    pub epsilon: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub manifest_version: u32,
    pub command: String,
    pub args: Vec<String>,
    pub seed: u64,
    pub tol: Option<f64>,
    pub cap: Option<usize>,
    pub calibration: Calibration,
    pub rationality_tol: f64,
    pub rationality_max_den: i64,
    pub complex_degree_max: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Plot {
    pub name: String,
    pub svg: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Bundle {
    pub manifest: Manifest,
    pub data: Json,
    pub tables: Vec<Table>,
    pub verdicts: Vec<Verdict>,
    #[serde(skip)]
    pub plots: Vec<Plot>,
}

impl Bundle {
    pub fn new(manifest: Manifest) -> Self {
        Bundle { manifest, data: Json::Null, tables: Vec::new(), verdicts: Vec::new(), plots: Vec::new() }
    }

    pub fn verdict(&mut self, name: &str, pass: bool, margin: Option<f64>, detail: impl Into<String>) {
        self.verdicts.push(Verdict { name: name.into(), pass, margin, detail: detail.into() });
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("bundle serializes");
        s.push('\n');
        s
    }

    /// Every table in order, each preceded by a `# name` line.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (i, t) in self.tables.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            let _ = writeln!(out, "# {}", t.name);
            out.push_str(&t.to_csv());
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for v in &self.verdicts {
            let margin = v.margin.map(|m| format!(" margin={}", fmt_f64(m))).unwrap_or_default();
            let _ = writeln!(out, "{} {}{} {}", if v.pass { "PASS" } else { "FAIL" }, v.name, margin, v.detail);
        }
        out
    }

    /// Writes bundle.json, manifest.json, one CSV per table and one SVG per plot.
    pub fn write_dir(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("bundle.json"), self.to_json())?;
        let mut m = serde_json::to_string_pretty(&self.manifest).expect("manifest serializes");
        m.push('\n');
        std::fs::write(dir.join("manifest.json"), m)?;
        for t in &self.tables {
            std::fs::write(dir.join(format!("{}.csv", t.name)), t.to_csv())?;
        }
        for p in &self.plots {
            std::fs::write(dir.join(format!("{}.svg", p.name)), &p.svg)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_conventions() {
        let mut t = Table::new("t", &["k", "c", "note"]);
        t.push(vec![1u64.into(), 0.1.into(), "a,b".into()]);
        t.push(vec![2u64.into(), f64::INFINITY.into(), "x".into()]);
        assert_eq!(t.to_csv(), "k,c,note\n1,0.1,\"a,b\"\n2,inf,x\n");
    }
}
