use serde::Serialize;
use serde_json::Value;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

/// How a measured value is judged against its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `value ≤ tolerance`
    AtMost,
    /// `value < tolerance`
    Below,
    /// `|value − target| ≤ tolerance`
    Within,
    /// boolean check recorded as 1 (true) or 0 (false)
    Holds,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub name: String,
    pub value: f64,
    pub comparison: Comparison,
    pub target: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: bool,
}

impl Verdict {
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Verdict {
            name: name.into(),
            value,
            comparison: Comparison::AtMost,
            target: None,
            tolerance: Some(tolerance),
            pass: value <= tolerance,
        }
    }

    pub fn below(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Verdict {
            name: name.into(),
            value,
            comparison: Comparison::Below,
            target: None,
            tolerance: Some(tolerance),
            pass: value < tolerance,
        }
    }

    pub fn within(name: impl Into<String>, value: f64, target: f64, tolerance: f64) -> Self {
        Verdict {
            name: name.into(),
            value,
            comparison: Comparison::Within,
            target: Some(target),
            tolerance: Some(tolerance),
            pass: (value - target).abs() <= tolerance,
        }
    }

    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Verdict {
            name: name.into(),
            value: if ok { 1.0 } else { 0.0 },
            comparison: Comparison::Holds,
            target: None,
            tolerance: None,
            pass: ok,
        }
    }
}

/// Flat CSV projection of part of the results.
#[derive(Debug, Clone)]
pub struct Table {
    pub file: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(file: &str, header: &[&str]) -> Self {
        Table { file: file.to_string(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Number formatting shared by all tables (shortest round-trip form).
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

/// Canonical record of one run. Wall time lives in a sidecar so the report
/// itself is reproducible byte for byte.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub config: Value,
    pub results: Value,
    pub verdicts: Vec<Verdict>,
    pub error: Option<String>,
    pub passed: bool,
    #[serde(skip)]
    pub tables: Vec<Table>,
    #[serde(skip)]
    pub files: Vec<(String, Vec<u8>)>,
}

impl Report {
    pub fn new(config: Value) -> Self {
        Report { config, results: Value::Null, verdicts: Vec::new(), error: None, passed: false, tables: Vec::new(), files: Vec::new() }
    }

    pub fn verdict(&mut self, v: Verdict) {
        self.verdicts.push(v);
    }

    /// Records a module error as a failed verdict.
    pub fn fail_with(&mut self, stage: &str, err: impl std::fmt::Display) {
        self.error = Some(format!("{stage}: {err}"));
        self.verdicts.push(Verdict::holds(format!("{stage} completed"), false));
    }

    pub fn finish(&mut self) {
        self.passed = self.error.is_none() && !self.verdicts.is_empty() && self.verdicts.iter().all(|v| v.pass);
    }

    /// Writes `report.json`, every CSV table and extra artifact, plus
    /// `timing.json`. Returns the written paths.
    pub fn emit(&self, dir: &Path, wall_seconds: f64) -> io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let path = dir.join("report.json");
        let mut json = serde_json::to_vec_pretty(self).map_err(io::Error::other)?;
        json.push(b'\n');
        fs::write(&path, json)?;
        written.push(path);
        for t in &self.tables {
            let path = dir.join(&t.file);
            let mut w = csv::Writer::from_path(&path).map_err(io::Error::other)?;
            w.write_record(&t.header).map_err(io::Error::other)?;
            for r in &t.rows {
                w.write_record(r).map_err(io::Error::other)?;
            }
            w.flush()?;
            written.push(path);
        }
        for (name, bytes) in &self.files {
            let path = dir.join(name);
            fs::write(&path, bytes)?;
            written.push(path);
        }
        let timing = serde_json::json!({ "wall_seconds": wall_seconds });
        let path = dir.join("timing.json");
        fs::write(&path, serde_json::to_vec_pretty(&timing).map_err(io::Error::other)?)?;
        written.push(path);
        Ok(written)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts_name_their_tolerance() {
        let v = Verdict::within("slope", 1.9, 2.0, 0.2);
        assert!(v.pass && v.tolerance == Some(0.2) && v.target == Some(2.0));
        assert!(!Verdict::at_most("err", 2e-3, 1e-3).pass);
        assert!(!Verdict::below("rho", 1.0, 1.0).pass);
    }

    #[test]
    fn errors_fail_the_report() {
        let mut r = Report::new(Value::Null);
        r.verdict(Verdict::holds("fine", true));
        r.finish();
        assert!(r.passed);
        r.fail_with("solve", "diverged");
        r.finish();
        assert!(!r.passed);
        let empty = {
            let mut e = Report::new(Value::Null);
            e.finish();
            e
        };
        assert!(!empty.passed);
    }

    #[test]
    fn emit_writes_report_tables_and_timing() {
        let dir = tempfile::tempdir().unwrap();
        let mut r = Report::new(serde_json::json!({"kind": "demo"}));
        let mut t = Table::new("rows.csv", &["a", "b"]);
        t.push(vec![num(1.0), num(0.1)]);
        r.tables.push(t);
        r.verdict(Verdict::holds("ok", true));
        r.finish();
        let files = r.emit(dir.path(), 0.5).unwrap();
        assert_eq!(files.len(), 3);
        assert_eq!(fs::read_to_string(dir.path().join("rows.csv")).unwrap(), "a,b\n1.0,0.1\n");
        let json: Value = serde_json::from_slice(&fs::read(dir.path().join("report.json")).unwrap()).unwrap();
        assert_eq!(json["passed"], Value::Bool(true));
        assert!(json.get("tables").is_none());
    }
}
