//! Residual/tolerance records and their deterministic JSON form.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Residual reported for cases whose computation failed or was non-finite.
pub const FAILED_RESIDUAL: f64 = f64::MAX;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub metadata: BTreeMap<String, Value>,
}

impl Case {
    /// `pass ⇔ residual ≤ tolerance`; non-finite residuals fail.
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        let mut metadata = BTreeMap::new();
        let residual = if residual.is_finite() {
            residual
        } else {
            metadata.insert("non_finite".into(), Value::String(format!("{residual}")));
            FAILED_RESIDUAL
        };
        Case { name: name.into(), residual, tolerance, pass: residual <= tolerance, metadata }
    }

    /// A case whose computation raised an error; the run continues.
    pub fn failed(name: impl Into<String>, tolerance: f64, err: &Error) -> Self {
        Case::new(name, FAILED_RESIDUAL, tolerance).with("error", err.to_string())
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.metadata.insert(key.to_string(), value.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub version: String,
    pub params: BTreeMap<String, Value>,
    pub cases: Vec<Case>,
}

impl Report {
    pub fn new(suite: impl Into<String>) -> Self {
        Report { suite: suite.into(), version: VERSION.to_string(), params: BTreeMap::new(), cases: Vec::new() }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn push(&mut self, case: Case) {
        self.cases.push(case);
    }

    pub fn extend(&mut self, cases: impl IntoIterator<Item = Case>) {
        self.cases.extend(cases);
    }

    /// Sorts cases by name (stable, so equal names keep insertion order).
    pub fn finalize(mut self) -> Self {
        self.cases.sort_by(|a, b| a.name.cmp(&b.name));
        self
    }

    pub fn all_pass(&self) -> bool {
        self.cases.iter().all(|c| c.pass)
    }

    pub fn case(&self, name: &str) -> Option<&Case> {
        self.cases.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> Vec<&Case> {
        self.cases.iter().filter(|c| !c.pass).collect()
    }

    /// Deterministic JSON: sorted keys, two-space indentation, floats with
    /// 17 significant digits.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("report is serializable");
        let mut out = String::new();
        write_value(&mut out, &value, 0);
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Report> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("malformed report: {e}")))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

/// Writes `report` to `path` (stdout when `None`).
pub fn emit_report(report: &Report, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => report.write(p),
        None => {
            print!("{}", report.to_json());
            Ok(())
        }
    }
}

fn format_f64(x: f64) -> String {
    if x == 0.0 {
        return "0.0000000000000000e0".to_string();
    }
    format!("{x:.16e}")
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&format_f64(n.as_f64().expect("f64")));
            } else {
                let _ = write!(out, "{n}");
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string")),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(out, item, indent + 1);
                if k + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (k, key) in keys.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&serde_json::to_string(key).expect("key"));
                out.push_str(": ");
                write_value(out, &map[*key], indent + 1);
                if k + 1 < keys.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}
