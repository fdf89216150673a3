use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::SuiteResult;
use crate::{Error, Result};

/// Version tag carried by every document.
pub const SCHEMA: &str = "ymgap-report/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub schema: String,
    pub command: String,
    /// Effective configuration after defaults and flags were applied.
    pub config: serde_json::Value,
    /// Command-specific payload.
    pub results: serde_json::Value,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub suites: Vec<SuiteResult>,
    pub passed: bool,
}

impl Document {
    pub fn new(command: &str, config: serde_json::Value, results: serde_json::Value) -> Self {
        Self {
            schema: SCHEMA.to_string(),
            command: command.to_string(),
            config,
            results,
            suites: Vec::new(),
            passed: true,
        }
    }

    pub fn with_suites(mut self, suites: Vec<SuiteResult>) -> Self {
        self.passed = self.passed && suites.iter().all(|s| s.passed);
        self.suites = suites;
        self
    }

    pub fn strip_timings(&mut self) {
        for s in &mut self.suites {
            s.runtime_seconds = None;
            s.checks.retain(|c| !c.timing);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            other => Err(Error::Config(format!("unknown format '{other}' (json, csv, text)"))),
        }
    }
}

pub fn render(doc: &Document, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(doc)? + "\n"),
        Format::Csv => render_csv(doc),
        Format::Text => Ok(render_text(doc)),
    }
}

/// Flattens the results into `key,value` rows, followed by one row per check.
fn render_csv(doc: &Document) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["section", "name", "value", "target", "tolerance", "passed"])?;
    let mut flat = Vec::new();
    flatten("", &doc.results, &mut flat);
    for (k, v) in flat {
        w.write_record(["result", &k, &v, "", "", ""])?;
    }
    for s in &doc.suites {
        for c in &s.checks {
            w.write_record([
                s.suite.as_str(),
                &c.name,
                &c.value.to_string(),
                &c.target.map(|t| t.to_string()).unwrap_or_default(),
                &c.tolerance.to_string(),
                &c.passed.to_string(),
            ])?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv writer emits utf-8"))
}

fn flatten(prefix: &str, v: &serde_json::Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        serde_json::Value::Object(m) => m.iter().for_each(|(k, v)| flatten(&key(k), v, out)),
        serde_json::Value::Array(a) => a.iter().enumerate().for_each(|(i, v)| flatten(&key(&i.to_string()), v, out)),
        serde_json::Value::String(s) => out.push((prefix.to_string(), s.clone())),
        serde_json::Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn render_text(doc: &Document) -> String {
    let mut out = String::new();
    let mut flat = Vec::new();
    flatten("", &doc.results, &mut flat);
    for (k, v) in flat {
        let _ = writeln!(out, "{k:<40} {v}");
    }
    for s in &doc.suites {
        let status = if s.passed { "PASS" } else { "FAIL" };
        match s.runtime_seconds {
            Some(t) => {
                let _ = writeln!(out, "{status} {} ({t:.2} s)", s.suite);
            }
            None => {
                let _ = writeln!(out, "{status} {}", s.suite);
            }
        }
        for c in s.checks.iter().filter(|c| !c.passed) {
            let _ = match c.target {
                Some(t) => writeln!(out, "    {}: {:e} vs {:e} (tol {:e})", c.name, c.value, t, c.tolerance),
                None => writeln!(out, "    {}: {:e} (bound {:e})", c.name, c.value, c.tolerance),
            };
        }
    }
    let _ = writeln!(out, "{}", if doc.passed { "overall: PASS" } else { "overall: FAIL" });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn doc() -> Document {
        Document::new("energy", json!({"seed": 1}), json!({"energy": 157.9, "parts": [1.0, 2.0]}))
    }

    #[test]
    fn json_round_trips() {
        let d = doc();
        let back: Document = serde_json::from_str(&render(&d, Format::Json).unwrap()).unwrap();
        assert_eq!(back, d);
        assert_eq!(back.schema, SCHEMA);
    }

    #[test]
    fn csv_flattens_nested_results() {
        let s = render(&doc(), Format::Csv).unwrap();
        assert!(s.contains("result,parts.1,2.0"));
        assert!(s.starts_with("section,name"));
    }

    #[test]
    fn formats_parse() {
        assert_eq!("text".parse::<Format>().unwrap(), Format::Text);
        assert!("yaml".parse::<Format>().is_err());
    }
}
