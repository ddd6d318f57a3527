//! Report envelope shared by every subcommand: a versioned JSON object
//! or a fixed-header CSV, written to a file or stdout. Identical
//! (command, parameters, seed) inputs render byte-identical output.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// One verdict: an estimated (or exactly computed) quantity, the bound
/// or target it is held against, and a self-describing claim.
#[derive(Clone, Debug, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub params: String,
    pub estimate: f64,
    pub stderr: f64,
    pub bound: f64,
    pub pass: bool,
    pub claim: String,
}

pub const CSV_HEADER: &str = "name,params,estimate,stderr,bound,pass,claim";

#[derive(Serialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub seed: u64,
    pub params: BTreeMap<String, serde_json::Value>,
    pub rows: Vec<CheckRow>,
    pub all_pass: bool,
    /// Command-specific payload (JSON output only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<serde_json::Value>,
}

impl Report {
    pub fn new(command: &str, seed: u64) -> Self {
        Report {
            schema: 1,
            command: command.to_string(),
            seed,
            params: BTreeMap::new(),
            rows: Vec::new(),
            all_pass: true,
            detail: None,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        self.params.insert(
            key.to_string(),
            serde_json::to_value(value).expect("parameter serializes"),
        );
    }

    pub fn push(&mut self, row: CheckRow) {
        self.all_pass &= row.pass;
        self.rows.push(row);
    }

    pub fn failing(&self) -> Vec<&str> {
        self.rows
            .iter()
            .filter(|r| !r.pass)
            .map(|r| r.name.as_str())
            .collect()
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut s = String::from(CSV_HEADER);
                s.push('\n');
                for r in &self.rows {
                    s.push_str(&format!(
                        "{},{},{},{},{},{},{}\n",
                        csv_field(&r.name),
                        csv_field(&r.params),
                        r.estimate,
                        r.stderr,
                        r.bound,
                        r.pass,
                        csv_field(&r.claim)
                    ));
                }
                s
            }
        }
    }

    pub fn write(&self, format: Format, out: Option<&Path>) -> Result<()> {
        let text = self.render(format);
        match out {
            Some(path) => std::fs::write(path, text)
                .with_context(|| format!("writing report to {}", path.display()))?,
            None => std::io::stdout().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quoting_and_header() {
        let mut report = Report::new("demo", 3);
        report.push(CheckRow {
            name: "a".into(),
            params: "x=1, y=2".into(),
            estimate: 0.5,
            stderr: 0.0,
            bound: 1.0,
            pass: true,
            claim: "says \"hi\"".into(),
        });
        let csv = report.render(Format::Csv);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.next(), Some("a,\"x=1, y=2\",0.5,0,1,true,\"says \"\"hi\"\"\""));
    }

    #[test]
    fn failing_rows_flip_the_verdict() {
        let mut report = Report::new("demo", 0);
        assert!(report.all_pass);
        report.push(CheckRow {
            name: "bad".into(),
            params: String::new(),
            estimate: 2.0,
            stderr: 0.0,
            bound: 1.0,
            pass: false,
            claim: String::new(),
        });
        assert!(!report.all_pass);
        assert_eq!(report.failing(), vec!["bad"]);
        let json = report.render(Format::Json);
        assert!(json.contains("\"schema\": 1"));
        assert!(json.contains("\"all_pass\": false"));
    }
}
