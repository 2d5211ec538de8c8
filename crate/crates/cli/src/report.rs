//! Run reports and their JSON and CSV renderings.

use std::io::Write;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::manifest::{Format, Manifest, Operation};

/// One check or measurement.
#[derive(Debug, Clone, Serialize)]
pub struct Record {
    pub name: String,
    /// The identity or formula the record refers to.
    pub anchor: String,
    pub values: Map<String, Value>,
    pub tolerance: Option<f64>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Record {
    pub fn new(name: impl Into<String>, anchor: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            anchor: anchor.into(),
            values: Map::new(),
            tolerance: None,
            pass: true,
            error: None,
        }
    }

    pub fn value(mut self, key: &str, v: impl Serialize) -> Self {
        self.values.insert(
            key.to_string(),
            serde_json::to_value(v).unwrap_or(Value::Null),
        );
        self
    }

    /// Copies every field of a serializable summary except the ones the
    /// record already carries.
    pub fn values_from(mut self, summary: &impl Serialize) -> Self {
        if let Ok(Value::Object(map)) = serde_json::to_value(summary) {
            for (k, v) in map {
                if !matches!(k.as_str(), "name" | "anchor" | "tolerance" | "pass") {
                    self.values.insert(k, v);
                }
            }
        }
        self
    }

    pub fn check(mut self, tolerance: f64, pass: bool) -> Self {
        self.tolerance = Some(tolerance);
        self.pass = pass;
        self
    }

    /// A check that could not be evaluated.
    pub fn failed(
        name: impl Into<String>,
        anchor: impl Into<String>,
        error: impl ToString,
    ) -> Self {
        Self {
            pass: false,
            error: Some(error.to_string()),
            ..Self::new(name, anchor)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub elapsed_seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub operation: Operation,
    pub seed: u64,
    pub manifest: Manifest,
    pub records: Vec<Record>,
    pub all_pass: bool,
    /// Some check hit a numerical breakdown rather than a tolerance miss.
    pub numerical_failure: bool,
    pub timing: Timing,
}

impl RunReport {
    pub fn new(manifest: Manifest, records: Vec<Record>, elapsed_seconds: f64) -> Self {
        Self {
            tool: "gbc",
            version: env!("CARGO_PKG_VERSION"),
            operation: manifest.operation,
            seed: manifest.seed(),
            all_pass: !records.is_empty() && records.iter().all(|r| r.pass),
            numerical_failure: records.iter().any(|r| r.error.is_some()),
            manifest,
            records,
            timing: Timing { elapsed_seconds },
        }
    }

    /// 0 all-pass, 1 some check failed, 3 numerical breakdown.
    pub fn exit_code(&self) -> i32 {
        if self.numerical_failure {
            3
        } else if self.all_pass {
            0
        } else {
            1
        }
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, self)?;
                writeln!(out)
            }
            Format::Csv => self.write_csv(out),
        }
    }

    /// One row per record value: `record, anchor, key, value, tolerance, pass, error`.
    fn write_csv(&self, out: &mut dyn Write) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "record",
            "anchor",
            "key",
            "value",
            "tolerance",
            "pass",
            "error",
        ])?;
        for r in &self.records {
            let tol = r.tolerance.map(|t| t.to_string()).unwrap_or_default();
            let pass = r.pass.to_string();
            let err = r.error.clone().unwrap_or_default();
            let rows: Vec<(String, String)> = if r.values.is_empty() {
                vec![(String::new(), String::new())]
            } else {
                r.values
                    .iter()
                    .map(|(k, v)| {
                        let text = match v {
                            Value::String(s) => s.clone(),
                            other => other.to_string(),
                        };
                        (k.clone(), text)
                    })
                    .collect()
            };
            for (k, v) in rows {
                w.write_record([&r.name, &r.anchor, &k, &v, &tol, &pass, &err])?;
            }
        }
        w.flush()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunReport {
        let records = vec![
            Record::new("a", "x = y")
                .value("n", 3)
                .value("residual", 1e-12)
                .check(1e-10, true),
            Record::new("b", "z = 0").check(1.0, false),
        ];
        RunReport::new(Manifest::new(Operation::VerifyIdentities), records, 0.5)
    }

    #[test]
    fn exit_codes() {
        assert_eq!(sample().exit_code(), 1);
        let ok = RunReport::new(
            Manifest::new(Operation::Einstein),
            vec![Record::new("a", "b")],
            0.0,
        );
        assert_eq!(ok.exit_code(), 0);
        let broken = RunReport::new(
            Manifest::new(Operation::Einstein),
            vec![Record::failed("a", "b", "boom")],
            0.0,
        );
        assert_eq!(broken.exit_code(), 3);
    }

    #[test]
    fn csv_has_one_row_per_value() {
        let mut buf = Vec::new();
        sample().write(Format::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("a,x = y,n,3,"));
    }

    #[test]
    fn json_field_order_is_stable() {
        let mut buf = Vec::new();
        sample().write(Format::Json, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let tool = text.find("\"tool\"").unwrap();
        let records = text.find("\"records\"").unwrap();
        let timing = text.find("\"timing\"").unwrap();
        assert!(tool < records && records < timing);
    }
}
