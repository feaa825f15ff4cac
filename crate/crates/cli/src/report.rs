//! The structured report emitted by every command.
//!
//! A report is a key-ordered document: inputs and results are sorted maps,
//! so the serialized bytes are stable for fixed flags and seed (only the
//! timestamp varies between runs). The JSON form round-trips through
//! [`ReportDocument::from_json`].

use std::collections::BTreeMap;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub command: String,
    pub version: String,
    pub seed: u64,
    /// seconds since the Unix epoch; excluded from document comparisons
    pub timestamp: u64,
    pub inputs: BTreeMap<String, String>,
    pub results: BTreeMap<String, Value>,
    pub warnings: Vec<String>,
}

impl ReportDocument {
    pub fn new(command: impl Into<String>, seed: u64) -> Self {
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            seed,
            timestamp,
            inputs: BTreeMap::new(),
            results: BTreeMap::new(),
            warnings: Vec::new(),
        }
    }

    pub fn input(&mut self, key: impl Into<String>, value: impl ToString) {
        self.inputs.insert(key.into(), value.to_string());
    }

    pub fn result_num(&mut self, key: impl Into<String>, value: f64) {
        // JSON has no NaN/inf literals; fall back to strings there
        let v = serde_json::Number::from_f64(value)
            .map(Value::Number)
            .unwrap_or_else(|| Value::String(value.to_string()));
        self.results.insert(key.into(), v);
    }

    pub fn result_str(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.results.insert(key.into(), Value::String(value.into()));
    }

    pub fn result_bool(&mut self, key: impl Into<String>, value: bool) {
        self.results.insert(key.into(), Value::Bool(value));
    }

    pub fn result_value(&mut self, key: impl Into<String>, value: Value) {
        self.results.insert(key.into(), value);
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        self.warnings.push(message.into());
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("command: {}\n", self.command));
        out.push_str(&format!("version: {}\n", self.version));
        out.push_str(&format!("seed: {}\n", self.seed));
        out.push_str(&format!("timestamp: {}\n", self.timestamp));
        if !self.inputs.is_empty() {
            out.push_str("[inputs]\n");
            for (k, v) in &self.inputs {
                out.push_str(&format!("  {k}: {v}\n"));
            }
        }
        if !self.results.is_empty() {
            out.push_str("[results]\n");
            for (k, v) in &self.results {
                out.push_str(&format!("  {k}: {}\n", render_value(v)));
            }
        }
        if !self.warnings.is_empty() {
            out.push_str("[warnings]\n");
            for w in &self.warnings {
                out.push_str(&format!("  - {w}\n"));
            }
        }
        out
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => self.to_json(),
            OutputFormat::Table => self.to_table(),
        }
    }

    /// Equality ignoring the timestamp field.
    pub fn equals_modulo_timestamp(&self, other: &Self) -> bool {
        let mut a = self.clone();
        let mut b = other.clone();
        a.timestamp = 0;
        b.timestamp = 0;
        a == b
    }
}

fn render_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Table,
    Json,
}
