use std::fmt::Write as _;

use clap::ValueEnum;
use serde_json::{json, Value};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Everything a command produces, in all three renderings.
pub struct Output {
    pub command: &'static str,
    pub inputs: Value,
    pub results: Value,
    pub text: String,
    /// Header row first.
    pub csv: Vec<Vec<String>>,
    pub exit_code: u8,
}

impl Output {
    pub fn render(&self, format: Format) -> Result<String, String> {
        match format {
            Format::Json => Ok(to_json(&json!({
                "schema_version": SCHEMA_VERSION,
                "command": self.command,
                "inputs": self.inputs,
                "results": self.results,
            }))),
            Format::Csv => to_csv(&self.csv),
            Format::Text => Ok(self.text.clone()),
        }
    }
}

/// Pretty JSON with sorted keys and a trailing newline. Re-parsing and
/// re-emitting the result is byte-identical.
pub fn to_json(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("Value always serializes");
    s.push('\n');
    s
}

fn to_csv(rows: &[Vec<String>]) -> Result<String, String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.write_record(row).map_err(|e| e.to_string())?;
    }
    let bytes = w.into_inner().map_err(|e| e.to_string())?;
    String::from_utf8(bytes).map_err(|e| e.to_string())
}

/// `{0, 2}`
pub fn set_text(values: &[u64]) -> String {
    let inner: Vec<String> = values.iter().map(u64::to_string).collect();
    format!("{{{}}}", inner.join(", "))
}

/// `0|2` for CSV cells.
pub fn set_cell(values: &[u64]) -> String {
    values
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join("|")
}

pub fn list_text(values: &[u64]) -> String {
    let mut s = String::new();
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{v}");
    }
    s
}
