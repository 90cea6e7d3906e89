//! CSV tables and the run summary.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

/// A CSV artifact. Cells are preformatted so that the header is written even
/// when there are no rows.
#[derive(Debug, Clone)]
pub struct Table {
    pub name: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &'static str, header: &[&'static str]) -> Self {
        Table { name, header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf, CliError> {
        let path = dir.join(format!("{}.csv", self.name));
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(&path).map_err(|e| CliError::io(&path, e))?;
        w.write_record(&self.header).map_err(|e| CliError::io(&path, e))?;
        for row in &self.rows {
            w.write_record(row).map_err(|e| CliError::io(&path, e))?;
        }
        w.flush().map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}

/// Shortest round-trip decimal; infinities and NaN spelled out.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:?}")
    }
}

pub fn int<T: std::fmt::Display>(x: T) -> String {
    x.to_string()
}

pub fn opt<T: std::fmt::Display>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn flag(b: bool) -> String {
    if b { "true" } else { "false" }.into()
}

#[derive(Debug, Serialize)]
pub struct Summary<'a> {
    pub experiment: &'a str,
    pub version: &'a str,
    pub core_version: &'a str,
    pub seed: u64,
    pub workers: usize,
    /// "ok" or "partial"
    pub status: &'a str,
    pub config: serde_json::Value,
    pub artifacts: Vec<String>,
    pub results: serde_json::Value,
    pub wall_time_secs: f64,
}

pub fn write_summary(dir: &Path, summary: &Summary) -> Result<PathBuf, CliError> {
    let path = dir.join("summary.json");
    let mut text = serde_json::to_string_pretty(summary).map_err(|e| CliError::Internal(e.to_string()))?;
    text.push('\n');
    fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}
