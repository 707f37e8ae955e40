//! Machine-readable result tables. CSV uses a header row, '.' decimals, and
//! 17-significant-digit floats so every value round-trips losslessly; JSON
//! mirrors the same rows as an array of objects. Files are written to a
//! temporary sibling and renamed into place.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::config::OutputFormat;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Bool(bool),
    /// Optional value: empty CSV field, JSON null.
    OptFloat(Option<f64>),
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: vec![],
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

fn float_repr(x: f64) -> String {
    format!("{x:.16e}")
}

fn cell_csv(cell: &Cell) -> String {
    match cell {
        Cell::Int(v) => v.to_string(),
        Cell::Float(v) => float_repr(*v),
        Cell::Bool(v) => v.to_string(),
        Cell::OptFloat(Some(v)) => float_repr(*v),
        Cell::OptFloat(None) => String::new(),
    }
}

fn cell_json(cell: &Cell) -> Value {
    match cell {
        Cell::Int(v) => json!(v),
        Cell::Float(v) => json!(v),
        Cell::Bool(v) => json!(v),
        Cell::OptFloat(Some(v)) => json!(v),
        Cell::OptFloat(None) => Value::Null,
    }
}

pub fn render(table: &Table, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => {
            let mut text = table.columns.join(",");
            text.push('\n');
            for row in &table.rows {
                let line: Vec<String> = row.iter().map(cell_csv).collect();
                text.push_str(&line.join(","));
                text.push('\n');
            }
            text
        }
        OutputFormat::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|row| {
                    let mut obj = Map::new();
                    for (name, cell) in table.columns.iter().zip(row) {
                        obj.insert((*name).to_string(), cell_json(cell));
                    }
                    Value::Object(obj)
                })
                .collect();
            let mut text = serde_json::to_string_pretty(&Value::Array(rows)).expect("finite cells");
            text.push('\n');
            text
        }
    }
}

pub fn extension(format: OutputFormat) -> &'static str {
    match format {
        OutputFormat::Csv => "csv",
        OutputFormat::Json => "json",
    }
}

/// Writes through a temporary file and renames, so outputs appear atomically.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(|e| CliError::io(format!("creating {}: {e}", parent.display())))?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents)
        .map_err(|e| CliError::io(format!("writing {}: {e}", tmp.display())))?;
    fs::rename(&tmp, path)
        .map_err(|e| CliError::io(format!("renaming onto {}: {e}", path.display())))?;
    Ok(())
}

/// Writes `<out>.manifest.json` carrying the effective config, seed, and
/// library version, which is everything needed to reproduce the output.
pub fn write_manifest(out: &Path, command: &str, config: Value, seed: u64) -> Result<(), CliError> {
    let manifest = json!({
        "command": command,
        "config": config,
        "seed": seed,
        "version": env!("CARGO_PKG_VERSION"),
    });
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest is finite");
    text.push('\n');
    let mut path = out.as_os_str().to_owned();
    path.push(".manifest.json");
    write_atomic(&PathBuf::from(path), &text)
}
