//! Tabular output as RFC 4180 CSV or a single JSON object.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use serde_json::{json, Map, Value};

#[derive(Debug, Clone)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Missing,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Missing, Into::into)
    }
}

/// Fixed notation with `precision` decimals; magnitudes below `1e-4` switch
/// to scientific notation so residuals stay visible.
pub fn format_float(v: f64, precision: usize) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let s = if v != 0.0 && v.abs() < 1e-4 {
        format!("{:.*e}", precision.saturating_sub(1), v)
    } else {
        format!("{v:.precision$}")
    };
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub struct OutputSpec<'a> {
    pub format: Format,
    pub path: Option<&'a Path>,
    pub precision: usize,
}

fn cell_text(c: &Cell, precision: usize) -> String {
    match c {
        Cell::Float(v) => format_float(*v, precision),
        Cell::Int(v) => v.to_string(),
        Cell::Text(s) => s.clone(),
        Cell::Bool(b) => b.to_string(),
        Cell::Missing => String::new(),
    }
}

fn cell_json(c: &Cell, precision: usize) -> Value {
    match c {
        // Round-trip through the printed form so CSV and JSON agree.
        Cell::Float(v) if v.is_finite() => format_float(*v, precision)
            .parse::<f64>()
            .ok()
            .and_then(serde_json::Number::from_f64)
            .map_or(Value::Null, Value::Number),
        Cell::Float(_) | Cell::Missing => Value::Null,
        Cell::Int(v) => json!(v),
        Cell::Text(s) => json!(s),
        Cell::Bool(b) => json!(b),
    }
}

pub fn render(table: &Table, spec: &OutputSpec, command: &str, parameters: Map<String, Value>) -> io::Result<Vec<u8>> {
    match spec.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&table.columns)?;
            for row in &table.rows {
                w.write_record(row.iter().map(|c| cell_text(c, spec.precision)))?;
            }
            w.into_inner().map_err(|e| e.into_error())
        }
        Format::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = table
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(k, c)| (k.to_string(), cell_json(c, spec.precision)))
                        .collect();
                    Value::Object(obj)
                })
                .collect();
            let doc = json!({
                "meta": {
                    "command": command,
                    "version": env!("CARGO_PKG_VERSION"),
                    "parameters": parameters,
                },
                "rows": rows,
            });
            let mut out = serde_json::to_vec_pretty(&doc)?;
            out.push(b'\n');
            Ok(out)
        }
    }
}

pub fn emit(bytes: &[u8], path: Option<&Path>) -> io::Result<()> {
    match path {
        Some(p) => File::create(p)?.write_all(bytes),
        None => io::stdout().lock().write_all(bytes),
    }
}
