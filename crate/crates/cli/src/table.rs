//! Tabular output in CSV or JSON.
//!
//! Numbers are written with six decimals in CSV and at full precision in
//! JSON. Undefined values become empty CSV cells or JSON `null`.

use std::io::Write;

use serde_json::{Map, Value};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(Option<f64>),
    Int(i64),
    Text(Option<String>),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(Some(v)) if v.is_finite() => format!("{v:.6}"),
            Cell::Num(_) | Cell::Text(None) => String::new(),
            Cell::Int(v) => v.to_string(),
            Cell::Text(Some(s)) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => v
                .and_then(serde_json::Number::from_f64)
                .map_or(Value::Null, Value::Number),
            Cell::Int(v) => Value::from(*v),
            Cell::Text(s) => s.clone().map_or(Value::Null, Value::String),
            Cell::Bool(b) => Value::Bool(*b),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(Some(v))
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
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

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(Some(v.to_string()))
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(Some(v))
    }
}

impl From<Option<String>> for Cell {
    fn from(v: Option<String>) -> Self {
        Cell::Text(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(name: &str, columns: impl IntoIterator<Item = S>) -> Self {
        Table {
            name: name.to_string(),
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width for {}", self.name);
        self.rows.push(row);
    }

    fn json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .columns
                        .iter()
                        .cloned()
                        .zip(row.iter().map(Cell::json))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }

    fn write_csv<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns).map_err(io_error)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))
                .map_err(io_error)?;
        }
        w.flush().map_err(|e| CliError::Io(e.to_string()))
    }
}

fn io_error(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}

/// A single table: a JSON array of row objects, or CSV with a header row.
pub fn write_table<W: Write>(table: &Table, format: Format, mut out: W) -> Result<(), CliError> {
    match format {
        Format::Csv => table.write_csv(out),
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &table.json())
                .map_err(|e| CliError::Io(e.to_string()))?;
            out.write_all(b"\n")
                .map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

/// Several named tables: a JSON object keyed by table name, or CSV blocks
/// each introduced by a `# table: <name>` line and separated by a blank line.
pub fn write_tables<W: Write>(
    tables: &[Table],
    format: Format,
    mut out: W,
) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    match format {
        Format::Json => {
            let doc: Map<String, Value> =
                tables.iter().map(|t| (t.name.clone(), t.json())).collect();
            serde_json::to_writer_pretty(&mut out, &doc)
                .map_err(|e| CliError::Io(e.to_string()))?;
            out.write_all(b"\n").map_err(io)
        }
        Format::Csv => {
            for (i, table) in tables.iter().enumerate() {
                if i > 0 {
                    out.write_all(b"\n").map_err(io)?;
                }
                writeln!(out, "# table: {}", table.name).map_err(io)?;
                table.write_csv(&mut out)?;
            }
            Ok(())
        }
    }
}
