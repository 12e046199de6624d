//! Rendering of result tables as aligned text, CSV or JSON.

use std::io::Write;
use std::str::FromStr;

use serde_json::{json, Map, Value};

use super::CliError;

pub const SCHEMA_VERSION: u32 = 1;

const MACHINE_DIGITS: usize = 12;
const HUMAN_DIGITS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Self as clap::ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<u32> for Cell {
    fn from(x: u32) -> Self {
        Cell::Int(i64::from(x))
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

/// `digits` significant digits in scientific notation.
pub fn sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{:.*e}", digits - 1, x)
}

impl Cell {
    fn text(&self, digits: usize) -> String {
        match self {
            Cell::Num(x) => sig(*x, digits),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            // Round through the 12-digit text so JSON and CSV agree.
            Cell::Num(x) => sig(*x, MACHINE_DIGITS)
                .parse::<f64>()
                .ok()
                .and_then(serde_json::Number::from_f64)
                .map_or(Value::Null, Value::Number),
            Cell::Int(i) => json!(i),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }
}

/// One command's output: metadata, column names and rows in input order.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub meta: Vec<(String, Cell)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn new(command: &str, columns: &[&str]) -> Self {
        Self {
            command: command.to_string(),
            meta: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(mut self, key: &str, value: impl Into<Cell>) -> Self {
        self.meta.push((key.to_string(), value.into()));
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn render(&self, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
        match format {
            Format::Table => self.render_table(out),
            Format::Csv => self.render_csv(out),
            Format::Json => self.render_json(out),
        }
        .map_err(|e| CliError::Io(e.to_string()))
    }

    fn render_table(&self, out: &mut dyn Write) -> std::io::Result<()> {
        for (k, v) in &self.meta {
            writeln!(out, "# {k}: {}", v.text(HUMAN_DIGITS))?;
        }
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|c| c.text(HUMAN_DIGITS)).collect())
            .collect();
        let mut widths: Vec<usize> = self.columns.iter().map(String::len).collect();
        for row in &cells {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.len());
            }
        }
        let line = |items: &[String]| {
            items
                .iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
        };
        writeln!(out, "{}", line(&self.columns))?;
        for row in &cells {
            writeln!(out, "{}", line(row))?;
        }
        Ok(())
    }

    fn render_csv(&self, out: &mut dyn Write) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.text(MACHINE_DIGITS)))?;
        }
        w.flush()
    }

    fn render_json(&self, out: &mut dyn Write) -> std::io::Result<()> {
        let mut meta = Map::new();
        meta.insert("schema_version".into(), json!(SCHEMA_VERSION));
        meta.insert("command".into(), json!(self.command));
        meta.insert("columns".into(), json!(self.columns));
        for (k, v) in &self.meta {
            meta.insert(k.clone(), v.json());
        }
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                Value::Object(
                    self.columns
                        .iter()
                        .cloned()
                        .zip(r.iter().map(Cell::json))
                        .collect(),
                )
            })
            .collect();
        let doc = json!({ "meta": meta, "rows": rows });
        serde_json::to_writer_pretty(&mut *out, &doc)?;
        writeln!(out)
    }
}
