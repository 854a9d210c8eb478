//! Tabular results and their CSV / JSON rendering.

use std::fmt;

use clap::ValueEnum;
use serde_json::{json, Map, Value as Json};

use crate::number::{format_number, round_significant, SIGNIFICANT_DIGITS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// One table cell. `Missing` marks a value that is undefined at that grid point.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    Missing,
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Int(n) => Some(*n as f64),
            _ => None,
        }
    }

    fn to_json(&self) -> Json {
        match self {
            Cell::Num(x) if x.is_finite() => json!(round_significant(*x)),
            Cell::Num(x) => Json::String(format_number(*x)),
            Cell::Int(n) => json!(n),
            Cell::Bool(b) => json!(b),
            Cell::Text(s) => json!(s),
            Cell::Missing => Json::Null,
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Num(x) => f.write_str(&format_number(*x)),
            Cell::Int(n) => write!(f, "{n}"),
            Cell::Bool(b) => write!(f, "{b}"),
            Cell::Text(s) => f.write_str(s),
            Cell::Missing => Ok(()),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as u64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Missing, Into::into)
    }
}

/// Rows in grid order plus the metadata needed to reproduce them.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    command: String,
    parameters: Vec<(String, String)>,
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl SweepResult {
    pub fn new(command: &str, columns: &[&str]) -> Self {
        Self {
            command: command.to_owned(),
            parameters: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn parameter(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.push((key.to_owned(), value.to_string()));
        self
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn command(&self) -> &str {
        &self.command
    }

    pub fn parameters(&self) -> &[(String, String)] {
        &self.parameters
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    /// Cells of the named column, top to bottom.
    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    fn metadata_pairs(&self) -> Vec<(String, String)> {
        let mut out = vec![
            ("command".to_owned(), self.command.clone()),
            ("version".to_owned(), env!("CARGO_PKG_VERSION").to_owned()),
            ("significant_digits".to_owned(), SIGNIFICANT_DIGITS.to_string()),
            ("sum_tolerance".to_owned(), format_number(hetlab::SUM_TOLERANCE)),
        ];
        out.extend(self.parameters.iter().cloned());
        out
    }

    pub fn to_csv(&self) -> String {
        let mut text = String::new();
        for (k, v) in self.metadata_pairs() {
            text.push_str(&format!("# {k}: {v}\n"));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.to_string()))
                .expect("in-memory write");
        }
        let body = w.into_inner().expect("in-memory flush");
        text.push_str(std::str::from_utf8(&body).expect("utf-8 cells"));
        text
    }

    pub fn to_json(&self) -> String {
        let metadata: Map<String, Json> = self
            .metadata_pairs()
            .into_iter()
            .map(|(k, v)| (k, Json::String(v)))
            .collect();
        let rows: Vec<Json> = self
            .rows
            .iter()
            .map(|row| {
                Json::Object(
                    self.columns
                        .iter()
                        .cloned()
                        .zip(row.iter().map(Cell::to_json))
                        .collect(),
                )
            })
            .collect();
        let mut text = serde_json::to_string_pretty(&json!({ "metadata": metadata, "rows": rows }))
            .expect("json values serialize");
        text.push('\n');
        text
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}
