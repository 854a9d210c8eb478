//! Soft categorical assignment tables: CSV header `id,p_1..p_n`, or a JSON
//! array of objects with the same field names.

use std::path::Path;

use hetlab::categorical::SoftAssignmentBatch;
use hetlab::Distribution;
use serde_json::Value as Json;

use crate::dataset::{csv_reader, is_json_path, read_text};
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentTable {
    ids: Vec<String>,
    rows: Vec<Distribution>,
}

impl AssignmentTable {
    /// Validates every row as a probability vector; errors name the row.
    pub fn new(ids: Vec<String>, rows: Vec<Vec<f64>>) -> CliResult<Self> {
        if rows.is_empty() {
            return Err(CliError::ingest("assignment table has no rows"));
        }
        let n = rows[0].len();
        let rows = rows
            .into_iter()
            .zip(&ids)
            .enumerate()
            .map(|(k, (row, id))| {
                if row.len() != n {
                    return Err(CliError::ingest(format!(
                        "row {} (id {id}): expected {n} probabilities, found {}",
                        k + 1,
                        row.len()
                    )));
                }
                Distribution::new(row)
                    .map_err(|e| CliError::ingest(format!("row {} (id {id}): {e}", k + 1)))
            })
            .collect::<CliResult<Vec<_>>>()?;
        Ok(Self { ids, rows })
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn rows(&self) -> &[Distribution] {
        &self.rows
    }

    pub fn n_categories(&self) -> usize {
        self.rows[0].len()
    }

    pub fn batch(&self) -> CliResult<SoftAssignmentBatch> {
        let w = 1.0 / self.rows.len() as f64;
        Ok(SoftAssignmentBatch::new(self.rows.clone(), vec![w; self.rows.len()])?)
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = read_text(path)?;
        if is_json_path(path) {
            Self::from_json(&text)
        } else {
            Self::from_csv(&text)
        }
    }

    pub fn from_csv(text: &str) -> CliResult<Self> {
        let mut reader = csv_reader(text);
        let header: Vec<String> = reader
            .headers()
            .map_err(|e| CliError::ingest(format!("header: {e}")))?
            .iter()
            .map(str::to_owned)
            .collect();
        let (id_col, p_cols) = layout(&header)?;
        let mut ids = Vec::new();
        let mut rows = Vec::new();
        for (k, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| CliError::ingest(format!("row {}: {e}", k + 1)))?;
            let id = rec.get(id_col).unwrap_or("").to_owned();
            let row = p_cols
                .iter()
                .map(|&i| {
                    let cell = rec.get(i).unwrap_or("");
                    cell.parse::<f64>().map_err(|_| {
                        CliError::ingest(format!(
                            "row {} (id {id}): cannot parse {} = {cell:?}",
                            k + 1,
                            header[i]
                        ))
                    })
                })
                .collect::<CliResult<Vec<_>>>()?;
            ids.push(id);
            rows.push(row);
        }
        Self::new(ids, rows)
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        let value: Json =
            serde_json::from_str(text).map_err(|e| CliError::ingest(format!("json: {e}")))?;
        let items = value
            .as_array()
            .ok_or_else(|| CliError::ingest("json table must be an array of rows"))?;
        let mut ids = Vec::new();
        let mut rows = Vec::new();
        for (k, item) in items.iter().enumerate() {
            let obj = item
                .as_object()
                .ok_or_else(|| CliError::ingest(format!("row {} is not an object", k + 1)))?;
            let fields: Vec<String> = obj.keys().cloned().collect();
            let (_, p_cols) = layout(&fields)?;
            let id = match &obj["id"] {
                Json::String(s) => s.clone(),
                other => other.to_string(),
            };
            let row = (1..=p_cols.len())
                .map(|j| {
                    obj[&format!("p_{j}")].as_f64().ok_or_else(|| {
                        CliError::ingest(format!("row {} (id {id}): p_{j} is not a number", k + 1))
                    })
                })
                .collect::<CliResult<Vec<_>>>()?;
            ids.push(id);
            rows.push(row);
        }
        Self::new(ids, rows)
    }
}

fn layout(fields: &[String]) -> CliResult<(usize, Vec<usize>)> {
    let find = |name: &str| fields.iter().position(|f| f.trim() == name);
    let id = find("id").ok_or_else(|| CliError::ingest("missing id column"))?;
    let probs: Vec<usize> = (1..).map_while(|j| find(&format!("p_{j}"))).collect();
    if probs.is_empty() {
        return Err(CliError::ingest("need columns p_1..p_n"));
    }
    if probs.len() + 1 != fields.len() {
        return Err(CliError::ingest(format!("unexpected columns in {fields:?}")));
    }
    Ok((id, probs))
}
