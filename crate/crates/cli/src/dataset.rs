//! Gaussian embedding datasets: one diagonal Gaussian posterior per record.
//!
//! CSV header `id,label,m_1..m_n,s_1..s_n` with an optional trailing `w`
//! column of record weights; `s_j` are log-variances. The JSON form is an
//! array of objects keyed by the same field names. Lines starting with `#`
//! are ignored in CSV input.

use std::path::Path;

use hetlab::gaussian::{Covariance, GaussianComponent};
use hetlab::SUM_TOLERANCE;
use serde_json::{json, Map, Value as Json};

use crate::error::{CliError, CliResult};
use crate::number::{format_number, round_significant};
use crate::output::Format;

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingRecord {
    pub id: String,
    pub label: Option<String>,
    pub mean: Vec<f64>,
    pub log_variance: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingDataset {
    records: Vec<EmbeddingRecord>,
    weights: Option<Vec<f64>>,
}

impl EmbeddingDataset {
    pub fn new(records: Vec<EmbeddingRecord>, weights: Option<Vec<f64>>) -> CliResult<Self> {
        let first = records
            .first()
            .ok_or_else(|| CliError::ingest("dataset has no records"))?;
        let n_z = first.mean.len();
        if n_z == 0 {
            return Err(CliError::ingest("records need at least one latent dimension"));
        }
        for (k, r) in records.iter().enumerate() {
            let at = || format!("record {} (id {})", k + 1, r.id);
            if r.mean.len() != n_z || r.log_variance.len() != n_z {
                return Err(CliError::ingest(format!(
                    "{}: expected {n_z} means and log-variances, found {} and {}",
                    at(),
                    r.mean.len(),
                    r.log_variance.len()
                )));
            }
            if r.mean.iter().chain(&r.log_variance).any(|x| !x.is_finite()) {
                return Err(CliError::ingest(format!("{}: non-finite value", at())));
            }
            Covariance::from_log_variances(&r.log_variance)
                .map_err(|e| CliError::ingest(format!("{}: {e}", at())))?;
        }
        if let Some(w) = &weights {
            if w.len() != records.len() {
                return Err(CliError::ingest(format!(
                    "{} weights for {} records",
                    w.len(),
                    records.len()
                )));
            }
            if let Some(k) = w.iter().position(|x| !(x.is_finite() && *x >= 0.0)) {
                return Err(CliError::ingest(format!(
                    "record {} (id {}): weight {} must be finite and non-negative",
                    k + 1,
                    records[k].id,
                    w[k]
                )));
            }
            let total: f64 = w.iter().sum();
            if (total - 1.0).abs() > SUM_TOLERANCE {
                return Err(CliError::ingest(format!("weights sum to {total}, not 1")));
            }
        }
        Ok(Self { records, weights })
    }

    pub fn records(&self) -> &[EmbeddingRecord] {
        &self.records
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn n_z(&self) -> usize {
        self.records[0].mean.len()
    }

    pub fn component(&self, i: usize) -> GaussianComponent {
        let r = &self.records[i];
        let cov = Covariance::from_log_variances(&r.log_variance).expect("validated on construction");
        GaussianComponent::new(r.mean.clone(), cov).expect("validated on construction")
    }

    pub fn components(&self) -> Vec<GaussianComponent> {
        (0..self.len()).map(|i| self.component(i)).collect()
    }

    /// Reads JSON when the extension is `.json`, CSV otherwise.
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
            .map(|h| h.trim().to_owned())
            .collect();
        let layout = Layout::from_fields(&header)?;
        let mut records = Vec::new();
        let mut weights = Vec::new();
        for (k, row) in reader.records().enumerate() {
            let row = row.map_err(|e| CliError::ingest(format!("record {}: {e}", k + 1)))?;
            let cell = |i: usize| row.get(i).unwrap_or("").trim();
            let id = cell(layout.id).to_owned();
            let number = |i: usize| -> CliResult<f64> {
                cell(i).parse::<f64>().map_err(|_| {
                    CliError::ingest(format!(
                        "record {} (id {id}): cannot parse {} = {:?}",
                        k + 1,
                        header[i],
                        cell(i)
                    ))
                })
            };
            let label = layout
                .label
                .map(cell)
                .filter(|s| !s.is_empty())
                .map(str::to_owned);
            let mean = layout.means.iter().map(|&i| number(i)).collect::<CliResult<_>>()?;
            let log_variance = layout.logvars.iter().map(|&i| number(i)).collect::<CliResult<_>>()?;
            if let Some(i) = layout.weight {
                weights.push(number(i)?);
            }
            records.push(EmbeddingRecord {
                id,
                label,
                mean,
                log_variance,
            });
        }
        Self::new(records, layout.weight.map(|_| weights))
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        let value: Json =
            serde_json::from_str(text).map_err(|e| CliError::ingest(format!("json: {e}")))?;
        let items = value
            .as_array()
            .ok_or_else(|| CliError::ingest("json dataset must be an array of records"))?;
        let mut records = Vec::new();
        let mut weights = Vec::new();
        let mut has_weight = None;
        for (k, item) in items.iter().enumerate() {
            let obj = item
                .as_object()
                .ok_or_else(|| CliError::ingest(format!("record {} is not an object", k + 1)))?;
            let fields: Vec<String> = obj.keys().cloned().collect();
            let layout = Layout::from_fields(&fields)?;
            let id = match &obj["id"] {
                Json::String(s) => s.clone(),
                other => other.to_string(),
            };
            let number = |name: &str| -> CliResult<f64> {
                obj[name].as_f64().ok_or_else(|| {
                    CliError::ingest(format!("record {} (id {id}): {name} is not a number", k + 1))
                })
            };
            let label = match obj.get("label") {
                None | Some(Json::Null) => None,
                Some(Json::String(s)) if s.is_empty() => None,
                Some(Json::String(s)) => Some(s.clone()),
                Some(other) => Some(other.to_string()),
            };
            let n = layout.means.len();
            let mean = (1..=n).map(|j| number(&format!("m_{j}"))).collect::<CliResult<_>>()?;
            let log_variance = (1..=n).map(|j| number(&format!("s_{j}"))).collect::<CliResult<_>>()?;
            let w = layout.weight.is_some();
            if *has_weight.get_or_insert(w) != w {
                return Err(CliError::ingest(format!(
                    "record {} (id {id}): weight given for some records only",
                    k + 1
                )));
            }
            if w {
                weights.push(number("w")?);
            }
            records.push(EmbeddingRecord {
                id,
                label,
                mean,
                log_variance,
            });
        }
        Self::new(records, (has_weight == Some(true)).then_some(weights))
    }

    fn header(&self) -> Vec<String> {
        let n = self.n_z();
        let mut h = vec!["id".to_owned(), "label".to_owned()];
        h.extend((1..=n).map(|j| format!("m_{j}")));
        h.extend((1..=n).map(|j| format!("s_{j}")));
        if self.weights.is_some() {
            h.push("w".to_owned());
        }
        h
    }

    fn numbers(&self, k: usize) -> impl Iterator<Item = f64> + '_ {
        let r = &self.records[k];
        r.mean
            .iter()
            .chain(&r.log_variance)
            .copied()
            .chain(self.weights.as_ref().map(|w| w[k]))
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.header()).expect("in-memory write");
        for (k, r) in self.records.iter().enumerate() {
            let mut row = vec![r.id.clone(), r.label.clone().unwrap_or_default()];
            row.extend(self.numbers(k).map(format_number));
            w.write_record(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
    }

    pub fn to_json(&self) -> String {
        let header = self.header();
        let items: Vec<Json> = self
            .records
            .iter()
            .enumerate()
            .map(|(k, r)| {
                let mut obj = Map::new();
                obj.insert("id".into(), json!(r.id));
                obj.insert("label".into(), r.label.as_ref().map_or(Json::Null, |l| json!(l)));
                for (name, x) in header[2..].iter().zip(self.numbers(k)) {
                    obj.insert(name.clone(), json!(round_significant(x)));
                }
                Json::Object(obj)
            })
            .collect();
        let mut text = serde_json::to_string_pretty(&items).expect("json values serialize");
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

/// Column positions of an embedding header.
struct Layout {
    id: usize,
    label: Option<usize>,
    means: Vec<usize>,
    logvars: Vec<usize>,
    weight: Option<usize>,
}

impl Layout {
    fn from_fields(fields: &[String]) -> CliResult<Self> {
        let find = |name: &str| fields.iter().position(|f| f == name);
        let id = find("id").ok_or_else(|| CliError::ingest("missing id column"))?;
        let indexed = |prefix: &str| -> Vec<usize> {
            (1..).map_while(|j| find(&format!("{prefix}{j}"))).collect()
        };
        let means = indexed("m_");
        let logvars = indexed("s_");
        if means.is_empty() || means.len() != logvars.len() {
            return Err(CliError::ingest(format!(
                "need columns m_1..m_n and s_1..s_n, found {} and {}",
                means.len(),
                logvars.len()
            )));
        }
        let layout = Self {
            id,
            label: find("label"),
            means,
            logvars,
            weight: find("w"),
        };
        let known = 1 + usize::from(layout.label.is_some())
            + 2 * layout.means.len()
            + usize::from(layout.weight.is_some());
        if known != fields.len() {
            let extra: Vec<&String> = fields
                .iter()
                .enumerate()
                .filter(|(i, _)| !layout.owns(*i))
                .map(|(_, f)| f)
                .collect();
            return Err(CliError::ingest(format!("unexpected columns {extra:?}")));
        }
        Ok(layout)
    }

    fn owns(&self, i: usize) -> bool {
        i == self.id
            || self.label == Some(i)
            || self.weight == Some(i)
            || self.means.contains(&i)
            || self.logvars.contains(&i)
    }
}

pub(crate) fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub(crate) fn is_json_path(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

pub(crate) fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}
