//! Synthetic embedding datasets: labelled clusters of diagonal Gaussians.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dataset::{read_text, EmbeddingDataset, EmbeddingRecord};
use crate::error::{CliError, CliResult};
use crate::number::round_significant;

/// Generator parameters, read from JSON.
///
/// ```json
/// { "n_z": 2,
///   "labels": [ { "name": "a", "points": 500,
///                 "clusters": [ { "center": [0, 0], "spread": 1 } ],
///                 "log_variance": [-6.2, -5.5] } ] }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSpec {
    pub n_z: usize,
    pub labels: Vec<LabelSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelSpec {
    pub name: String,
    pub points: usize,
    /// Points are dealt to the clusters in turn.
    pub clusters: Vec<ClusterSpec>,
    /// Each log-variance coordinate is uniform on this closed range.
    pub log_variance: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterSpec {
    pub center: Vec<f64>,
    /// Standard deviation of the means around the center, per axis.
    pub spread: f64,
}

impl SynthSpec {
    pub fn read(path: &Path) -> CliResult<Self> {
        Self::from_json(&read_text(path)?)
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        let spec: Self = serde_json::from_str(text)
            .map_err(|e| CliError::usage(format!("generator spec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |msg: String| Err(CliError::usage(format!("generator spec: {msg}")));
        if self.n_z == 0 {
            return bad("n_z must be positive".into());
        }
        if self.labels.is_empty() {
            return bad("no labels".into());
        }
        for l in &self.labels {
            let name = &l.name;
            if l.points == 0 {
                return bad(format!("label {name}: points must be positive"));
            }
            if l.clusters.is_empty() {
                return bad(format!("label {name}: no clusters"));
            }
            let [lo, hi] = l.log_variance;
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return bad(format!("label {name}: log_variance range [{lo}, {hi}]"));
            }
            for c in &l.clusters {
                if c.center.len() != self.n_z || c.center.iter().any(|x| !x.is_finite()) {
                    return bad(format!("label {name}: center must be {} finite numbers", self.n_z));
                }
                if !(c.spread.is_finite() && c.spread >= 0.0) {
                    return bad(format!("label {name}: spread {}", c.spread));
                }
            }
        }
        Ok(())
    }

    pub fn total_points(&self) -> usize {
        self.labels.iter().map(|l| l.points).sum()
    }
}

/// Draws the dataset. Values are rounded to the output precision, so the
/// written file reads back to exactly the same dataset.
pub fn generate(spec: &SynthSpec, seed: u64) -> CliResult<EmbeddingDataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::with_capacity(spec.total_points());
    for l in &spec.labels {
        let [lo, hi] = l.log_variance;
        for j in 0..l.points {
            let c = &l.clusters[j % l.clusters.len()];
            let mean = c
                .center
                .iter()
                .map(|&m| {
                    let z: f64 = rng.sample(StandardNormal);
                    round_significant(m + c.spread * z)
                })
                .collect();
            let log_variance = (0..spec.n_z)
                .map(|_| round_significant(if lo < hi { rng.gen_range(lo..=hi) } else { lo }))
                .collect();
            records.push(EmbeddingRecord {
                id: format!("{}-{j}", l.name),
                label: Some(l.name.clone()),
                mean,
                log_variance,
            });
        }
    }
    EmbeddingDataset::new(records, None).map_err(|e| CliError::usage(format!("generator spec: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> SynthSpec {
        SynthSpec::from_json(
            r#"{"n_z": 2, "labels": [
                {"name": "a", "points": 5, "clusters": [{"center": [0, 0], "spread": 0}], "log_variance": [-1, -1]},
                {"name": "b", "points": 7, "clusters": [{"center": [5, 5], "spread": 1}, {"center": [-5, 5], "spread": 1}], "log_variance": [-3, -2]}
            ]}"#,
        )
        .unwrap()
    }

    #[test]
    fn same_seed_same_dataset() {
        let s = spec();
        assert_eq!(generate(&s, 3).unwrap(), generate(&s, 3).unwrap());
        assert_ne!(generate(&s, 3).unwrap(), generate(&s, 4).unwrap());
    }

    #[test]
    fn zero_spread_collapses_means() {
        let d = generate(&spec(), 1).unwrap();
        assert_eq!(d.len(), 12);
        for r in &d.records()[..5] {
            assert_eq!(r.mean, vec![0.0, 0.0]);
            assert_eq!(r.log_variance, vec![-1.0, -1.0]);
            assert_eq!(r.label.as_deref(), Some("a"));
        }
        for r in &d.records()[5..] {
            assert!(r.log_variance.iter().all(|s| (-3.0..=-2.0).contains(s)));
        }
    }

    #[test]
    fn written_dataset_reads_back_identically() {
        let d = generate(&spec(), 9).unwrap();
        assert_eq!(EmbeddingDataset::from_csv(&d.to_csv()).unwrap(), d);
        assert_eq!(EmbeddingDataset::from_json(&d.to_json()).unwrap(), d);
    }

    #[test]
    fn invalid_specs_are_usage_errors() {
        for bad in [
            r#"{"n_z": 0, "labels": []}"#,
            r#"{"n_z": 1, "labels": [{"name": "a", "points": 1, "clusters": [{"center": [0, 0], "spread": 1}], "log_variance": [0, 0]}]}"#,
            r#"{"n_z": 1, "labels": [{"name": "a", "points": 1, "clusters": [{"center": [0], "spread": -1}], "log_variance": [0, 0]}]}"#,
            r#"{"n_z": 1, "labels": [{"name": "a", "points": 1, "clusters": [{"center": [0], "spread": 1}], "log_variance": [1, 0]}]}"#,
            r#"{"n_z": 1, "labels": [{"name": "a", "points": 1, "clusters": [{"center": [0], "spread": 1}], "log_variance": [-40, -40]}]}"#,
            r#"{"n_z": 1, "extra": 1, "labels": []}"#,
        ] {
            let err = SynthSpec::from_json(bad)
                .and_then(|s| generate(&s, 0))
                .unwrap_err();
            assert_eq!(err.exit_code(), 2, "{bad}");
        }
    }
}
