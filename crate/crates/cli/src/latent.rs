//! Heterogeneity of embedding datasets and soft assignment tables.

use std::collections::BTreeMap;

use clap::ValueEnum;
use hetlab::categorical::rrh_decompose;
use hetlab::gaussian::{
    gaussian_between, ln_gaussian_renyi, ln_gaussian_within, gaussian_pool,
    model_average_pooled_numeric, GaussianComponent, GaussianEnsemble, GridSpec,
};
use hetlab::Order;
use rayon::prelude::*;

use crate::assignments::AssignmentTable;
use crate::dataset::EmbeddingDataset;
use crate::error::{CliError, CliResult};
use crate::number::format_number;
use crate::output::{Cell, SweepResult};

/// How the pooled distribution of a group is summarised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Pooling {
    /// Moment-matched single Gaussian, in closed form.
    #[default]
    Parametric,
    /// The mixture density itself, by grid quadrature (n_z <= 3).
    ModelAverage,
}

impl Pooling {
    fn name(self) -> &'static str {
        match self {
            Pooling::Parametric => "parametric",
            Pooling::ModelAverage => "model-average",
        }
    }
}

fn positive_finite(q: Order) -> CliResult<Order> {
    match q {
        Order::Zero | Order::Infinity => Err(CliError::usage(format!(
            "order q = {q} is not supported here; use 0 < q < inf"
        ))),
        _ => Ok(q),
    }
}

fn order_list(qs: &[Order]) -> String {
    qs.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(",")
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Parts {
    pooled: f64,
    within: f64,
    between: f64,
}

fn decompose_group(
    components: Vec<GaussianComponent>,
    weights: Option<Vec<f64>>,
    q: Order,
    pooling: Pooling,
) -> CliResult<Parts> {
    let e = match weights {
        Some(w) => GaussianEnsemble::new(components, w)?,
        None => GaussianEnsemble::with_uniform_weights(components)?,
    };
    let ln_within = ln_gaussian_within(&e, q)?;
    Ok(match pooling {
        Pooling::Parametric => {
            let ln_pooled = ln_gaussian_renyi(gaussian_pool(&e)?.covariance(), q)?;
            Parts {
                pooled: ln_pooled.exp(),
                within: ln_within.exp(),
                between: (ln_pooled - ln_within).exp(),
            }
        }
        Pooling::ModelAverage => {
            let pooled = model_average_pooled_numeric(&e, q, GridSpec::for_dim(e.dim()))?;
            Parts {
                pooled,
                within: ln_within.exp(),
                between: (pooled.ln() - ln_within).exp(),
            }
        }
    })
}

/// Pooled, within and between heterogeneity per label group or for the
/// whole dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct Decompose {
    pub orders: Vec<Order>,
    pub group_by_label: bool,
    pub pooling: Pooling,
}

impl Decompose {
    pub const COLUMNS: [&'static str; 7] =
        ["group", "n", "q", "pooled", "within", "between", "singleton"];

    pub fn run(&self, data: &EmbeddingDataset) -> CliResult<SweepResult> {
        if self.orders.is_empty() {
            return Err(CliError::usage("q grid is empty"));
        }
        for &q in &self.orders {
            positive_finite(q)?;
        }
        // (name, member indices, weights); groups in label order
        let groups: Vec<(String, Vec<usize>, Option<Vec<f64>>)> = if self.group_by_label {
            let mut by_label: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
            for (i, r) in data.records().iter().enumerate() {
                let label = r.label.as_deref().ok_or_else(|| {
                    CliError::ingest(format!("record {} (id {}) has no label", i + 1, r.id))
                })?;
                by_label.entry(label).or_default().push(i);
            }
            by_label
                .into_iter()
                .map(|(l, idx)| (l.to_owned(), idx, None))
                .collect()
        } else {
            let all = (0..data.len()).collect();
            vec![("all".to_owned(), all, data.weights().map(<[f64]>::to_vec))]
        };

        let points: Vec<(usize, Order)> = (0..groups.len())
            .flat_map(|g| self.orders.iter().map(move |&q| (g, q)))
            .collect();
        let rows = points
            .par_iter()
            .map(|&(g, q)| {
                let (name, idx, weights) = &groups[g];
                let components: Vec<_> = idx.iter().map(|&i| data.component(i)).collect();
                let singleton = idx.len() == 1;
                let parts = if singleton {
                    let v = ln_gaussian_renyi(components[0].covariance(), q)?.exp();
                    Parts {
                        pooled: v,
                        within: v,
                        between: 1.0,
                    }
                } else {
                    decompose_group(components, weights.clone(), q, self.pooling)?
                };
                Ok(vec![
                    name.as_str().into(),
                    idx.len().into(),
                    q.value().into(),
                    parts.pooled.into(),
                    parts.within.into(),
                    parts.between.into(),
                    singleton.into(),
                ])
            })
            .collect::<Vec<CliResult<Vec<Cell>>>>();

        let mut result = SweepResult::new("embeddings decompose", &Self::COLUMNS)
            .parameter("records", data.len())
            .parameter("n_z", data.n_z())
            .parameter("group_by", if self.group_by_label { "label" } else { "none" })
            .parameter("q", order_list(&self.orders))
            .parameter("pooling", self.pooling.name());
        for row in rows {
            result.push_row(row?);
        }
        Ok(result)
    }
}

/// Between-observation heterogeneity of each record's neighbourhood: the
/// record plus its `k` nearest records by Euclidean distance between means.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighborhoods {
    pub k: usize,
    pub q: Order,
    pub top: usize,
}

impl Neighborhoods {
    pub const COLUMNS: [&'static str; 6] = ["extreme", "rank", "record", "id", "label", "between"];

    fn validate(&self, data: &EmbeddingDataset) -> CliResult<()> {
        positive_finite(self.q)?;
        if self.k == 0 || self.k >= data.len() {
            return Err(CliError::usage(format!(
                "k must satisfy 1 <= k < N = {}, got {}",
                data.len(),
                self.k
            )));
        }
        if self.top == 0 {
            return Err(CliError::usage("top must be positive"));
        }
        Ok(())
    }

    /// Member indices of record `i`'s neighbourhood, self first, then by
    /// distance with ties going to the lower index.
    pub fn members(&self, data: &EmbeddingDataset, i: usize) -> Vec<usize> {
        let me = &data.records()[i].mean;
        let mut cand: Vec<(f64, usize)> = data
            .records()
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(j, r)| {
                let d2 = r.mean.iter().zip(me).map(|(a, b)| (a - b) * (a - b)).sum();
                (d2, j)
            })
            .collect();
        let by_distance = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if self.k < cand.len() {
            cand.select_nth_unstable_by(self.k - 1, by_distance);
            cand.truncate(self.k);
        }
        cand.sort_unstable_by(by_distance);
        std::iter::once(i).chain(cand.into_iter().map(|(_, j)| j)).collect()
    }

    /// Between-observation heterogeneity of every record's neighbourhood.
    pub fn between_all(&self, data: &EmbeddingDataset) -> CliResult<Vec<f64>> {
        self.validate(data)?;
        let components = data.components();
        (0..data.len())
            .into_par_iter()
            .map(|i| {
                let members = self.members(data, i);
                let e = GaussianEnsemble::with_uniform_weights(
                    members.iter().map(|&j| components[j].clone()).collect(),
                )?;
                Ok(gaussian_between(&e, self.q)?)
            })
            .collect()
    }

    pub fn run(&self, data: &EmbeddingDataset) -> CliResult<SweepResult> {
        let between = self.between_all(data)?;
        let mut order: Vec<usize> = (0..between.len()).collect();
        order.sort_by(|&a, &b| between[b].total_cmp(&between[a]).then(a.cmp(&b)));
        let top = self.top.min(between.len());
        let highest = order[..top].to_vec();
        order.sort_by(|&a, &b| between[a].total_cmp(&between[b]).then(a.cmp(&b)));
        let lowest = order[..top].to_vec();

        let (min, max) = between
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        let mut result = SweepResult::new("embeddings neighborhoods", &Self::COLUMNS)
            .parameter("records", data.len())
            .parameter("n_z", data.n_z())
            .parameter("k", self.k)
            .parameter("q", self.q)
            .parameter("top", top)
            .parameter("between_min", format_number(min))
            .parameter("between_max", format_number(max));
        for (extreme, picks) in [("highest", highest), ("lowest", lowest)] {
            for (rank, i) in picks.into_iter().enumerate() {
                let r = &data.records()[i];
                result.push_row(vec![
                    extreme.into(),
                    (rank + 1).into(),
                    (i + 1).into(),
                    r.id.as_str().into(),
                    r.label.clone().into(),
                    between[i].into(),
                ]);
            }
        }
        Ok(result)
    }
}

/// Pooled, within and between heterogeneity of a soft assignment table.
#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentsRrh {
    pub orders: Vec<Order>,
}

impl AssignmentsRrh {
    pub const COLUMNS: [&'static str; 5] = ["q", "pooled", "within", "between", "lande_warning"];

    pub fn run(&self, table: &AssignmentTable) -> CliResult<SweepResult> {
        if self.orders.is_empty() {
            return Err(CliError::usage("q grid is empty"));
        }
        let batch = table.batch()?;
        let mut result = SweepResult::new("assignments rrh", &Self::COLUMNS)
            .parameter("rows", table.rows().len())
            .parameter("categories", table.n_categories())
            .parameter("q", order_list(&self.orders));
        for &q in &self.orders {
            let d = rrh_decompose(&batch, q);
            result.push_row(vec![
                q.value().into(),
                d.pooled.into(),
                d.within.into(),
                d.between.into(),
                d.lande_warning.into(),
            ]);
        }
        Ok(result)
    }
}
