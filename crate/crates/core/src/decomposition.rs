//! Pooled, within-group and between-group heterogeneity of a weighted
//! ensemble of distributions defined over a shared state space.
//!
//! `pooled = within × between` holds exactly: `between` is defined as the
//! ratio. With unequal weights, `within <= pooled` is only guaranteed at
//! `q ∈ {0, 1}`; [`DecompositionResult::lande_warning`] marks the other cases.

use crate::renyi::{ln_power_sum, log_sum_exp, renyi_heterogeneity, shannon_entropy};
use crate::{Distribution, HetError, Order, Result, SUM_TOLERANCE};

/// Tolerance below which weights count as equal for the Lande warning.
const EQUAL_WEIGHT_TOLERANCE: f64 = 1e-12;

/// `N` subsystem distributions over the same `n` states, with weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsystemEnsemble {
    rows: Vec<Distribution>,
    weights: Vec<f64>,
}

pub(crate) fn validate_weights(weights: &[f64], expected: usize) -> Result<()> {
    if weights.len() != expected {
        return Err(HetError::DimensionMismatch {
            expected,
            found: weights.len(),
        });
    }
    if expected == 0 {
        return Err(HetError::InvalidWeights("no weights".into()));
    }
    if let Some((i, w)) = weights
        .iter()
        .enumerate()
        .find(|(_, w)| !w.is_finite() || **w < 0.0)
    {
        return Err(HetError::InvalidWeights(format!(
            "weight {i} = {w} is not a non-negative number"
        )));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > SUM_TOLERANCE {
        return Err(HetError::InvalidWeights(format!(
            "weights sum to {total}, not 1"
        )));
    }
    Ok(())
}

pub(crate) fn weights_are_equal(weights: &[f64]) -> bool {
    let target = 1.0 / weights.len() as f64;
    weights
        .iter()
        .all(|w| (w - target).abs() <= EQUAL_WEIGHT_TOLERANCE)
}

impl SubsystemEnsemble {
    pub fn new(rows: Vec<Distribution>, weights: Vec<f64>) -> Result<Self> {
        if rows.is_empty() {
            return Err(HetError::InvalidDistribution("no subsystems".into()));
        }
        let n = rows[0].len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(HetError::DimensionMismatch {
                expected: n,
                found: bad.len(),
            });
        }
        validate_weights(&weights, rows.len())?;
        Ok(Self { rows, weights })
    }

    /// Builds rows from raw vectors, validating each.
    pub fn from_table(table: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        let rows = table
            .into_iter()
            .enumerate()
            .map(|(i, r)| {
                Distribution::new(r).map_err(|e| match e {
                    HetError::InvalidDistribution(msg) => {
                        HetError::InvalidDistribution(format!("row {i}: {msg}"))
                    }
                    other => other,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(rows, weights)
    }

    pub fn with_uniform_weights(rows: Vec<Distribution>) -> Result<Self> {
        let n = rows.len();
        Self::new(rows, vec![1.0 / n.max(1) as f64; n])
    }

    pub fn rows(&self) -> &[Distribution] {
        &self.rows
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn n_states(&self) -> usize {
        self.rows[0].len()
    }

    /// The weighted average distribution `Σ_i w_i p_i`.
    pub fn pooled_distribution(&self) -> Distribution {
        let mut pooled = vec![0.0; self.n_states()];
        for (row, &w) in self.rows.iter().zip(&self.weights) {
            for (acc, &p) in pooled.iter_mut().zip(row.probs()) {
                *acc += w * p;
            }
        }
        let total: f64 = pooled.iter().sum();
        pooled.iter_mut().for_each(|p| *p /= total);
        Distribution::new(pooled).expect("convex combination of distributions")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompositionResult {
    pub pooled: f64,
    pub within: f64,
    pub between: f64,
    /// Unequal weights at `q ∉ {0, 1}`: `between >= 1` is not guaranteed.
    pub lande_warning: bool,
}

pub fn pooled_heterogeneity(e: &SubsystemEnsemble, q: Order) -> f64 {
    renyi_heterogeneity(&e.pooled_distribution(), q)
}

/// Effective number of states contributed per subsystem.
pub fn within_heterogeneity(e: &SubsystemEnsemble, q: Order) -> f64 {
    let active = || {
        e.rows
            .iter()
            .zip(&e.weights)
            .filter(|(_, &w)| w > 0.0)
    };
    match q {
        // q → 0+: zero weights drop out, the rest average their richness
        Order::Zero => {
            let (count, total) = active().fold((0usize, 0.0), |(c, t), (row, _)| {
                (c + 1, t + renyi_heterogeneity(row, Order::Zero))
            });
            total / count as f64
        }
        Order::One => active()
            .map(|(row, &w)| w * shannon_entropy(row))
            .sum::<f64>()
            .exp(),
        Order::Infinity => {
            let w_max = e.weights.iter().copied().fold(0.0, f64::max);
            let peak = active()
                .map(|(row, &w)| w * row.probs().iter().copied().fold(0.0, f64::max))
                .fold(0.0, f64::max);
            w_max / peak
        }
        Order::Finite(q) => {
            let ln_num = log_sum_exp(
                active().map(move |(row, &w)| q * w.ln() + ln_power_sum(row.probs(), q)),
            );
            let ln_den = log_sum_exp(active().map(move |(_, &w)| q * w.ln()));
            ((ln_num - ln_den) / (1.0 - q)).exp()
        }
    }
}

/// Effective number of completely distinct subsystems, `pooled / within`.
pub fn between_heterogeneity(e: &SubsystemEnsemble, q: Order) -> f64 {
    pooled_heterogeneity(e, q) / within_heterogeneity(e, q)
}

pub fn decompose(e: &SubsystemEnsemble, q: Order) -> DecompositionResult {
    let pooled = pooled_heterogeneity(e, q);
    let within = within_heterogeneity(e, q);
    DecompositionResult {
        pooled,
        within,
        between: pooled / within,
        lande_warning: !weights_are_equal(&e.weights) && !matches!(q, Order::Zero | Order::One),
    }
}
