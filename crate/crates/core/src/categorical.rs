//! Representational heterogeneity over soft categorical assignments: each
//! observation is mapped to a distribution over latent categories.

use crate::decomposition::{decompose, DecompositionResult, SubsystemEnsemble};
use crate::renyi::renyi_heterogeneity;
use crate::{Distribution, Order, Result};

/// `N` soft assignments over `n_z` categories, with observation weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftAssignmentBatch(SubsystemEnsemble);

impl SoftAssignmentBatch {
    pub fn new(assignments: Vec<Distribution>, weights: Vec<f64>) -> Result<Self> {
        SubsystemEnsemble::new(assignments, weights).map(Self)
    }

    /// Validates every row; errors name the offending row.
    pub fn from_table(table: Vec<Vec<f64>>, weights: Option<Vec<f64>>) -> Result<Self> {
        let n = table.len();
        let weights = weights.unwrap_or_else(|| vec![1.0 / n.max(1) as f64; n]);
        SubsystemEnsemble::from_table(table, weights).map(Self)
    }

    pub fn assignments(&self) -> &[Distribution] {
        self.0.rows()
    }

    pub fn weights(&self) -> &[f64] {
        self.0.weights()
    }

    pub fn n_categories(&self) -> usize {
        self.0.n_states()
    }

    pub fn as_ensemble(&self) -> &SubsystemEnsemble {
        &self.0
    }
}

/// Effective number of latent categories one observation occupies.
pub fn point_heterogeneity(row: &Distribution, q: Order) -> f64 {
    renyi_heterogeneity(row, q)
}

/// Pooled, within-observation and between-observation heterogeneity.
pub fn rrh_decompose(batch: &SoftAssignmentBatch, q: Order) -> DecompositionResult {
    decompose(&batch.0, q)
}
