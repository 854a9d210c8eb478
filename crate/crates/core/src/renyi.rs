//! Categorical Rényi heterogeneity (Hill numbers) and related indices.

use crate::{HetError, Order, Result, SUM_TOLERANCE};

/// A probability vector over `n >= 1` categorical states.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    /// Validates without renormalizing: entries must be finite, non-negative
    /// and sum to one within [`SUM_TOLERANCE`].
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(HetError::InvalidDistribution("empty".into()));
        }
        if let Some((i, p)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_finite() || **p < 0.0)
        {
            return Err(HetError::InvalidDistribution(format!(
                "entry {i} = {p} is not a non-negative number"
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(HetError::InvalidDistribution(format!(
                "entries sum to {total}, not 1"
            )));
        }
        Ok(Self { probs })
    }

    /// Scales non-negative masses to sum to one.
    pub fn normalize(masses: Vec<f64>) -> Result<Self> {
        if masses.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return Err(HetError::InvalidDistribution(
                "masses must be finite and non-negative".into(),
            ));
        }
        let total: f64 = masses.iter().sum();
        if total <= 0.0 {
            return Err(HetError::InvalidDistribution("total mass is zero".into()));
        }
        Self::new(masses.into_iter().map(|m| m / total).collect())
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(HetError::InvalidDistribution("empty".into()));
        }
        Ok(Self {
            probs: vec![1.0 / n as f64; n],
        })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.probs
    }
}

/// `-Σ p ln p` with `0 ln 0 = 0`.
pub fn shannon_entropy(p: &Distribution) -> f64 {
    -p.probs
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| x * x.ln())
        .sum::<f64>()
}

/// `ln Σ_i exp(v_i)` for the given exponents.
pub(crate) fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + values.map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// `ln Σ_i p_i^q` over the support.
pub(crate) fn ln_power_sum(probs: &[f64], q: f64) -> f64 {
    log_sum_exp(probs.iter().filter(|&&p| p > 0.0).map(move |&p| q * p.ln()))
}

/// Rényi heterogeneity `Π_q(p) = (Σ p_i^q)^{1/(1-q)}`, the effective number of
/// equally likely states.
pub fn renyi_heterogeneity(p: &Distribution, q: Order) -> f64 {
    match q {
        Order::Zero => p.probs.iter().filter(|&&x| x > 0.0).count() as f64,
        Order::One => shannon_entropy(p).exp(),
        Order::Infinity => 1.0 / p.probs.iter().copied().fold(0.0, f64::max),
        Order::Finite(q) => (ln_power_sum(&p.probs, q) / (1.0 - q)).exp(),
    }
}

/// Indices expressible as transforms of `Π_q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Table1Index {
    Richness,
    Perplexity,
    InverseSimpson,
    BergerParker,
    RenyiEntropy,
    ShannonEntropy,
    TsallisEntropy,
    SimpsonConcentration,
    GiniSimpson,
    GeneralizedEntropyIndex,
}

impl Table1Index {
    pub const ALL: [Table1Index; 10] = [
        Table1Index::Richness,
        Table1Index::Perplexity,
        Table1Index::InverseSimpson,
        Table1Index::BergerParker,
        Table1Index::RenyiEntropy,
        Table1Index::ShannonEntropy,
        Table1Index::TsallisEntropy,
        Table1Index::SimpsonConcentration,
        Table1Index::GiniSimpson,
        Table1Index::GeneralizedEntropyIndex,
    ];

    pub fn needs_order(self) -> bool {
        matches!(
            self,
            Table1Index::RenyiEntropy
                | Table1Index::TsallisEntropy
                | Table1Index::GeneralizedEntropyIndex
        )
    }
}

/// An index value, with `limit_branch` set when a `q`-limit expression was
/// used in place of the generic formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexValue {
    pub value: f64,
    pub limit_branch: bool,
}

impl IndexValue {
    fn exact(value: f64) -> Self {
        Self {
            value,
            limit_branch: false,
        }
    }

    fn limit(value: f64) -> Self {
        Self {
            value,
            limit_branch: true,
        }
    }
}

pub fn table1_index(p: &Distribution, index: Table1Index, q: Option<Order>) -> Result<IndexValue> {
    let q = match (index.needs_order(), q) {
        (true, None) => {
            return Err(HetError::InvalidParameter(format!(
                "{index:?} requires an order q"
            )))
        }
        (_, q) => q,
    };
    let het = |order| renyi_heterogeneity(p, order);
    let v = match index {
        Table1Index::Richness => IndexValue::exact(het(Order::Zero)),
        Table1Index::Perplexity => IndexValue::exact(het(Order::One)),
        Table1Index::InverseSimpson => IndexValue::exact(het(Order::Finite(2.0))),
        Table1Index::BergerParker => IndexValue::exact(het(Order::Infinity)),
        Table1Index::ShannonEntropy => IndexValue::exact(het(Order::One).ln()),
        Table1Index::SimpsonConcentration => IndexValue::exact(1.0 / het(Order::Finite(2.0))),
        Table1Index::GiniSimpson => IndexValue::exact(1.0 - 1.0 / het(Order::Finite(2.0))),
        Table1Index::RenyiEntropy => IndexValue::exact(het(q.unwrap()).ln()),
        Table1Index::TsallisEntropy => tsallis(p, q.unwrap()),
        Table1Index::GeneralizedEntropyIndex => generalized_entropy_index(p, q.unwrap()),
    };
    Ok(v)
}

fn tsallis(p: &Distribution, q: Order) -> IndexValue {
    match q {
        Order::One => IndexValue::limit(renyi_heterogeneity(p, q).ln()),
        Order::Infinity => IndexValue::limit(0.0),
        _ => {
            let qv = q.value();
            let pi = renyi_heterogeneity(p, q);
            IndexValue::exact((1.0 - pi.powf(1.0 - qv)) / (qv - 1.0))
        }
    }
}

fn generalized_entropy_index(p: &Distribution, q: Order) -> IndexValue {
    let n = p.len() as f64;
    match q {
        Order::One => IndexValue::limit(n.ln() - shannon_entropy(p)),
        Order::Zero => {
            // mean log deviation; infinite when a state has zero share
            if p.probs.contains(&0.0) {
                IndexValue::limit(f64::INFINITY)
            } else {
                IndexValue::limit(-p.probs.iter().map(|&x| (n * x).ln()).sum::<f64>() / n)
            }
        }
        Order::Infinity => {
            let ratio = renyi_heterogeneity(p, q) / n;
            IndexValue::limit(if ratio < 1.0 { f64::INFINITY } else { 0.0 })
        }
        Order::Finite(qv) => {
            let ratio = renyi_heterogeneity(p, q) / n;
            IndexValue::exact((ratio.powf(1.0 - qv) - 1.0) / (qv * (qv - 1.0)))
        }
    }
}
