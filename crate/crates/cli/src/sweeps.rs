//! Parameter sweeps over the three-state system and the beta mixture.

use clap::ValueEnum;
use hetlab::bmm::{bmm_between_rrh, bmm_index_comparison, optimal_threshold, BetaMixtureParams};
use hetlab::classic::{
    functional_hill, is_metric, is_ultrametric, leinster_cobbold, neqrqe, rescale_distance,
    similarity_from_distance, three_state_distance, three_state_probs, METRIC_TOLERANCE,
};
use hetlab::renyi::renyi_heterogeneity;
use hetlab::{HetError, Order};
use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::number::format_number;
use crate::output::{Cell, SweepResult};

/// Undefined values become empty cells; input errors still fail the sweep.
fn soft(r: hetlab::Result<f64>) -> CliResult<Cell> {
    match r {
        Ok(x) => Ok(Cell::Num(x)),
        Err(e) if e.is_numerical() || matches!(e, HetError::DegenerateDistance) => Ok(Cell::Missing),
        Err(e) => Err(e.into()),
    }
}

fn list(xs: &[f64]) -> String {
    xs.iter().map(|&x| format_number(x)).collect::<Vec<_>>().join(",")
}

fn order_list(qs: &[Order]) -> String {
    qs.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(",")
}

fn non_empty<T>(xs: &[T], what: &str) -> CliResult<()> {
    if xs.is_empty() {
        Err(CliError::usage(format!("{what} grid is empty")))
    } else {
        Ok(())
    }
}

fn collect_rows(result: &mut SweepResult, rows: Vec<CliResult<Vec<Cell>>>) -> CliResult<()> {
    for row in rows {
        result.push_row(row?);
    }
    Ok(())
}

/// Indices of the three-state system `D(h, b)`, `p(κ)` on an `(h, κ, q, u)` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeStateSweep {
    pub h_grid: Vec<f64>,
    pub b: f64,
    pub kappas: Vec<f64>,
    pub orders: Vec<Order>,
    pub u_grid: Vec<f64>,
}

impl ThreeStateSweep {
    pub const COLUMNS: [&'static str; 11] = [
        "h", "b", "kappa", "q", "u", "neqrqe", "fhn", "lci", "hill", "is_metric", "is_ultrametric",
    ];

    pub fn run(&self) -> CliResult<SweepResult> {
        non_empty(&self.h_grid, "h")?;
        non_empty(&self.kappas, "kappa")?;
        non_empty(&self.orders, "q")?;
        non_empty(&self.u_grid, "u")?;
        if !(self.b.is_finite() && self.b > 0.0) {
            return Err(CliError::usage(format!("b must be positive, got {}", self.b)));
        }
        if let Some(u) = self.u_grid.iter().find(|u| !(u.is_finite() && **u >= 0.0)) {
            return Err(CliError::usage(format!("u must be finite and non-negative, got {u}")));
        }
        let distances = self
            .h_grid
            .iter()
            .map(|&h| three_state_distance(h, self.b).map_err(|e| CliError::usage(e.to_string())))
            .collect::<CliResult<Vec<_>>>()?;
        let probs = self
            .kappas
            .iter()
            .map(|&k| three_state_probs(k).map_err(|e| CliError::usage(e.to_string())))
            .collect::<CliResult<Vec<_>>>()?;

        let mut points = Vec::new();
        for (hi, &h) in self.h_grid.iter().enumerate() {
            for (ki, &kappa) in self.kappas.iter().enumerate() {
                for &q in &self.orders {
                    for &u in &self.u_grid {
                        points.push((hi, h, ki, kappa, q, u));
                    }
                }
            }
        }
        let rows = points
            .par_iter()
            .map(|&(hi, h, ki, kappa, q, u)| {
                let d = &distances[hi];
                let p = &probs[ki];
                let neq = soft(rescale_distance(d).and_then(|r| neqrqe(&r, p)))?;
                let fhn = soft(functional_hill(d, p, q))?;
                let lci = soft(similarity_from_distance(d, u).and_then(|s| leinster_cobbold(&s, p, q)))?;
                Ok(vec![
                    h.into(),
                    self.b.into(),
                    kappa.into(),
                    q.value().into(),
                    u.into(),
                    neq,
                    fhn,
                    lci,
                    renyi_heterogeneity(p, q).into(),
                    is_metric(d, METRIC_TOLERANCE).into(),
                    is_ultrametric(d, METRIC_TOLERANCE).into(),
                ])
            })
            .collect();

        let mut result = SweepResult::new("three-state-sweep", &Self::COLUMNS)
            .parameter("h_grid", list(&self.h_grid))
            .parameter("b", format_number(self.b))
            .parameter("kappa", list(&self.kappas))
            .parameter("q", order_list(&self.orders))
            .parameter("u", list(&self.u_grid))
            .parameter("metric_tolerance", format_number(METRIC_TOLERANCE));
        collect_rows(&mut result, rows)?;
        Ok(result)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum TauMode {
    /// Indices at the Bayes-optimal threshold.
    #[default]
    Optimal,
    /// Between-observation heterogeneity along a threshold grid.
    Grid,
}

/// Beta mixture sweep over `θ₁` at fixed component shapes.
#[derive(Debug, Clone, PartialEq)]
pub struct BmmSweep {
    pub theta1_grid: Vec<f64>,
    pub theta2: f64,
    pub theta3: f64,
    pub orders: Vec<Order>,
    pub u: f64,
    pub tau_mode: TauMode,
    pub tau_grid: Option<Vec<f64>>,
}

impl BmmSweep {
    pub const OPTIMAL_COLUMNS: [&'static str; 10] = [
        "theta1", "theta2", "theta3", "q", "u", "tau", "rrh", "fhn", "neqrqe", "lci",
    ];
    pub const GRID_COLUMNS: [&'static str; 6] = ["theta1", "theta2", "theta3", "q", "tau", "rrh"];

    fn params(&self) -> CliResult<Vec<BetaMixtureParams>> {
        non_empty(&self.theta1_grid, "theta1")?;
        non_empty(&self.orders, "q")?;
        self.theta1_grid
            .iter()
            .map(|&t1| {
                BetaMixtureParams::new(t1, self.theta2, self.theta3)
                    .map_err(|e| CliError::usage(e.to_string()))
            })
            .collect()
    }

    pub fn run(&self) -> CliResult<SweepResult> {
        let thetas = self.params()?;
        let base = |cols: &[&str]| {
            SweepResult::new("bmm-sweep", cols)
                .parameter("theta1_grid", list(&self.theta1_grid))
                .parameter("theta2", format_number(self.theta2))
                .parameter("theta3", format_number(self.theta3))
                .parameter("q", order_list(&self.orders))
        };
        match self.tau_mode {
            TauMode::Optimal => {
                if !(self.u.is_finite() && self.u >= 0.0) {
                    return Err(CliError::usage(format!("u must be finite and non-negative, got {}", self.u)));
                }
                let points: Vec<(BetaMixtureParams, Order)> = thetas
                    .iter()
                    .flat_map(|t| self.orders.iter().map(move |&q| (*t, q)))
                    .collect();
                let rows = points
                    .par_iter()
                    .map(|(t, q)| {
                        let row = bmm_index_comparison(t, *q, self.u)?;
                        Ok(vec![
                            t.theta1().into(),
                            t.theta2().into(),
                            t.theta3().into(),
                            q.value().into(),
                            self.u.into(),
                            optimal_threshold(t).into(),
                            row.rrh.into(),
                            row.fhn.into(),
                            row.neqrqe.into(),
                            row.lci.into(),
                        ])
                    })
                    .collect();
                let mut result = base(&Self::OPTIMAL_COLUMNS)
                    .parameter("u", format_number(self.u))
                    .parameter("tau_mode", "optimal");
                collect_rows(&mut result, rows)?;
                Ok(result)
            }
            TauMode::Grid => {
                let taus = self
                    .tau_grid
                    .as_ref()
                    .ok_or_else(|| CliError::usage("--tau-grid is required with --tau-mode grid"))?;
                non_empty(taus, "tau")?;
                if let Some(t) = taus.iter().find(|t| !(0.0..=1.0).contains(*t)) {
                    return Err(CliError::usage(format!("tau must lie in [0, 1], got {t}")));
                }
                let mut points = Vec::new();
                for t in &thetas {
                    for &q in &self.orders {
                        for &tau in taus {
                            points.push((*t, q, tau));
                        }
                    }
                }
                let rows = points
                    .par_iter()
                    .map(|(t, q, tau)| {
                        Ok(vec![
                            t.theta1().into(),
                            t.theta2().into(),
                            t.theta3().into(),
                            q.value().into(),
                            (*tau).into(),
                            soft(bmm_between_rrh(t, *tau, *q))?,
                        ])
                    })
                    .collect();
                let mut result = base(&Self::GRID_COLUMNS)
                    .parameter("tau_mode", "grid")
                    .parameter("tau_grid", list(taus));
                collect_rows(&mut result, rows)?;
                Ok(result)
            }
        }
    }
}
