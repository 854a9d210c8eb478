//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{CliError, CliResult};
use crate::grid::{parse_grid, parse_orders};
use crate::latent::{AssignmentsRrh, Decompose, Neighborhoods, Pooling};
use crate::output::Format;
use crate::sweeps::{BmmSweep, TauMode, ThreeStateSweep};

/// Rényi heterogeneity of categorical and Gaussian latent representations.
///
/// Grids are `start:stop:step` or comma separated lists; orders accept `inf`.
/// Set HETLAB_THREADS to cap the worker threads (0 = all cores).
#[derive(Debug, Parser)]
#[command(name = "hetlab", version)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,

    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classic indices of the three-state system over h, kappa, q and u.
    ThreeStateSweep(ThreeStateArgs),
    /// Beta mixture indices over theta1 at fixed component shapes.
    BmmSweep(BmmArgs),
    /// Gaussian embedding datasets.
    #[command(subcommand)]
    Embeddings(EmbeddingsCommand),
    /// Soft categorical assignment tables.
    #[command(subcommand)]
    Assignments(AssignmentsCommand),
}

#[derive(Debug, Args)]
pub struct ThreeStateArgs {
    /// Grid of h values.
    #[arg(long, default_value = "0.1:3.0:0.1")]
    pub grid: String,
    /// Base edge length b.
    #[arg(long, default_value_t = 1.0)]
    pub b: f64,
    /// Concentration parameters kappa.
    #[arg(long, default_value = "1,10,100")]
    pub kappa: String,
    /// Orders q.
    #[arg(long, default_value = "1,2")]
    pub q: String,
    /// Similarity decay rates u for the Leinster-Cobbold index.
    #[arg(long, default_value = "1")]
    pub u: String,
}

impl ThreeStateArgs {
    pub fn config(&self) -> CliResult<ThreeStateSweep> {
        Ok(ThreeStateSweep {
            h_grid: parse_grid(&self.grid)?,
            b: self.b,
            kappas: parse_grid(&self.kappa)?,
            orders: parse_orders(&self.q)?,
            u_grid: parse_grid(&self.u)?,
        })
    }
}

#[derive(Debug, Args)]
pub struct BmmArgs {
    /// Grid of mixing weights theta1.
    #[arg(long, default_value = "0.01:0.99:0.01")]
    pub grid: String,
    #[arg(long, default_value_t = 5.0)]
    pub theta2: f64,
    #[arg(long, default_value_t = 20.0)]
    pub theta3: f64,
    /// Orders q.
    #[arg(long, default_value = "1,2")]
    pub q: String,
    /// Similarity decay rate for the Leinster-Cobbold index.
    #[arg(long, default_value_t = 1.0)]
    pub u: f64,
    #[arg(long, value_enum, default_value_t = TauMode::Optimal)]
    pub tau_mode: TauMode,
    /// Threshold grid, required with `--tau-mode grid`.
    #[arg(long)]
    pub tau_grid: Option<String>,
}

impl BmmArgs {
    pub fn config(&self) -> CliResult<BmmSweep> {
        Ok(BmmSweep {
            theta1_grid: parse_grid(&self.grid)?,
            theta2: self.theta2,
            theta3: self.theta3,
            orders: parse_orders(&self.q)?,
            u: self.u,
            tau_mode: self.tau_mode,
            tau_grid: self.tau_grid.as_deref().map(parse_grid).transpose()?,
        })
    }
}

#[derive(Debug, Subcommand)]
pub enum EmbeddingsCommand {
    /// Pooled, within and between heterogeneity per label or overall.
    Decompose(DecomposeArgs),
    /// Between heterogeneity of each record's k-nearest neighbourhood.
    Neighborhoods(NeighborhoodsArgs),
    /// Generate a synthetic dataset from a JSON generator spec.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    /// Embedding dataset (.csv or .json).
    #[arg(long)]
    pub input: PathBuf,
    /// Group records by this key.
    #[arg(long, value_parser = ["label"])]
    pub group_by: Option<String>,
    /// Orders q, each in (0, inf).
    #[arg(long, default_value = "1,2")]
    pub q: String,
    #[arg(long, value_enum, default_value_t = Pooling::Parametric)]
    pub pooling: Pooling,
}

impl DecomposeArgs {
    pub fn config(&self) -> CliResult<Decompose> {
        Ok(Decompose {
            orders: parse_orders(&self.q)?,
            group_by_label: self.group_by.is_some(),
            pooling: self.pooling,
        })
    }
}

#[derive(Debug, Args)]
pub struct NeighborhoodsArgs {
    /// Embedding dataset (.csv or .json).
    #[arg(long)]
    pub input: PathBuf,
    /// Neighbours per record, excluding the record itself.
    #[arg(long, default_value_t = 49)]
    pub k: usize,
    /// Order q in (0, inf).
    #[arg(long, default_value = "1")]
    pub q: String,
    /// Number of highest and of lowest neighbourhoods to report.
    #[arg(long, default_value_t = 10)]
    pub top: usize,
}

impl NeighborhoodsArgs {
    pub fn config(&self) -> CliResult<Neighborhoods> {
        let orders = parse_orders(&self.q)?;
        let [q] = orders[..] else {
            return Err(CliError::usage("neighborhoods take a single order q"));
        };
        Ok(Neighborhoods {
            k: self.k,
            q,
            top: self.top,
        })
    }
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Generator spec (JSON).
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum AssignmentsCommand {
    /// Pooled, within and between heterogeneity of the rows.
    Rrh(RrhArgs),
}

#[derive(Debug, Args)]
pub struct RrhArgs {
    /// Assignment table (.csv or .json).
    #[arg(long)]
    pub input: PathBuf,
    /// Orders q.
    #[arg(long, default_value = "0,1,2,inf")]
    pub q: String,
}

impl RrhArgs {
    pub fn config(&self) -> CliResult<AssignmentsRrh> {
        Ok(AssignmentsRrh {
            orders: parse_orders(&self.q)?,
        })
    }
}
