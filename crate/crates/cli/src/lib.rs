//! Command-line front end for `hetlab`: parameter sweeps, embedding and
//! assignment ingestion, synthetic data and tabular output.

pub mod args;
pub mod assignments;
pub mod dataset;
mod error;
pub mod grid;
pub mod latent;
pub mod number;
pub mod output;
pub mod sweeps;
pub mod synth;

use std::path::Path;

pub use args::Cli;
pub use error::{CliError, CliResult};

use args::{AssignmentsCommand, Command, EmbeddingsCommand};
use assignments::AssignmentTable;
use dataset::EmbeddingDataset;
use synth::SynthSpec;

pub const THREADS_ENV: &str = "HETLAB_THREADS";

/// Worker count from `HETLAB_THREADS`; unset or 0 means one per core.
pub fn thread_count() -> CliResult<usize> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(0),
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("{THREADS_ENV} must be a non-negative integer, got {v:?}"))),
    }
}

/// Runs one command and returns the rendered output.
pub fn execute(cli: &Cli) -> CliResult<String> {
    let format = cli.format;
    Ok(match &cli.command {
        Command::ThreeStateSweep(a) => a.config()?.run()?.render(format),
        Command::BmmSweep(a) => a.config()?.run()?.render(format),
        Command::Embeddings(EmbeddingsCommand::Decompose(a)) => {
            let config = a.config()?;
            config.run(&EmbeddingDataset::read(&a.input)?)?.render(format)
        }
        Command::Embeddings(EmbeddingsCommand::Neighborhoods(a)) => {
            let config = a.config()?;
            config.run(&EmbeddingDataset::read(&a.input)?)?.render(format)
        }
        Command::Embeddings(EmbeddingsCommand::Synth(a)) => {
            synth::generate(&SynthSpec::read(&a.spec)?, a.seed)?.render(format)
        }
        Command::Assignments(AssignmentsCommand::Rrh(a)) => {
            let config = a.config()?;
            config.run(&AssignmentTable::read(&a.input)?)?.render(format)
        }
    })
}

/// Runs one command on a pool sized by `HETLAB_THREADS` and writes the output.
pub fn run(cli: &Cli) -> CliResult<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count()?)
        .build()
        .map_err(|e| CliError::usage(format!("thread pool: {e}")))?;
    let text = pool.install(|| execute(cli))?;
    match &cli.out {
        Some(path) => write_file(path, &text),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}
