//! Experiment driver: typed configurations, a fixed registry of
//! experiments, and deterministic CSV/JSON tables.

pub mod config;
pub mod error;
pub mod experiments;
pub mod table;

pub use config::{ExperimentConfig, Format};
pub use error::CliError;
pub use experiments::{execute, lookup, plan, validate, ExperimentInfo, Plan, KEYS, REGISTRY};
pub use table::{Cell, ColumnType, ResultTable, VERSION};

/// Runs the experiment and writes its table to `output_path` when one is
/// set.
pub fn run(config: &ExperimentConfig) -> Result<ResultTable, CliError> {
    let table = execute(config)?;
    if let Some(path) = &config.output_path {
        table::write_atomic(path, &table.render(config.format)?)?;
    }
    Ok(table)
}
