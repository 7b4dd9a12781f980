//! Declarative experiments producing self-describing CSV tables.

mod config;
mod result;
mod runners;
mod sampling;

use std::time::Instant;

pub use config::{
    EstimatorName, ExperimentConfig, ExperimentKind, Grid, InitialName, Mode, Parameters,
    SamplerName, OUTPUT_DIR_ENV,
};
pub use result::ExperimentResult;
pub use runners::{auto_cycles, cycle_grid, window_cycles, EP_FALLBACK_CYCLES, MAX_AUTO_CYCLES};

use crate::error::Result;

/// Validates and runs `config` without touching the filesystem.
pub fn execute(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let start = Instant::now();
    let table = runners::run(config)?;
    let mut metadata = vec![("rows".to_string(), table.rows.len().to_string())];
    metadata.extend(table.metadata);
    Ok(ExperimentResult {
        config: config.clone(),
        columns: table.columns.into_iter().map(String::from).collect(),
        rows: table.rows,
        metadata,
        attempts: table.attempts,
        wall_time: start.elapsed(),
    })
}

/// [`execute`], then write the table to [`ExperimentConfig::output_path`].
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    let result = execute(config)?;
    result.write(&config.output_path())?;
    Ok(result)
}
