//! Seeded, schedule-independent Monte Carlo runs.

use rayon::prelude::*;
use renewal_core::evaluation::{
    self, Aggregates, EvalError, GoodIndexDensity, ReplicatePlan, ReplicateResult,
};
use renewal_core::math;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{ConfigError, ExperimentConfig};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Medians over replicates of the per-replicate densities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensitySummary {
    pub firing_median: f64,
    #[serde(default)]
    pub good_index_median: Vec<GoodIndexDensity>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub config: ExperimentConfig,
    pub law_provenance: String,
    #[serde(default)]
    pub warnings: Vec<String>,
    pub replicates: Vec<ReplicateResult>,
    /// Over the final decile of each replicate's events, pooled.
    pub terminal: Aggregates,
    pub densities: DensitySummary,
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    math::quantile_sorted(&xs, 0.5).unwrap_or(0.0)
}

impl EvalReport {
    fn summarize(config: ExperimentConfig, law_provenance: String, warnings: Vec<String>, replicates: Vec<ReplicateResult>) -> Self {
        let terminal = evaluation::aggregate_terminal(replicates.iter().map(|r| r.events.as_slice()));
        let firing_median = median(replicates.iter().map(|r| r.firing_density).collect());
        let good_index_median = config
            .tolerances
            .iter()
            .enumerate()
            .filter(|_| replicates.iter().all(|r| !r.good_index.is_empty()))
            .map(|(i, &tolerance)| GoodIndexDensity {
                tolerance,
                density: median(replicates.iter().map(|r| r.good_index[i].density).collect()),
            })
            .collect();
        EvalReport {
            config,
            law_provenance,
            warnings,
            replicates,
            terminal,
            densities: DensitySummary {
                firing_median,
                good_index_median,
            },
        }
    }
}

/// Runs every replicate (in parallel) and aggregates; the result depends on
/// the config alone.
pub fn run_experiment(config: &ExperimentConfig) -> Result<EvalReport, ExperimentError> {
    let (law, warnings) = config.validate()?;
    let plan = ReplicatePlan {
        law: &law,
        scheme: config.scheme,
        config: &config.params,
        length: config.length,
        mode: config.mode,
        tolerances: &config.tolerances,
    };
    let replicates = (0..config.replicates)
        .into_par_iter()
        .map(|r| evaluation::evaluate_replicate(&plan, r, config.replicate_seed(r)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(EvalReport::summarize(
        config.clone(),
        law.provenance().to_string(),
        warnings,
        replicates,
    ))
}
