//! File formats, the Monte Carlo harness and the `renewal` command line
//! on top of `renewal-core`.

pub mod audit;
pub mod cli;
pub mod config;
pub mod dump;
pub mod experiment;
pub mod report;
pub mod selftest;

pub use config::{ConfigError, ExperimentConfig};
pub use experiment::{run_experiment, EvalReport};
pub use report::{emit_report, Format};
