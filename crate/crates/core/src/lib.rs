//! Universal estimators for binary renewal processes.
//!
//! A binary renewal process emits `0` at renewals and `1` otherwise; the
//! lengths of the runs of ones between successive zeros are i.i.d. with a
//! law `{p_k}`. This crate holds the pure algorithmic pieces:
//!
//! * [`law`]: exact arithmetic on finite-support renewal laws.
//! * [`path`]: seeded path generation from the underlying Markov chain.
//! * [`tracker`]: a streaming index of run ages, occurrences and residuals.
//! * [`estimators`]: the four estimation schemes plus quadratic references.
//! * [`evaluation`]: scoring against the ground-truth law.
//! * [`adversary`]: finite stages of the perturbation construction that
//!   fools density-one stopping-time estimators.
//!
//! The crate is `no_std` and only needs `alloc`. IO, file formats and the
//! command line live in the `renewal-workbench` crate.
#![no_std]

extern crate alloc;

pub mod adversary;
pub mod estimators;
pub mod evaluation;
pub mod fenwick;
pub mod law;
pub mod math;
pub mod path;
pub mod rng;
pub mod tracker;

pub use estimators::{EstimateEvent, ResidualCounts, SchemeConfig, SchemeKind};
pub use law::{LawError, LawSpec, RenewalLaw, ResidualLaw};
pub use path::{Path, StartMode};
pub use tracker::RunIndex;
