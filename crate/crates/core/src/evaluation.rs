//! Scoring scheme output against the ground-truth law.
//!
//! `θ` at a position with run age `t` is `μ_t`; it is evaluated only at
//! positions after `ψ`, where the age is observed.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::estimators::{self, EstimateEvent, OfflineEstimate, SchemeConfig, SchemeKind};
use crate::law::{LawError, RenewalLaw};
use crate::math;
use crate::path::{self, StartMode};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("event at {lambda} has age {tau}, impossible under the law: {source}")]
    ImpossibleAge {
        lambda: usize,
        tau: usize,
        source: LawError,
    },
}

/// Ground-truth conditional mean residual at age `t`.
pub fn theta_oracle(law: &RenewalLaw, t: usize) -> Result<f64, LawError> {
    law.mu_l(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoredEvent {
    pub n: usize,
    pub lambda: usize,
    pub tau: usize,
    pub h: f64,
    pub theta: f64,
    pub abs_err: f64,
    pub tv: f64,
}

pub fn score_event(law: &RenewalLaw, e: &EstimateEvent) -> Result<ScoredEvent, EvalError> {
    let wrap = |source| EvalError::ImpossibleAge {
        lambda: e.lambda,
        tau: e.tau,
        source,
    };
    let theta = theta_oracle(law, e.tau).map_err(wrap)?;
    let tv = e.phat.tv_to_residual(law, e.tau).map_err(wrap)?;
    Ok(ScoredEvent {
        n: e.ordinal,
        lambda: e.lambda,
        tau: e.tau,
        h: e.h,
        theta,
        abs_err: (e.h - theta).abs(),
        tv,
    })
}

pub fn score_events(law: &RenewalLaw, events: &[EstimateEvent]) -> Result<Vec<ScoredEvent>, EvalError> {
    events.iter().map(|e| score_event(law, e)).collect()
}

/// `|{events with λ ≤ N}| / N`.
pub fn firing_density(events: &[EstimateEvent], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    events.iter().filter(|e| e.lambda <= n).count() as f64 / n as f64
}

/// Fraction of positions `0..=N` where the offline estimate is defined and
/// both its point error and its variation distance are within `tolerance`.
pub fn good_index_density(
    estimates: &[Option<OfflineEstimate>],
    law: &RenewalLaw,
    tolerance: f64,
    n: usize,
) -> Result<f64, EvalError> {
    let mut good = 0usize;
    for (pos, est) in estimates.iter().enumerate().take(n + 1) {
        let Some(e) = est else { continue };
        let wrap = |source| EvalError::ImpossibleAge {
            lambda: pos,
            tau: e.tau,
            source,
        };
        let theta = theta_oracle(law, e.tau).map_err(wrap)?;
        if (e.h - theta).abs() > tolerance {
            continue;
        }
        if e.phat.tv_to_residual(law, e.tau).map_err(wrap)? <= tolerance {
            good += 1;
        }
    }
    Ok(good as f64 / (n + 1) as f64)
}

/// The final decile of a replicate's events, by firing order.
pub fn terminal_window(records: &[ScoredEvent]) -> &[ScoredEvent] {
    let take = records.len().div_ceil(10);
    &records[records.len() - take..]
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Aggregates {
    pub events: usize,
    pub median_abs_err: Option<f64>,
    pub p90_abs_err: Option<f64>,
    pub median_tv: Option<f64>,
    pub p90_tv: Option<f64>,
}

/// Median and 90th percentile (linear interpolation) of a pooled set of
/// scored events.
pub fn aggregate<'a, I: IntoIterator<Item = &'a ScoredEvent>>(records: I) -> Aggregates {
    let (mut err, mut tv): (Vec<f64>, Vec<f64>) =
        records.into_iter().map(|r| (r.abs_err, r.tv)).unzip();
    err.sort_by(f64::total_cmp);
    tv.sort_by(f64::total_cmp);
    Aggregates {
        events: err.len(),
        median_abs_err: math::quantile_sorted(&err, 0.5),
        p90_abs_err: math::quantile_sorted(&err, 0.9),
        median_tv: math::quantile_sorted(&tv, 0.5),
        p90_tv: math::quantile_sorted(&tv, 0.9),
    }
}

/// Aggregates over the terminal windows of several replicates.
pub fn aggregate_terminal<'a, I: IntoIterator<Item = &'a [ScoredEvent]>>(replicates: I) -> Aggregates {
    let pooled: Vec<ScoredEvent> = replicates
        .into_iter()
        .flat_map(|r| terminal_window(r).iter().copied())
        .collect();
    aggregate(&pooled)
}

/// Good-index density measured at one tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoodIndexDensity {
    pub tolerance: f64,
    pub density: f64,
}

/// One replicate's scored output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateResult {
    pub replicate: usize,
    pub seed: u64,
    pub events: Vec<ScoredEvent>,
    pub firing_density: f64,
    #[serde(default)]
    pub good_index: Vec<GoodIndexDensity>,
}

/// Parameters shared by every replicate of an experiment.
#[derive(Debug, Clone, Copy)]
pub struct ReplicatePlan<'a> {
    pub law: &'a RenewalLaw,
    pub scheme: SchemeKind,
    pub config: &'a SchemeConfig,
    pub length: usize,
    pub mode: StartMode,
    pub tolerances: &'a [f64],
}

/// Generates one path (positions `0..=N`), runs the scheme and scores it.
/// Good-index densities are measured for the offline scheme only.
pub fn evaluate_replicate(
    plan: &ReplicatePlan<'_>,
    replicate: usize,
    seed: u64,
) -> Result<ReplicateResult, EvalError> {
    let p = path::sample_path(plan.law, plan.length, plan.mode, seed);
    let (events, good_index) = if plan.scheme == SchemeKind::Offline {
        let est = estimators::run_offline(&p.bits);
        let good = plan
            .tolerances
            .iter()
            .map(|&tolerance| {
                good_index_density(&est, plan.law, tolerance, plan.length)
                    .map(|density| GoodIndexDensity { tolerance, density })
            })
            .collect::<Result<Vec<_>, _>>()?;
        (estimators::offline_events(&est), good)
    } else {
        (estimators::run_scheme(plan.scheme, &p.bits, plan.config), Vec::new())
    };
    Ok(ReplicateResult {
        replicate,
        seed,
        firing_density: firing_density(&events, plan.length),
        events: score_events(plan.law, &events)?,
        good_index,
    })
}
