//! Estimation schemes for the residual waiting time.
//!
//! Four schemes share one [`RunIndex`]:
//!
//! * `poly`: fires at `k` when the current age has recurred at least
//!   `k^(1-γ)` times; averages the last `⌈k^(1-γ)⌉` residuals.
//! * `log`: dyadic refresh. With `m = ⌊log₂ t⌋` it fires when the age recurred
//!   at some integer `ψ < i < log₂ t` and the window `(m, 2^m)` holds at
//!   least `⌈2^(m(1-γ))⌉` occurrences; averages the first that many.
//! * `offline`: at every position, the average over all earlier matches.
//! * `eps`: fires when at most `t(1-ε/2)` positions so far had a strictly
//!   smaller age; averages all earlier matches.
//!
//! Streaming implementations are `O(N)` amortized plus the size of each
//! emitted distribution. [`reference`] recomputes everything by prefix
//! scans for cross-checking.

pub mod reference;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::law::{self, RenewalLaw};
use crate::math;
use crate::tracker::{Occurrence, RunIndex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    Poly,
    Log,
    Offline,
    Eps,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 4] = [
        SchemeKind::Poly,
        SchemeKind::Log,
        SchemeKind::Offline,
        SchemeKind::Eps,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Poly => "poly",
            SchemeKind::Log => "log",
            SchemeKind::Offline => "offline",
            SchemeKind::Eps => "eps",
        }
    }
}

impl core::str::FromStr for SchemeKind {
    type Err = SchemeError;

    fn from_str(s: &str) -> Result<Self, SchemeError> {
        match s {
            "poly" => Ok(SchemeKind::Poly),
            "log" => Ok(SchemeKind::Log),
            "offline" => Ok(SchemeKind::Offline),
            "eps" => Ok(SchemeKind::Eps),
            other => Err(SchemeError::UnknownScheme(String::from(other))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SchemeError {
    #[error("gamma must lie in (0, 1), got {0}")]
    Gamma(f64),
    #[error("epsilon must lie in (0, 1), got {0}")]
    Epsilon(f64),
    #[error("unknown scheme `{0}`")]
    UnknownScheme(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub gamma: f64,
    pub epsilon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declared_alpha: Option<f64>,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        SchemeConfig {
            gamma: 0.3,
            epsilon: 0.1,
            declared_alpha: None,
        }
    }
}

impl SchemeConfig {
    pub fn with_gamma(gamma: f64) -> Self {
        SchemeConfig {
            gamma,
            ..Self::default()
        }
    }

    pub fn with_epsilon(epsilon: f64) -> Self {
        SchemeConfig {
            epsilon,
            ..Self::default()
        }
    }

    /// Checks the parameters the scheme uses and returns advisory warnings
    /// when `γ` lies outside the range where consistency is guaranteed.
    pub fn validate(&self, kind: SchemeKind) -> Result<Vec<String>, SchemeError> {
        let mut warnings = Vec::new();
        match kind {
            SchemeKind::Poly | SchemeKind::Log => {
                if !(self.gamma > 0.0 && self.gamma < 1.0) {
                    return Err(SchemeError::Gamma(self.gamma));
                }
            }
            SchemeKind::Eps => {
                if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
                    return Err(SchemeError::Epsilon(self.epsilon));
                }
            }
            SchemeKind::Offline => {}
        }
        match (kind, self.declared_alpha) {
            (SchemeKind::Poly, Some(alpha)) => match law::gamma_upper_bound(alpha) {
                Ok(bound) if self.gamma >= bound => warnings.push(format!(
                    "gamma={} is not below min(1-2/alpha, 1/3)={bound:.6} for alpha={alpha}; \
                     consistency is not guaranteed",
                    self.gamma
                )),
                Ok(_) => {}
                Err(_) => warnings.push(format!(
                    "declared alpha={alpha} does not exceed 2; the poly scheme has no guarantee"
                )),
            },
            (SchemeKind::Log, alpha) => {
                if self.gamma >= 1.0 / 3.0 {
                    warnings.push(format!(
                        "gamma={} is not below 1/3; the log scheme has no guarantee",
                        self.gamma
                    ));
                }
                if let Some(alpha) = alpha.filter(|&a| !(a > 1.0)) {
                    warnings.push(format!(
                        "declared alpha={alpha} does not exceed 1; the log scheme has no guarantee"
                    ));
                }
            }
            _ => {}
        }
        Ok(warnings)
    }
}

/// Empirical residual distribution as exact counts over `m` samples.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ResidualCounts {
    /// `(residual, count)` sorted by residual, counts positive.
    pub counts: Vec<(usize, u64)>,
    pub m: u64,
}

impl ResidualCounts {
    pub fn from_residuals<I: IntoIterator<Item = usize>>(residuals: I) -> Self {
        let mut map = BTreeMap::new();
        let mut m = 0;
        for r in residuals {
            *map.entry(r).or_insert(0u64) += 1;
            m += 1;
        }
        ResidualCounts {
            counts: map.into_iter().collect(),
            m,
        }
    }

    /// `Σ l·count_l`.
    pub fn residual_sum(&self) -> u64 {
        self.counts.iter().map(|&(l, c)| l as u64 * c).sum()
    }

    /// Mean residual, `Σ l·count_l / m`; this is the point estimate.
    pub fn mean(&self) -> f64 {
        if self.m == 0 {
            return f64::NAN;
        }
        self.residual_sum() as f64 / self.m as f64
    }

    /// Dense probability vector over `l = 0..=max`.
    pub fn to_dense(&self) -> Vec<f64> {
        let len = self.counts.last().map_or(0, |&(l, _)| l + 1);
        let mut v = vec![0.0; len];
        for &(l, c) in &self.counts {
            v[l] = c as f64 / self.m as f64;
        }
        v
    }

    /// `Σ_l |phat_l - p_{l+L}/T_L|`, computed from the sparse side only:
    /// the dense terms sum to one, so untouched entries contribute
    /// `1 - Σ_{l ∈ supp} q_l`.
    pub fn tv_to_residual(&self, law: &RenewalLaw, tau: usize) -> Result<f64, law::LawError> {
        let t = law.tail(tau);
        if t <= 0.0 {
            return Err(law::LawError::Unreachable { offset: tau });
        }
        let mut touched = 0.0;
        let mut diff = 0.0;
        for &(l, c) in &self.counts {
            let q = law.prob(tau + l) / t;
            touched += q;
            diff += (c as f64 / self.m as f64 - q).abs();
        }
        Ok(diff + (1.0 - touched).max(0.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    /// First sample position.
    pub start: usize,
    /// Last sample position.
    pub end: usize,
    pub m: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateEvent {
    /// Firing count, from 1.
    pub ordinal: usize,
    /// Firing position `λ`.
    pub lambda: usize,
    pub tau: usize,
    pub h: f64,
    pub phat: ResidualCounts,
    pub window: Window,
}

impl EstimateEvent {
    fn from_samples(ordinal: usize, lambda: usize, tau: usize, samples: &[Occurrence]) -> Self {
        let phat = ResidualCounts::from_residuals(samples.iter().map(|o| o.residual));
        Self::from_counts(
            ordinal,
            lambda,
            tau,
            phat,
            samples[0].position,
            samples[samples.len() - 1].position,
        )
    }

    fn from_counts(
        ordinal: usize,
        lambda: usize,
        tau: usize,
        phat: ResidualCounts,
        start: usize,
        end: usize,
    ) -> Self {
        EstimateEvent {
            ordinal,
            lambda,
            tau,
            h: phat.mean(),
            window: Window { start, end, m: phat.m },
            phat,
        }
    }
}

/// Sample count of the poly scheme at `λ`: `⌈λ^(1-γ)⌉`.
pub fn poly_window(lambda: usize, gamma: f64) -> u64 {
    math::ceil_pow(lambda as f64, 1.0 - gamma)
}

/// Sample count of the log scheme at `t`: `⌈2^(⌊log₂ t⌋(1-γ))⌉`.
pub fn log_window(t: usize, gamma: f64) -> u64 {
    let m = math::floor_log2(t as u64);
    math::ceil_pow(2.0, m as f64 * (1.0 - gamma))
}

/// Upper bound `λ^γ - 1` on every poly estimate.
pub fn poly_bound(lambda: usize, gamma: f64) -> f64 {
    math::pow(lambda as f64, gamma) - 1.0
}

/// Upper bound `2^(⌊log₂ λ⌋γ) - 1` stated for the log scheme.
pub fn log_bound(lambda: usize, gamma: f64) -> f64 {
    math::pow(2.0, math::floor_log2(lambda as u64) as f64 * gamma) - 1.0
}

/// Bound that always holds for the log scheme: the sampled runs are
/// disjoint segments of `(⌊log₂ λ⌋, λ]`, so `h ≤ (λ - ⌊log₂ λ⌋)/c - 1`.
pub fn log_disjoint_bound(lambda: usize, gamma: f64) -> f64 {
    let m = math::floor_log2(lambda as u64) as f64;
    (lambda as f64 - m) / log_window(lambda, gamma) as f64 - 1.0
}

/// Multiset of residuals with a running sum.
#[derive(Debug, Clone, Default)]
struct Histogram {
    counts: BTreeMap<usize, u64>,
    m: u64,
}

impl Histogram {
    fn add(&mut self, l: usize) {
        *self.counts.entry(l).or_insert(0) += 1;
        self.m += 1;
    }

    fn remove(&mut self, l: usize) {
        let c = self.counts.get_mut(&l).expect("residual present");
        *c -= 1;
        if *c == 0 {
            self.counts.remove(&l);
        }
        self.m -= 1;
    }

    fn snapshot(&self) -> ResidualCounts {
        ResidualCounts {
            counts: self.counts.iter().map(|(&l, &c)| (l, c)).collect(),
            m: self.m,
        }
    }
}

/// Histogram over occurrences `[start, end)` of one age.
#[derive(Debug, Clone, Default)]
struct Sliding {
    start: usize,
    end: usize,
    hist: Histogram,
}

impl Sliding {
    fn set(&mut self, occ: &[Occurrence], start: usize, end: usize) {
        if start >= self.end || end <= self.start {
            self.hist = Histogram::default();
            for o in &occ[start..end] {
                self.hist.add(o.residual);
            }
        } else {
            for o in &occ[self.end..end] {
                self.hist.add(o.residual);
            }
            if start > self.start {
                for o in &occ[self.start..start] {
                    self.hist.remove(o.residual);
                }
            } else {
                for o in &occ[start..self.start] {
                    self.hist.add(o.residual);
                }
            }
        }
        self.start = start;
        self.end = end;
    }
}

/// Histogram over all stored occurrences of one age.
#[derive(Debug, Clone, Default)]
struct Cumulative {
    hist: Histogram,
}

impl Cumulative {
    fn absorb(&mut self, occ: &[Occurrence]) {
        for o in &occ[self.hist.m as usize..] {
            self.hist.add(o.residual);
        }
    }
}

fn slot<T: Default>(v: &mut Vec<T>, i: usize) -> &mut T {
    if v.len() <= i {
        v.resize_with(i + 1, T::default);
    }
    &mut v[i]
}

/// Streaming polynomial-threshold scheme.
#[derive(Debug, Clone)]
pub struct PolyEstimator {
    index: RunIndex,
    gamma: f64,
    fired: usize,
    windows: Vec<Sliding>,
}

impl PolyEstimator {
    pub fn new(gamma: f64) -> Self {
        PolyEstimator {
            index: RunIndex::new(),
            gamma,
            fired: 0,
            windows: Vec::new(),
        }
    }

    pub fn index(&self) -> &RunIndex {
        &self.index
    }

    pub fn push(&mut self, bit: u8) -> Option<EstimateEvent> {
        self.index.feed(bit);
        let k = self.index.position()?;
        if k <= self.index.psi()? {
            return None;
        }
        let tau = self.index.current_tau().ok()?;
        let occ = self.index.occurrences(tau);
        let m = poly_window(k, self.gamma) as usize;
        if occ.len() < m {
            return None;
        }
        let w = slot(&mut self.windows, tau);
        w.set(occ, occ.len() - m, occ.len());
        self.fired += 1;
        Some(EstimateEvent::from_counts(
            self.fired,
            k,
            tau,
            w.hist.snapshot(),
            occ[occ.len() - m].position,
            occ[occ.len() - 1].position,
        ))
    }
}

#[derive(Debug, Clone, Default)]
struct LogBlock {
    block: Option<u32>,
    window: Option<(ResidualCounts, usize, usize)>,
}

/// Streaming dyadic-refresh scheme.
#[derive(Debug, Clone)]
pub struct LogEstimator {
    index: RunIndex,
    gamma: f64,
    fired: usize,
    cache: Vec<LogBlock>,
}

impl LogEstimator {
    pub fn new(gamma: f64) -> Self {
        LogEstimator {
            index: RunIndex::new(),
            gamma,
            fired: 0,
            cache: Vec::new(),
        }
    }

    pub fn index(&self) -> &RunIndex {
        &self.index
    }

    pub fn push(&mut self, bit: u8) -> Option<EstimateEvent> {
        self.index.feed(bit);
        let t = self.index.position()?;
        let psi = self.index.psi()?;
        if t <= psi {
            return None;
        }
        let tau = self.index.current_tau().ok()?;
        let occ = self.index.occurrences(tau);
        let first_after_psi = occ.iter().find(|o| o.position > psi)?;
        if !math::lt_log2(first_after_psi.position as u64, t as u64) {
            return None;
        }
        let m = math::floor_log2(t as u64);
        let entry = slot(&mut self.cache, tau);
        if entry.block != Some(m) {
            // the window content for this age is final once t ≥ 2^m
            let c = log_window(t, self.gamma) as usize;
            let samples = self.index.first_m_in_window(tau, m as usize, 1usize << m, c);
            entry.block = Some(m);
            entry.window = (samples.len() == c && c > 0).then(|| {
                (
                    ResidualCounts::from_residuals(samples.iter().map(|o| o.residual)),
                    samples[0].position,
                    samples[c - 1].position,
                )
            });
        }
        let (phat, start, end) = entry.window.clone()?;
        self.fired += 1;
        Some(EstimateEvent::from_counts(self.fired, t, tau, phat, start, end))
    }
}

/// Streaming ε-density scheme.
#[derive(Debug, Clone)]
pub struct EpsEstimator {
    index: RunIndex,
    epsilon: f64,
    fired: usize,
    totals: Vec<Cumulative>,
}

impl EpsEstimator {
    pub fn new(epsilon: f64) -> Self {
        EpsEstimator {
            index: RunIndex::new(),
            epsilon,
            fired: 0,
            totals: Vec::new(),
        }
    }

    pub fn index(&self) -> &RunIndex {
        &self.index
    }

    pub fn push(&mut self, bit: u8) -> Option<EstimateEvent> {
        self.index.feed(bit);
        let t = self.index.position()?;
        if t <= self.index.psi()? {
            return None;
        }
        let tau = self.index.current_tau().ok()?;
        let smaller = self.index.count_tau_less(tau).ok()?;
        if smaller as f64 > math::snap(t as f64 * (1.0 - self.epsilon / 2.0)) {
            return None;
        }
        let occ = self.index.occurrences(tau);
        if occ.is_empty() {
            // no earlier match: the estimate has a zero denominator
            return None;
        }
        let acc = slot(&mut self.totals, tau);
        acc.absorb(occ);
        self.fired += 1;
        Some(EstimateEvent::from_counts(
            self.fired,
            t,
            tau,
            acc.hist.snapshot(),
            occ[0].position,
            occ[occ.len() - 1].position,
        ))
    }
}

/// Estimate of the offline scheme at one position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OfflineEstimate {
    pub tau: usize,
    pub h: f64,
    pub phat: ResidualCounts,
    pub first: usize,
    pub last: usize,
}

/// Streaming offline scheme: an estimate at every position where the
/// current age has an earlier match.
#[derive(Debug, Clone, Default)]
pub struct OfflineEstimator {
    index: RunIndex,
    totals: Vec<Cumulative>,
}

impl OfflineEstimator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn index(&self) -> &RunIndex {
        &self.index
    }

    pub fn push(&mut self, bit: u8) -> Option<OfflineEstimate> {
        self.index.feed(bit);
        let tau = self.index.current_tau().ok()?;
        let occ = self.index.occurrences(tau);
        if occ.is_empty() {
            return None;
        }
        let acc = slot(&mut self.totals, tau);
        acc.absorb(occ);
        let phat = acc.hist.snapshot();
        Some(OfflineEstimate {
            tau,
            h: phat.mean(),
            phat,
            first: occ[0].position,
            last: occ[occ.len() - 1].position,
        })
    }
}

pub fn run_poly(bits: &[u8], config: &SchemeConfig) -> Vec<EstimateEvent> {
    let mut est = PolyEstimator::new(config.gamma);
    bits.iter().filter_map(|&b| est.push(b)).collect()
}

pub fn run_log(bits: &[u8], config: &SchemeConfig) -> Vec<EstimateEvent> {
    let mut est = LogEstimator::new(config.gamma);
    bits.iter().filter_map(|&b| est.push(b)).collect()
}

pub fn run_eps(bits: &[u8], config: &SchemeConfig) -> Vec<EstimateEvent> {
    let mut est = EpsEstimator::new(config.epsilon);
    bits.iter().filter_map(|&b| est.push(b)).collect()
}

/// Per-position offline estimates; `None` before `ψ` and wherever the
/// current age has no earlier match.
pub fn run_offline(bits: &[u8]) -> Vec<Option<OfflineEstimate>> {
    let mut est = OfflineEstimator::new();
    bits.iter().map(|&b| est.push(b)).collect()
}

/// Offline estimates as an event list, one event per defined position.
pub fn offline_events(estimates: &[Option<OfflineEstimate>]) -> Vec<EstimateEvent> {
    estimates
        .iter()
        .enumerate()
        .filter_map(|(n, e)| e.as_ref().map(|e| (n, e)))
        .enumerate()
        .map(|(i, (n, e))| EstimateEvent::from_counts(i + 1, n, e.tau, e.phat.clone(), e.first, e.last))
        .collect()
}

/// Runs any scheme to an event list.
pub fn run_scheme(kind: SchemeKind, bits: &[u8], config: &SchemeConfig) -> Vec<EstimateEvent> {
    match kind {
        SchemeKind::Poly => run_poly(bits, config),
        SchemeKind::Log => run_log(bits, config),
        SchemeKind::Eps => run_eps(bits, config),
        SchemeKind::Offline => offline_events(&run_offline(bits)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn periodic(n: usize) -> Vec<u8> {
        (0..n).map(|i| u8::from(i % 3 != 0)).collect()
    }

    fn lambdas(events: &[EstimateEvent]) -> Vec<usize> {
        events.iter().map(|e| e.lambda).collect()
    }

    #[test]
    fn poly_alternating_first_firing() {
        let ev = run_poly(&[0, 1, 0, 1, 0, 1, 0], &SchemeConfig::with_gamma(0.5));
        let first = &ev[0];
        assert_eq!(first.lambda, 4);
        assert_eq!(first.tau, 0);
        assert_eq!(first.window, Window { start: 0, end: 2, m: 2 });
        assert_eq!(first.h, 1.0);
        assert_eq!(first.phat.counts, vec![(1, 2)]);
    }

    #[test]
    fn poly_periodic_firings() {
        let ev = run_poly(&periodic(100), &SchemeConfig::with_gamma(0.5));
        let mut expect = vec![9];
        expect.extend(12..100);
        assert_eq!(lambdas(&ev), expect);
        assert_eq!(ev[0].window.m, 3);
        assert_eq!(ev[0].window.start, 0);
        assert_eq!(ev[0].h, 2.0);
        for e in &ev {
            assert_eq!(e.h, (2 - e.tau) as f64);
            assert_eq!(e.window.m, poly_window(e.lambda, 0.5));
        }
    }

    #[test]
    fn poly_single_run_never_fires() {
        assert!(run_poly(&[0, 1, 1, 1, 1], &SchemeConfig::with_gamma(0.5)).is_empty());
    }

    #[test]
    fn log_periodic_trace() {
        let ev = run_log(&periodic(40), &SchemeConfig::with_gamma(0.5));
        // t = 17: τ = 2, age 2 seen at i = 2 < log₂ 17, window (4,16) holds 5, 8, 11, 14
        assert_eq!(ev[0].lambda, 17);
        assert_eq!(ev[0].tau, 2);
        assert_eq!(ev[0].h, 0.0);
        assert_eq!(ev[1].lambda, 18);
        assert_eq!(ev[1].tau, 0);
        assert_eq!(ev[1].window, Window { start: 6, end: 15, m: 4 });
        assert_eq!(ev[1].h, 2.0);
        assert_eq!(ev[1].phat.counts, vec![(2, 4)]);
        assert_eq!(ev[2].lambda, 20);
        assert_eq!(ev[2].window, Window { start: 5, end: 14, m: 4 });
        assert_eq!(ev[2].h, 0.0);
        for e in &ev {
            assert!(e.window.end < 1 << math::floor_log2(e.lambda as u64));
        }
    }

    #[test]
    fn log_never_fires_early() {
        let bits = vec![0u8; 3];
        assert!(run_log(&bits, &SchemeConfig::with_gamma(0.5)).is_empty());
    }

    #[test]
    fn offline_trace() {
        let est = run_offline(&[0, 1, 0, 1, 1]);
        assert_eq!(est[0], None);
        assert_eq!(est[3].as_ref().unwrap().h, 0.0);
        assert_eq!(est[3].as_ref().unwrap().tau, 1);
        assert_eq!(est[4], None);
        let est = run_offline(&periodic(7));
        let e6 = est[6].as_ref().unwrap();
        assert_eq!(e6.h, 2.0);
        assert_eq!(e6.phat.counts, vec![(2, 2)]);
    }

    #[test]
    fn eps_periodic_trace() {
        let ev = run_eps(&periodic(12), &SchemeConfig::with_epsilon(0.5));
        assert_eq!(&lambdas(&ev)[..5], &[3, 4, 6, 7, 8]);
        assert_eq!(ev[0].h, 2.0);
        assert_eq!(ev[1].h, 1.0);
    }

    #[test]
    fn eps_all_zeros_fires_everywhere() {
        let ev = run_eps(&[0u8; 50], &SchemeConfig::with_epsilon(0.3));
        assert_eq!(lambdas(&ev), (1..50).collect::<Vec<_>>());
        assert!(ev.iter().all(|e| e.h == 0.0));
    }

    #[test]
    fn eps_rare_maximal_age_does_not_fire() {
        // long run: ages grow, smaller-age count approaches t
        let mut bits = vec![0u8, 1, 0, 1, 0];
        bits.extend(core::iter::repeat(1).take(20));
        let ev = run_eps(&bits, &SchemeConfig::with_epsilon(0.1));
        assert!(ev.iter().all(|e| e.lambda < 7));
    }

    #[test]
    fn events_mean_equals_h() {
        for kind in SchemeKind::ALL {
            for e in run_scheme(kind, &periodic(200), &SchemeConfig::with_gamma(0.5)) {
                assert_eq!(e.h, e.phat.mean());
                assert_eq!(e.phat.counts.iter().map(|c| c.1).sum::<u64>(), e.phat.m);
            }
        }
    }

    #[test]
    fn config_validation() {
        let c = SchemeConfig {
            gamma: 0.5,
            epsilon: 0.1,
            declared_alpha: Some(3.0),
        };
        assert_eq!(c.validate(SchemeKind::Poly).unwrap().len(), 1);
        assert_eq!(c.validate(SchemeKind::Log).unwrap().len(), 1);
        assert!(SchemeConfig::with_gamma(0.2).validate(SchemeKind::Poly).unwrap().is_empty());
        assert!(SchemeConfig::with_gamma(1.0).validate(SchemeKind::Poly).is_err());
        assert!(SchemeConfig::with_gamma(1.0).validate(SchemeKind::Eps).is_ok());
        assert!(SchemeConfig::with_epsilon(0.0).validate(SchemeKind::Eps).is_err());
        assert_eq!("eps".parse::<SchemeKind>(), Ok(SchemeKind::Eps));
        assert!("nope".parse::<SchemeKind>().is_err());
    }

    #[test]
    fn tv_sparse_matches_dense() {
        let law = crate::law::LawSpec::Geometric { q: 0.5, truncate: Some(30) }.build().unwrap();
        let phat = ResidualCounts::from_residuals([0, 0, 1, 3, 3, 3, 7]);
        for tau in [0, 2, 10] {
            let dense = law::tv_l1(&phat.to_dense(), &law.residual_law(tau).unwrap().probs);
            let sparse = phat.tv_to_residual(&law, tau).unwrap();
            assert!((dense - sparse).abs() < 1e-12);
        }
        assert!(phat.tv_to_residual(&law, 31).is_err());
    }
}
