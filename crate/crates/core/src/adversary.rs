//! Finite-stage adversarial construction against a pluggable scheme.
//!
//! Stage `j` holds a run-length law `p^{(j)}` and markers
//! `L_0 < N_1 < L_1 < … < N_j`. Advancing picks `L_j`, a horizon `N_{j+1}`
//! on which the scheme has already committed to an estimate close to the
//! current `μ_{L_j}`, and then a perturbation `(δ, k)` that moves mass from
//! `p_0` to `p_k`. The perturbation leaves short prefixes almost unchanged
//! but raises `μ_{L_j}` by more than 2, so the committed estimate now falls
//! short of the truth by at least 1.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::estimators::{self, EstimateEvent, SchemeConfig, SchemeKind};
use crate::law::{LawError, LawSpec, RenewalLaw, MAX_SUPPORT};
use crate::math;
use crate::path::{self, StartMode};
use crate::rng;

/// Largest prefix length handled by exact enumeration.
pub const MAX_EXACT_TV: usize = 20;

/// Two-sided 95% normal quantile for Wilson intervals.
const Z95: f64 = 1.96;

/// Required shift of the conditional mean at the new marker.
const REQUIRED_SHIFT: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    RunAge,
    Horizon,
    Perturbation,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Constraint::RunAge => "run-age marker L",
            Constraint::Horizon => "horizon N",
            Constraint::Perturbation => "perturbation (k, delta)",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AdversaryError {
    #[error("search budget exhausted on {constraint}: {detail}")]
    BudgetExhausted { constraint: Constraint, detail: String },
    #[error("stage cap {cap} reached")]
    StageCap { cap: usize },
    #[error("exact prefix enumeration supports N <= {MAX_EXACT_TV}, got {0}")]
    TooLong(usize),
    #[error("closed form needs k >= L, got k = {k}, L = {l}")]
    TargetBelowAge { k: usize, l: usize },
    #[error("at least 100 replicates are required, got {0}")]
    TooFewReps(usize),
    #[error("fooling window ({lo}, {hi}) is empty")]
    EmptyWindow { lo: usize, hi: usize },
    #[error("verification needs stage >= 1")]
    StageZero,
    #[error(transparent)]
    Law(#[from] LawError),
}

/// Produces a scheme's events on a path. Implemented by [`Scheme`] and by
/// any `Fn(&[u8]) -> Vec<EstimateEvent>`, so stubs can be plugged in.
pub trait SchemeRunner {
    fn run(&self, bits: &[u8]) -> Vec<EstimateEvent>;
}

impl<F: Fn(&[u8]) -> Vec<EstimateEvent>> SchemeRunner for F {
    fn run(&self, bits: &[u8]) -> Vec<EstimateEvent> {
        self(bits)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scheme {
    pub kind: SchemeKind,
    pub config: SchemeConfig,
}

impl SchemeRunner for Scheme {
    fn run(&self, bits: &[u8]) -> Vec<EstimateEvent> {
        estimators::run_scheme(self.kind, bits, &self.config)
    }
}

/// `k·δ`, the shift of the mean run length under [`RenewalLaw::perturb`].
pub fn mean_shift(delta: f64, k: usize) -> f64 {
    k as f64 * delta
}

/// Closed-form change of `μ_L` under `perturb(δ, k)`:
/// `kδ/(β+δ) − δ Σ_{i≥L} i p_i / (β(β+δ))` with `β = T_L`.
///
/// At `L = 0` the removed mass sits inside the conditioning set, `T_0`
/// does not change and the shift is the plain mean shift `kδ`.
pub fn mu_l_shift(law: &RenewalLaw, l: usize, delta: f64, k: usize) -> Result<f64, AdversaryError> {
    if k < l {
        return Err(AdversaryError::TargetBelowAge { k, l });
    }
    let beta = law.tail(l);
    if beta <= 0.0 {
        return Err(LawError::Unreachable { offset: l }.into());
    }
    if l == 0 {
        return Ok(mean_shift(delta, k));
    }
    let s = law.conditional_run_mean(l)? * beta;
    Ok(k as f64 * delta / (beta + delta) - delta * s / (beta * (beta + delta)))
}

/// Exact `Σ |P_a(x) − P_b(x)|` over strings `x_0 … x_N` with `x_0 = 0`.
/// A string's probability is the product of `p_r` over its completed runs
/// and `T_r` for the trailing run.
pub fn tv_prefix_exact(a: &RenewalLaw, b: &RenewalLaw, n: usize) -> Result<f64, AdversaryError> {
    if n > MAX_EXACT_TV {
        return Err(AdversaryError::TooLong(n));
    }
    fn walk(a: &RenewalLaw, b: &RenewalLaw, left: usize, run: usize, pa: f64, pb: f64) -> f64 {
        if pa == 0.0 && pb == 0.0 {
            return 0.0;
        }
        if left == 0 {
            return (pa * a.tail(run) - pb * b.tail(run)).abs();
        }
        walk(a, b, left - 1, 0, pa * a.prob(run), pb * b.prob(run))
            + walk(a, b, left - 1, run + 1, pa, pb)
    }
    Ok(walk(a, b, n, 0, 1.0, 1.0))
}

/// Expected number of zeros at positions `0..n` for a path started at a
/// renewal, from `u_0 = 1`, `u_m = Σ_k p_k u_{m-k-1}`.
pub fn expected_renewals(law: &RenewalLaw, n: usize) -> f64 {
    let mut u = vec![0.0; n];
    if n == 0 {
        return 0.0;
    }
    u[0] = 1.0;
    let probs = law.probs();
    for m in 1..n {
        let reach = probs.len().min(m);
        u[m] = (0..reach).map(|k| probs[k] * u[m - k - 1]).sum();
    }
    u.iter().sum()
}

/// Coupling bound on the prefix distance after `perturb(δ, ·)`: each run
/// drawn from a zero in `0..n` differs with probability `δ`.
pub fn tv_prefix_bound(law: &RenewalLaw, delta: f64, n: usize) -> f64 {
    2.0 * delta * expected_renewals(law, n)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoolingWindow {
    /// Required run age, also the exclusive lower bound on `λ`.
    pub age: usize,
    /// Exclusive upper bound on `λ`.
    pub horizon: usize,
    pub target_mu: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoolingEstimate {
    pub est: f64,
    pub ci: (f64, f64),
    pub hits: usize,
    pub reps: usize,
    /// Replicates with a firing at the right age in every window,
    /// regardless of its value.
    pub covered: usize,
    pub never_fired: bool,
}

/// Wilson score interval at 95%.
pub fn wilson_interval(hits: usize, reps: usize) -> (f64, f64) {
    if reps == 0 {
        return (0.0, 1.0);
    }
    let n = reps as f64;
    let p = hits as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * math::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Probability that, on one path started at a renewal, every window has a
/// firing with `age < λ < horizon`, `τ = age` and `h < target_mu − 1`.
pub fn joint_fooling_probability<S: SchemeRunner + ?Sized>(
    law: &RenewalLaw,
    scheme: &S,
    windows: &[FoolingWindow],
    reps: usize,
    seed: u64,
) -> Result<FoolingEstimate, AdversaryError> {
    if reps < 100 {
        return Err(AdversaryError::TooFewReps(reps));
    }
    for w in windows {
        if w.horizon <= w.age + 1 {
            return Err(AdversaryError::EmptyWindow { lo: w.age, hi: w.horizon });
        }
    }
    let last = windows.iter().map(|w| w.horizon - 1).max().unwrap_or(0);
    let mut hits = 0;
    let mut covered = 0;
    let mut any = false;
    for r in 0..reps {
        let p = path::sample_path(law, last, StartMode::AtRenewal, rng::derive_seed(seed, r as u64));
        let events = scheme.run(&p.bits);
        let mut all_fired = true;
        let mut all_fooled = true;
        for w in windows {
            let mut fired = false;
            let mut fooled = false;
            for e in events
                .iter()
                .filter(|e| e.lambda > w.age && e.lambda < w.horizon && e.tau == w.age)
            {
                fired = true;
                if e.h < w.target_mu - 1.0 {
                    fooled = true;
                    break;
                }
            }
            any |= fired;
            all_fired &= fired;
            all_fooled &= fooled;
        }
        covered += usize::from(all_fired);
        hits += usize::from(all_fooled);
    }
    Ok(FoolingEstimate {
        est: hits as f64 / reps as f64,
        ci: wilson_interval(hits, reps),
        hits,
        reps,
        covered,
        never_fired: !any,
    })
}

/// Single-window form of [`joint_fooling_probability`].
pub fn fooling_probability<S: SchemeRunner + ?Sized>(
    law: &RenewalLaw,
    scheme: &S,
    window: (usize, usize),
    target_mu: f64,
    reps: usize,
    seed: u64,
) -> Result<FoolingEstimate, AdversaryError> {
    let w = FoolingWindow {
        age: window.0,
        horizon: window.1,
        target_mu,
    };
    joint_fooling_probability(law, scheme, &[w], reps, seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TvAudit {
    pub exact_n: usize,
    pub value: f64,
    /// Coupling bound at the full horizon.
    pub analytic: f64,
    pub bound: f64,
}

/// Record of one advancement `j → j+1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageAudit {
    pub stage: usize,
    pub age: usize,
    pub horizon: usize,
    pub delta: f64,
    pub k: usize,
    /// Measured on the pre-perturbation law during the horizon search.
    pub fooling: FoolingEstimate,
    pub tv: TvAudit,
    pub mean: f64,
    pub mean_shift: f64,
    pub mu_shift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageState {
    pub stage: usize,
    /// `law_0 … law_j`; the last entry is the current law.
    pub laws: Vec<RenewalLaw>,
    /// `L_0, N_1, L_1, N_2, …, N_j`.
    pub markers: Vec<usize>,
    pub audit: Vec<StageAudit>,
}

impl StageState {
    pub fn law(&self) -> &RenewalLaw {
        self.laws.last().expect("a stage always holds its law")
    }

    /// `L_0 … L_{j-1}` (just `L_0` at stage 0).
    pub fn ages(&self) -> Vec<usize> {
        self.markers.iter().step_by(2).copied().collect()
    }

    /// `N_1 … N_j`.
    pub fn horizons(&self) -> Vec<usize> {
        self.markers.iter().skip(1).step_by(2).copied().collect()
    }

    /// Fooling windows of stages `1..=j` evaluated under the current law.
    pub fn windows(&self) -> Result<Vec<FoolingWindow>, AdversaryError> {
        let law = self.law();
        self.ages()
            .into_iter()
            .zip(self.horizons())
            .map(|(age, horizon)| {
                Ok(FoolingWindow {
                    age,
                    horizon,
                    target_mu: law.mu_l(age)?,
                })
            })
            .collect()
    }
}

/// `M^{(0)}`: `p_i = 2^{-(i+1)}` on `0..=k_max`, renormalized, with `L_0 = 0`.
pub fn stage0(k_max: usize) -> Result<StageState, AdversaryError> {
    let law = LawSpec::Geometric {
        q: 0.5,
        truncate: Some(k_max),
    }
    .build()?;
    Ok(StageState {
        stage: 0,
        laws: vec![law],
        markers: vec![0],
        audit: Vec::new(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Budgets {
    pub max_stage: usize,
    /// Largest run-age marker examined.
    pub max_age: usize,
    /// Number of doubling steps for the horizon.
    pub horizon_doublings: u32,
    pub max_horizon: usize,
    /// Monte Carlo replicates per horizon candidate.
    pub search_reps: usize,
    /// Halvings of `δ`, starting from `p_0 / 8`.
    pub delta_halvings: u32,
    pub seed: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            max_stage: 3,
            max_age: 1 << 20,
            horizon_doublings: 16,
            max_horizon: 1 << 16,
            search_reps: 2000,
            delta_halvings: 60,
            seed: 0x5eed_ad5e,
        }
    }
}

impl Budgets {
    /// No search iterations at all; useful for exercising the exhaustion path.
    pub fn exhausted() -> Self {
        Budgets {
            horizon_doublings: 0,
            delta_halvings: 0,
            ..Budgets::default()
        }
    }
}

fn exhausted(constraint: Constraint, detail: String) -> AdversaryError {
    AdversaryError::BudgetExhausted { constraint, detail }
}

fn pow_neg(base: f64, exp: usize) -> f64 {
    math::pow(base, -(exp as f64))
}

/// `K` of the monotonicity condition: the largest conditional mean run
/// length `Σ_{h≥L} h p_h / T_L` over earlier markers.
fn monotonicity_floor(law: &RenewalLaw, ages: &[usize]) -> Result<f64, AdversaryError> {
    let mut k = f64::NEG_INFINITY;
    for &l in ages {
        k = k.max(law.conditional_run_mean(l)?);
    }
    Ok(k)
}

/// Smallest `k ≥ max(L, 1)` with `k > floor` and a `μ_L` shift above 2.
fn smallest_target(law: &RenewalLaw, l: usize, delta: f64, floor: f64) -> Result<usize, AdversaryError> {
    let beta = law.tail(l);
    let need = if l == 0 {
        REQUIRED_SHIFT / delta
    } else {
        let s = law.conditional_run_mean(l)? * beta;
        (REQUIRED_SHIFT + delta * s / (beta * (beta + delta))) * (beta + delta) / delta
    };
    let mut k = l.max(1);
    if need.is_finite() && need > 0.0 {
        k = k.max(math::floor(need).min(MAX_SUPPORT as f64 + 1.0) as usize);
    }
    if floor.is_finite() && floor >= 0.0 {
        k = k.max(math::floor(floor) as usize + 1);
    }
    while k <= MAX_SUPPORT && mu_l_shift(law, l, delta, k)? <= REQUIRED_SHIFT {
        k += 1;
    }
    Ok(k)
}

/// One inductive step `j → j+1`.
pub fn advance_stage<S: SchemeRunner + ?Sized>(
    stage: &StageState,
    scheme: &S,
    budgets: &Budgets,
) -> Result<StageState, AdversaryError> {
    let j = stage.stage;
    if j >= budgets.max_stage {
        return Err(AdversaryError::StageCap { cap: budgets.max_stage });
    }
    let law = stage.law();
    let level = j + 1;

    // Run-age marker.
    let age = if j == 0 {
        0
    } else {
        let last = *stage.markers.last().expect("markers are never empty");
        let bound = pow_neg(100.0, level);
        let mut l = last + 1;
        while l <= budgets.max_age && 3.0 * law.tail(l) >= bound {
            l += 1;
        }
        if l > budgets.max_age {
            return Err(exhausted(
                Constraint::RunAge,
                format!("no L in ({last}, {}] with 3 T_L < {bound:e}", budgets.max_age),
            ));
        }
        if law.tail(l) <= 0.0 {
            return Err(exhausted(
                Constraint::RunAge,
                format!("T_{l} = 0; age {l} is unreachable under the current law"),
            ));
        }
        l
    };

    // Horizon: the scheme must already be within reach of the current μ_L.
    let mu = law.mu_l(age)?;
    let goal = 1.0 - pow_neg(1000.0, level);
    let search_seed = rng::derive_seed(budgets.seed, level as u64);
    let mut horizon = (age + 2).next_power_of_two();
    let mut chosen = None;
    let mut best: Option<(usize, FoolingEstimate)> = None;
    for _ in 0..budgets.horizon_doublings {
        if horizon > budgets.max_horizon {
            break;
        }
        let f = fooling_probability(
            law,
            scheme,
            (age, horizon),
            mu + REQUIRED_SHIFT,
            budgets.search_reps,
            search_seed,
        )?;
        if f.est >= goal {
            chosen = Some((horizon, f));
            break;
        }
        best = Some((horizon, f));
        horizon *= 2;
    }
    let Some((horizon, fooling)) = chosen else {
        let detail = match best {
            Some((n, f)) => format!(
                "fooling estimate {:.5} (covered {}/{}) at N = {n} below {goal}",
                f.est, f.covered, f.reps
            ),
            None => String::from("no horizon candidates were evaluated"),
        };
        return Err(exhausted(Constraint::Horizon, detail));
    };

    // Perturbation.
    let ages = stage.ages();
    let floor = if j == 0 {
        f64::NEG_INFINITY
    } else {
        monotonicity_floor(law, &ages)?
    };
    let bound_tv = pow_neg(1000.0, level);
    let bound_kd = pow_neg(100.0, level);
    let exact_n = horizon.min(MAX_EXACT_TV);
    let renewals = expected_renewals(law, horizon);
    let mut delta = 0.125 * law.prob(0);
    let mut last_failure = String::from("no delta candidates were evaluated");
    for _ in 0..budgets.delta_halvings {
        let k = smallest_target(law, age, delta, floor)?;
        if k > MAX_SUPPORT {
            last_failure = format!("k = {k} exceeds the support cap at delta = {delta:e}");
            break;
        }
        let kd = mean_shift(delta, k);
        if j >= 1 && kd >= bound_kd {
            last_failure = format!("k delta = {kd:e} not below {bound_kd:e}");
            delta *= 0.5;
            continue;
        }
        let analytic = 2.0 * delta * renewals;
        if analytic > bound_tv {
            last_failure = format!("coupling bound {analytic:e} above {bound_tv:e}");
            delta *= 0.5;
            continue;
        }
        let next = law.perturb(delta, k)?;
        let value = tv_prefix_exact(law, &next, exact_n)?;
        if value > bound_tv {
            last_failure = format!("exact prefix distance {value:e} above {bound_tv:e}");
            delta *= 0.5;
            continue;
        }
        let mu_shift = mu_l_shift(law, age, delta, k)?;
        let mut markers = stage.markers.clone();
        if j > 0 {
            markers.push(age);
        }
        markers.push(horizon);
        let mut laws = stage.laws.clone();
        let audit = StageAudit {
            stage: level,
            age,
            horizon,
            delta,
            k,
            fooling,
            tv: TvAudit {
                exact_n,
                value,
                analytic,
                bound: bound_tv,
            },
            mean: next.mean(),
            mean_shift: kd,
            mu_shift,
        };
        laws.push(next);
        let mut audits = stage.audit.clone();
        audits.push(audit);
        return Ok(StageState {
            stage: level,
            laws,
            markers,
            audit: audits,
        });
    }
    Err(exhausted(Constraint::Perturbation, last_failure))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub measured: f64,
    pub bound: f64,
}

impl Check {
    fn new(name: String, pass: bool, measured: f64, bound: f64) -> Self {
        Check {
            name,
            pass,
            measured,
            bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub stage: usize,
    pub joint_fooling: FoolingEstimate,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Re-measures every condition of a stage with fresh seeds.
pub fn verify_stage<S: SchemeRunner + ?Sized>(
    stage: &StageState,
    scheme: &S,
    reps: usize,
    seed: u64,
) -> Result<VerifyReport, AdversaryError> {
    let j = stage.stage;
    if j == 0 {
        return Err(AdversaryError::StageZero);
    }
    let law = stage.law();
    let mut checks = Vec::new();

    let windows = stage.windows()?;
    let joint = joint_fooling_probability(law, scheme, &windows, reps, seed)?;
    let bar = 1.0 - (1..=j).map(|i| 2.0 * pow_neg(1000.0, i)).sum::<f64>();
    checks.push(Check::new("joint_fooling".into(), joint.ci.1 >= bar, joint.est, bar));

    let mean_bar = 1.0 + (1..=j).map(|h| pow_neg(100.0, h)).sum::<f64>();
    checks.push(Check::new(
        "mean_bound".into(),
        law.mean() <= mean_bar + 1e-12,
        law.mean(),
        mean_bar,
    ));

    let mass: f64 = law.probs().iter().sum();
    checks.push(Check::new(
        "total_mass".into(),
        (mass - 1.0).abs() <= 1e-12,
        mass,
        1.0,
    ));

    let increasing = stage.markers.windows(2).all(|w| w[0] < w[1]);
    checks.push(Check::new(
        "markers_increasing".into(),
        increasing,
        stage.markers.len() as f64,
        0.0,
    ));

    let ages = stage.ages();
    for (i, a) in stage.audit.iter().enumerate() {
        let (Some(prev), Some(next)) = (stage.laws.get(i), stage.laws.get(i + 1)) else {
            continue;
        };
        let s = a.stage;
        let limit = 0.25 * prev.prob(0);
        checks.push(Check::new(format!("delta_range/{s}"), a.delta < limit, a.delta, limit));

        let shift = next.mean() - prev.mean();
        let kd = mean_shift(a.delta, a.k);
        checks.push(Check::new(
            format!("mean_shift/{s}"),
            (shift - kd).abs() <= 1e-12,
            shift,
            kd,
        ));

        let mut worst = f64::INFINITY;
        for &l in ages.iter().take(i + 1) {
            let gain = next.conditional_run_mean(l)? - prev.conditional_run_mean(l)?;
            worst = worst.min(gain);
        }
        checks.push(Check::new(format!("monotonicity/{s}"), worst >= -1e-12, worst, 0.0));

        let exact_n = a.horizon.min(MAX_EXACT_TV);
        let value = tv_prefix_exact(prev, next, exact_n)?;
        let bound = pow_neg(1000.0, s);
        checks.push(Check::new(format!("prefix_tv/{s}"), value <= bound, value, bound));
        let analytic = tv_prefix_bound(prev, a.delta, a.horizon);
        checks.push(Check::new(
            format!("prefix_tv_bound/{s}"),
            analytic <= bound,
            analytic,
            bound,
        ));
    }

    Ok(VerifyReport {
        stage: j,
        joint_fooling: joint,
        checks,
    })
}
