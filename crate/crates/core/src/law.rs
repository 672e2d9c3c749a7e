//! Finite-support renewal laws.
//!
//! `p_k` is the probability that a run of exactly `k` ones follows a zero.
//! Every law is truncated at a finite `K` and renormalized, so tails, the
//! mean and every conditional residual mean are exact finite sums.
//! Tails are accumulated from the top index down.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::math;

/// Tolerance for identities that hold exactly in real arithmetic.
pub const EXACT_TOL: f64 = 1e-12;
/// Tolerance for quantities sensitive to summation order.
pub const SUM_TOL: f64 = 1e-9;

/// Largest support a law may have; bounds memory for adversarial laws.
pub const MAX_SUPPORT: usize = 1 << 26;

const DEFAULT_GEOMETRIC_TAIL: f64 = 1e-16;
const DEFAULT_ZIPF_TAIL: f64 = 1e-12;
const DEFAULT_TRUNCATION_CAP: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LawError {
    #[error("mass sequence is empty")]
    Empty,
    #[error("mass sequence has zero total mass")]
    AllZero,
    #[error("mass at index {index} is negative or not finite: {value}")]
    InvalidMass { index: usize, value: f64 },
    #[error("geometric ratio q must lie in (0, 1), got {0}")]
    GeometricRatio(f64),
    #[error("zipf exponent {0} needs s > 2 without truncation (s > 0 with truncation)")]
    ZipfExponent(f64),
    #[error("support {0} exceeds the maximum of {MAX_SUPPORT}")]
    SupportTooLarge(usize),
    #[error("run age {offset} is unreachable under this law (tail mass is zero)")]
    Unreachable { offset: usize },
    #[error("alpha must exceed 2, got {0}")]
    Alpha(f64),
    #[error("perturbation size {delta} must lie in (0, {limit})")]
    DeltaOutOfRange { delta: f64, limit: f64 },
    #[error("perturbation target must be a positive run length")]
    ZeroTarget,
    #[error("Markov tail check needs k >= 2, got {0}")]
    TailIndex(u64),
}

/// Description of a law before normalization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum LawSpec {
    Explicit {
        p: Vec<f64>,
    },
    Geometric {
        q: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        truncate: Option<usize>,
    },
    Zipf {
        s: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        truncate: Option<usize>,
    },
}

/// A normalized renewal law with precomputed tails and residual means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "LawRepr", try_from = "LawRepr")]
pub struct RenewalLaw {
    probs: Vec<f64>,
    /// `tails[L] = Σ_{k ≥ L} p_k`, length `K + 2`, last entry 0.
    tails: Vec<f64>,
    /// `overshoot[L] = Σ_{k ≥ L} (k - L) p_k`, length `K + 2`.
    overshoot: Vec<f64>,
    mean: f64,
    provenance: String,
}

#[derive(Serialize, Deserialize)]
struct LawRepr {
    provenance: String,
    p: Vec<f64>,
}

impl From<RenewalLaw> for LawRepr {
    fn from(law: RenewalLaw) -> Self {
        LawRepr {
            provenance: law.provenance,
            p: law.probs,
        }
    }
}

impl TryFrom<LawRepr> for RenewalLaw {
    type Error = LawError;

    fn try_from(repr: LawRepr) -> Result<Self, LawError> {
        RenewalLaw::from_masses(repr.p, repr.provenance)
    }
}

/// Conditional law of the residual run length given the current run age.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualLaw {
    pub offset: usize,
    /// `probs[l] = p_{l+L} / T_L`.
    pub probs: Vec<f64>,
    pub mean: f64,
}

impl LawSpec {
    pub fn build(&self) -> Result<RenewalLaw, LawError> {
        RenewalLaw::new(self)
    }
}

impl RenewalLaw {
    /// Builds a law from a specification, truncating families at `K`.
    pub fn new(spec: &LawSpec) -> Result<Self, LawError> {
        match spec {
            LawSpec::Explicit { p } => Self::from_masses(p.clone(), String::from("explicit")),
            LawSpec::Geometric { q, truncate } => {
                let q = *q;
                if !(q > 0.0 && q < 1.0) {
                    return Err(LawError::GeometricRatio(q));
                }
                let k_max = match truncate {
                    Some(k) => *k,
                    None => {
                        let k = math::ceil(libm::log(DEFAULT_GEOMETRIC_TAIL) / libm::log(q));
                        (k as usize).min(DEFAULT_TRUNCATION_CAP)
                    }
                };
                check_support(k_max)?;
                let mut p = Vec::with_capacity(k_max + 1);
                let mut w = 1.0 - q;
                for _ in 0..=k_max {
                    p.push(w);
                    w *= q;
                }
                Self::from_masses(p, format!("geometric(q={q}, K={k_max})"))
            }
            LawSpec::Zipf { s, truncate } => {
                let s = *s;
                let k_max = match truncate {
                    Some(k) if s > 0.0 && s.is_finite() => *k,
                    None if s > 2.0 && s.is_finite() => {
                        // neglected tail ≈ (K+1)^(1-s) / (s-1)
                        let k = math::pow(DEFAULT_ZIPF_TAIL * (s - 1.0), 1.0 / (1.0 - s));
                        (math::ceil(k) as usize).min(DEFAULT_TRUNCATION_CAP)
                    }
                    _ => return Err(LawError::ZipfExponent(s)),
                };
                check_support(k_max)?;
                let p = (0..=k_max)
                    .map(|k| math::pow((k + 1) as f64, -s))
                    .collect();
                Self::from_masses(p, format!("zipf(s={s}, K={k_max})"))
            }
        }
    }

    /// Normalizes an explicit mass sequence `p_0..p_K`.
    ///
    /// Trailing zero masses are kept, so the support maximum is
    /// `p.len() - 1`.
    pub fn from_masses(mut p: Vec<f64>, provenance: String) -> Result<Self, LawError> {
        if p.is_empty() {
            return Err(LawError::Empty);
        }
        check_support(p.len() - 1)?;
        for (index, &value) in p.iter().enumerate() {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(LawError::InvalidMass { index, value });
            }
        }
        let total: f64 = p.iter().rev().sum();
        if total <= 0.0 {
            return Err(LawError::AllZero);
        }
        // masses already normalized up to rounding are kept bit-for-bit,
        // which makes serialization lossless
        if (total - 1.0).abs() > EXACT_TOL {
            for v in p.iter_mut() {
                *v /= total;
            }
        }
        Ok(Self::assemble(p, provenance))
    }

    fn assemble(probs: Vec<f64>, provenance: String) -> Self {
        let n = probs.len();
        let mut tails = vec![0.0; n + 1];
        let mut overshoot = vec![0.0; n + 1];
        for l in (0..n).rev() {
            tails[l] = tails[l + 1] + probs[l];
            overshoot[l] = overshoot[l + 1] + tails[l + 1];
        }
        let mean = probs
            .iter()
            .enumerate()
            .rev()
            .map(|(k, &p)| k as f64 * p)
            .sum();
        RenewalLaw {
            probs,
            tails,
            overshoot,
            mean,
            provenance,
        }
    }

    /// Largest run length with storage, `K`.
    pub fn support_max(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// `p_k`, zero beyond the support.
    pub fn prob(&self, k: usize) -> f64 {
        self.probs.get(k).copied().unwrap_or(0.0)
    }

    /// `T_0..T_{K+1}`.
    pub fn tails(&self) -> &[f64] {
        &self.tails
    }

    /// `T_L = Σ_{k ≥ L} p_k`, zero beyond the support.
    pub fn tail(&self, l: usize) -> f64 {
        self.tails.get(l).copied().unwrap_or(0.0)
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    fn reachable(&self, l: usize) -> Result<f64, LawError> {
        let t = self.tail(l);
        if t > 0.0 {
            Ok(t)
        } else {
            Err(LawError::Unreachable { offset: l })
        }
    }

    /// Expected residual run length given run age `L`:
    /// `μ_L = Σ_{k≥L} (k-L) p_k / T_L`.
    pub fn mu_l(&self, l: usize) -> Result<f64, LawError> {
        let t = self.reachable(l)?;
        Ok(self.overshoot[l] / t)
    }

    /// `Σ_{k≥L} k p_k / T_L`, the conditional mean run length given age `L`.
    pub fn conditional_run_mean(&self, l: usize) -> Result<f64, LawError> {
        Ok(self.mu_l(l)? + l as f64)
    }

    pub fn residual_law(&self, l: usize) -> Result<ResidualLaw, LawError> {
        let t = self.reachable(l)?;
        let probs: Vec<f64> = self.probs[l..].iter().map(|&p| p / t).collect();
        Ok(ResidualLaw {
            offset: l,
            probs,
            mean: self.overshoot[l] / t,
        })
    }

    /// Stationary probability of a renewal, `1 / (1 + μ)`.
    pub fn kac_zero_prob(&self) -> f64 {
        1.0 / (1.0 + self.mean)
    }

    /// Stationary law of the chain state: state `i` has mass `T_i / (1 + μ)`.
    pub fn chain_stationary_law(&self) -> Vec<f64> {
        let z = 1.0 + self.mean;
        self.tails[..self.probs.len()].iter().map(|&t| t / z).collect()
    }

    /// `Σ k^r p_k` (with `0^0 = 1`).
    pub fn power_moment(&self, r: f64) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .rev()
            .map(|(k, &p)| math::pow(k as f64, r) * p)
            .sum()
    }

    /// Markov-inequality tail bound for the residual law at age `L`:
    /// `Σ_{l ≥ a} p_{l+L} / T_L ≤ 1 / log₂ k` with `a = ⌈μ_L log₂ k⌉`.
    ///
    /// When `μ_L = 0` the residual is identically zero and the sum starts
    /// at `a = 1`, where Markov's inequality is meaningful.
    pub fn markov_tail_check(&self, l: usize, k: u64) -> Result<bool, LawError> {
        if k < 2 {
            return Err(LawError::TailIndex(k));
        }
        let t = self.reachable(l)?;
        let lg = math::log2(k as f64);
        let mu = self.overshoot[l] / t;
        let start = math::ceil_snapped(mu * lg).max(1) as usize;
        let tail = self.tail(l.saturating_add(start)) / t;
        Ok(tail <= 1.0 / lg + EXACT_TOL)
    }

    /// Moves `delta` of mass from run length `from` to run length `to`,
    /// extending the support when needed. No renormalization happens, so
    /// mean shifts are exact.
    pub fn shift_mass(&self, from: usize, to: usize, delta: f64) -> Result<Self, LawError> {
        let available = self.prob(from);
        if !(delta > 0.0 && delta <= available) {
            return Err(LawError::DeltaOutOfRange {
                delta,
                limit: available,
            });
        }
        let size = self.probs.len().max(to + 1);
        check_support(size - 1)?;
        let mut probs = self.probs.clone();
        probs.resize(size, 0.0);
        probs[from] -= delta;
        probs[to] += delta;
        let provenance = format!("{} | move {delta:e} {from}->{to}", self.provenance);
        Ok(Self::assemble(probs, provenance))
    }

    /// The adversarial perturbation: `p_0 - δ`, `p_k + δ` with
    /// `0 < δ < p_0 / 4` and `k ≥ 1`.
    pub fn perturb(&self, delta: f64, k: usize) -> Result<Self, LawError> {
        let limit = 0.25 * self.prob(0);
        if !(delta > 0.0 && delta < limit) {
            return Err(LawError::DeltaOutOfRange { delta, limit });
        }
        if k == 0 {
            return Err(LawError::ZeroTarget);
        }
        self.shift_mass(0, k, delta)
    }
}

fn check_support(k: usize) -> Result<(), LawError> {
    if k > MAX_SUPPORT {
        Err(LawError::SupportTooLarge(k))
    } else {
        Ok(())
    }
}

/// `min(1 - 2/α, 1/3)`, the admissible range for `γ` in the polynomial scheme.
pub fn gamma_upper_bound(alpha: f64) -> Result<f64, LawError> {
    if !(alpha > 2.0) {
        return Err(LawError::Alpha(alpha));
    }
    Ok((1.0 - 2.0 / alpha).min(1.0 / 3.0))
}

/// `Σ_l |a_l - b_l|` over the union of supports.
pub fn tv_l1(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0.0);
            let y = b.get(i).copied().unwrap_or(0.0);
            (x - y).abs()
        })
        .sum()
}
