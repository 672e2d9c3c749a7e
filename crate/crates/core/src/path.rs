//! Path generation from the renewal Markov chain.
//!
//! The chain lives on `{0, 1, 2, ...}`: from state `i ≥ 1` it moves to
//! `i - 1`, from state `0` it jumps to `k` with probability `p_k`. The
//! observed bit is `0` in state 0 and `1` otherwise.

use alloc::string::String;
use alloc::vec::Vec;

use rand_core::RngCore;
use serde::{Deserialize, Serialize};

use crate::law::RenewalLaw;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StartMode {
    /// Condition on `X_0 = 0`.
    #[serde(rename = "renewal")]
    AtRenewal,
    /// Initial chain state drawn from the stationary law `T_i / (1 + μ)`.
    Stationary,
}

/// A generated bit sequence, positions `0..=N`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Path {
    pub bits: Vec<u8>,
    pub seed: u64,
    pub mode: StartMode,
    pub law_provenance: String,
}

impl Path {
    /// `N`, the last position.
    pub fn last_position(&self) -> usize {
        self.bits.len() - 1
    }
}

/// Draws a run length by inverting the tail function: returns `k` with
/// `T_{k+1} < v ≤ T_k` for `v = 1 - u`, which has probability `p_k`.
pub fn sample_run_length<R: RngCore + ?Sized>(law: &RenewalLaw, rng: &mut R) -> usize {
    let v = 1.0 - rng::uniform(rng);
    let tails = law.tails();
    // tails is nonincreasing; count entries >= v
    let count = tails.partition_point(|&t| t >= v);
    count.saturating_sub(1).min(law.support_max())
}

fn sample_initial_state<R: RngCore + ?Sized>(law: &RenewalLaw, rng: &mut R) -> usize {
    let u = rng::uniform(rng) * (1.0 + law.mean());
    let mut acc = 0.0;
    for (i, &t) in law.tails()[..=law.support_max()].iter().enumerate() {
        acc += t;
        if u < acc && t > 0.0 {
            return i;
        }
    }
    // rounding residue: last reachable state
    (0..=law.support_max())
        .rev()
        .find(|&i| law.tail(i) > 0.0)
        .unwrap_or(0)
}

fn emit_ones(bits: &mut Vec<u8>, count: usize, cap: usize) {
    let n = count.min(cap - bits.len());
    bits.extend(core::iter::repeat_n(1u8, n));
}

/// Generates positions `0..=n` deterministically from `(law, n, mode, seed)`.
pub fn sample_path(law: &RenewalLaw, n: usize, mode: StartMode, seed: u64) -> Path {
    let cap = n + 1;
    let mut rng = rng::stream(seed, 0);
    let mut bits = Vec::with_capacity(cap);
    if mode == StartMode::Stationary {
        let state = sample_initial_state(law, &mut rng);
        emit_ones(&mut bits, state, cap);
    }
    while bits.len() < cap {
        bits.push(0);
        if bits.len() == cap {
            break;
        }
        let k = sample_run_length(law, &mut rng);
        emit_ones(&mut bits, k, cap);
    }
    Path {
        bits,
        seed,
        mode,
        law_provenance: String::from(law.provenance()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::law::LawSpec;
    use alloc::vec;

    fn explicit(p: &[f64]) -> RenewalLaw {
        LawSpec::Explicit { p: p.to_vec() }.build().unwrap()
    }

    #[test]
    fn deterministic_laws() {
        let mut r = rng::stream(1, 0);
        let two = explicit(&[0.0, 0.0, 1.0]);
        let zero = explicit(&[1.0]);
        for _ in 0..100 {
            assert_eq!(sample_run_length(&two, &mut r), 2);
            assert_eq!(sample_run_length(&zero, &mut r), 0);
        }
        for seed in [0, 1, 99] {
            let p = sample_path(&two, 8, StartMode::AtRenewal, seed);
            assert_eq!(p.bits, vec![0, 1, 1, 0, 1, 1, 0, 1, 1]);
            let z = sample_path(&zero, 5, StartMode::Stationary, seed);
            assert_eq!(z.bits, vec![0; 6]);
        }
    }

    #[test]
    fn geometric_run_length_mean() {
        let law = LawSpec::Geometric { q: 0.5, truncate: Some(60) }.build().unwrap();
        let mut r = rng::stream(42, 0);
        let n = 1_000_000;
        let total: usize = (0..n).map(|_| sample_run_length(&law, &mut r)).sum();
        let mean = total as f64 / n as f64;
        assert!((mean - 1.0).abs() < 0.005, "mean {mean}");
    }

    #[test]
    fn paths_are_reproducible() {
        let law = LawSpec::Geometric { q: 0.5, truncate: Some(60) }.build().unwrap();
        let a = sample_path(&law, 5000, StartMode::Stationary, 11);
        let b = sample_path(&law, 5000, StartMode::Stationary, 11);
        let c = sample_path(&law, 5000, StartMode::Stationary, 12);
        assert_eq!(a, b);
        assert_ne!(a.bits, c.bits);
        assert_eq!(a.bits.len(), 5001);
    }

    #[test]
    fn at_renewal_starts_with_zero_and_respects_support() {
        let law = explicit(&[0.2, 0.3, 0.1, 0.4]);
        for seed in 0..20 {
            let p = sample_path(&law, 500, StartMode::AtRenewal, seed);
            assert_eq!(p.bits[0], 0);
            let mut run = 0;
            for &b in &p.bits {
                if b == 1 {
                    run += 1;
                    assert!(run <= 3);
                } else {
                    run = 0;
                }
            }
        }
    }
}
