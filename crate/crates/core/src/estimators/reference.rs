//! Quadratic reference implementations.
//!
//! Every quantity is recomputed from the prefix `X_0^k` at each query time
//! by direct scans: `τ` by walking back to the last zero, `σ_i` by walking
//! forward from `i` inside the prefix. A residual that would need bits past
//! the query time panics, so a passing comparison also certifies that the
//! streaming schemes never look ahead.

use alloc::vec::Vec;

use super::{EstimateEvent, OfflineEstimate, ResidualCounts, SchemeConfig, SchemeKind};
use crate::math;
use crate::tracker::Occurrence;

fn first_zero(bits: &[u8]) -> Option<usize> {
    bits.iter().position(|&b| b == 0)
}

/// `τ(X_0^i)`: the `t ≥ 0` with `x_{i-t} = 0` and ones after it.
pub fn tau_at(bits: &[u8], i: usize) -> Option<usize> {
    (0..=i).rev().find(|&j| bits[j] == 0).map(|j| i - j)
}

/// `σ_i` read from the prefix `X_0^q`; `None` when the run is still open.
pub fn sigma_within(bits: &[u8], i: usize, q: usize) -> Option<usize> {
    let mut l = 0;
    loop {
        let j = i + l + 1;
        if j > q {
            return None;
        }
        if bits[j] == 0 {
            return Some(l);
        }
        l += 1;
    }
}

fn sample(bits: &[u8], i: usize, q: usize) -> Occurrence {
    let residual = sigma_within(bits, i, q)
        .unwrap_or_else(|| panic!("residual at {i} is not observed by time {q}"));
    Occurrence { position: i, residual }
}

fn event(ordinal: usize, lambda: usize, tau: usize, samples: &[Occurrence]) -> EstimateEvent {
    EstimateEvent::from_samples(ordinal, lambda, tau, samples)
}

fn ages(bits: &[u8]) -> Vec<Option<usize>> {
    (0..bits.len()).map(|i| tau_at(bits, i)).collect()
}

pub fn ref_poly(bits: &[u8], config: &SchemeConfig) -> Vec<EstimateEvent> {
    let Some(psi) = first_zero(bits) else {
        return Vec::new();
    };
    let taus = ages(bits);
    let mut out = Vec::new();
    for k in psi + 1..bits.len() {
        let tau = taus[k].expect("after psi");
        let matches: Vec<usize> = (psi..k).filter(|&i| taus[i] == Some(tau)).collect();
        let thr = math::snap(math::pow(k as f64, 1.0 - config.gamma));
        if (matches.len() as f64) < thr {
            continue;
        }
        let m = math::ceil_snapped(thr) as usize;
        let samples: Vec<Occurrence> = matches[matches.len() - m..]
            .iter()
            .map(|&i| sample(bits, i, k))
            .collect();
        out.push(event(out.len() + 1, k, tau, &samples));
    }
    out
}

pub fn ref_log(bits: &[u8], config: &SchemeConfig) -> Vec<EstimateEvent> {
    let Some(psi) = first_zero(bits) else {
        return Vec::new();
    };
    let taus = ages(bits);
    let mut out = Vec::new();
    for t in psi + 1..bits.len() {
        let tau = taus[t];
        let early = (psi + 1..t)
            .take_while(|&i| math::lt_log2(i as u64, t as u64))
            .any(|i| taus[i] == tau);
        if !early {
            continue;
        }
        let m = math::floor_log2(t as u64) as usize;
        let c = math::ceil_snapped(math::pow(2.0, m as f64 * (1.0 - config.gamma))) as usize;
        let window: Vec<usize> = (m + 1..(1usize << m))
            .filter(|&j| taus[j] == tau)
            .take(c)
            .collect();
        if window.len() < c || c == 0 {
            continue;
        }
        let samples: Vec<Occurrence> = window.iter().map(|&j| sample(bits, j, t)).collect();
        out.push(event(out.len() + 1, t, tau.expect("after psi"), &samples));
    }
    out
}

pub fn ref_eps(bits: &[u8], config: &SchemeConfig) -> Vec<EstimateEvent> {
    let Some(psi) = first_zero(bits) else {
        return Vec::new();
    };
    let taus = ages(bits);
    let mut out = Vec::new();
    for t in psi + 1..bits.len() {
        let tau = taus[t].expect("after psi");
        let smaller = (psi..=t).filter(|&i| taus[i].expect("after psi") < tau).count();
        if smaller as f64 > math::snap(t as f64 * (1.0 - config.epsilon / 2.0)) {
            continue;
        }
        let samples: Vec<Occurrence> = (psi..t)
            .filter(|&i| taus[i] == Some(tau))
            .map(|i| sample(bits, i, t))
            .collect();
        if samples.is_empty() {
            continue;
        }
        out.push(event(out.len() + 1, t, tau, &samples));
    }
    out
}

pub fn ref_offline(bits: &[u8]) -> Vec<Option<OfflineEstimate>> {
    let taus = ages(bits);
    let psi = first_zero(bits);
    (0..bits.len())
        .map(|n| {
            let psi = psi.filter(|&p| p <= n)?;
            let tau = taus[n]?;
            let samples: Vec<Occurrence> = (psi..n)
                .filter(|&i| taus[i] == Some(tau))
                .map(|i| sample(bits, i, n))
                .collect();
            if samples.is_empty() {
                return None;
            }
            let phat = ResidualCounts::from_residuals(samples.iter().map(|o| o.residual));
            Some(OfflineEstimate {
                tau,
                h: phat.mean(),
                phat,
                first: samples[0].position,
                last: samples[samples.len() - 1].position,
            })
        })
        .collect()
}

/// Reference counterpart of [`super::run_scheme`].
pub fn ref_run(kind: SchemeKind, bits: &[u8], config: &SchemeConfig) -> Vec<EstimateEvent> {
    match kind {
        SchemeKind::Poly => ref_poly(bits, config),
        SchemeKind::Log => ref_log(bits, config),
        SchemeKind::Eps => ref_eps(bits, config),
        SchemeKind::Offline => super::offline_events(&ref_offline(bits)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn definitions_on_small_inputs() {
        let bits = [1, 0, 1, 1, 0, 1];
        assert_eq!(tau_at(&bits, 0), None);
        assert_eq!(tau_at(&bits, 3), Some(2));
        assert_eq!(tau_at(&bits, 4), Some(0));
        assert_eq!(sigma_within(&bits, 1, 5), Some(2));
        assert_eq!(sigma_within(&bits, 4, 5), None);
        assert_eq!(sigma_within(&bits, 3, 4), Some(0));
    }

    #[test]
    fn matches_streaming_on_hand_traces() {
        let alt = [0u8, 1, 0, 1, 0, 1, 0, 1, 0];
        let cfg = SchemeConfig::with_gamma(0.5);
        assert_eq!(ref_run(SchemeKind::Poly, &alt, &cfg), super::super::run_poly(&alt, &cfg));
        let zeros = [0u8; 30];
        let cfg = SchemeConfig::with_epsilon(0.3);
        assert_eq!(ref_run(SchemeKind::Eps, &zeros, &cfg), super::super::run_eps(&zeros, &cfg));
    }
}
