//! Streaming run index.
//!
//! Consumes bits one at a time and maintains, for the sequence seen so far:
//! `ψ` (first zero), the current run age `τ`, and for every age `t` the
//! positions `i` with `τ(X_0^i) = t` whose run has closed, paired with the
//! residual `σ_i`. Occurrences are appended only when a run closes: any
//! `i < k` with `τ(X_0^i) = τ(X_0^k)` lies in an earlier, closed run,
//! because ages inside one run are distinct.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fenwick::Fenwick;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum TrackerError {
    #[error("no zero observed yet, run age is undefined")]
    PsiUnset,
    #[error("requested {requested} occurrences of age {tau}, only {available} stored")]
    Insufficient {
        tau: usize,
        requested: usize,
        available: usize,
    },
}

/// A position with a known residual, `(i, σ_i)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Occurrence {
    pub position: usize,
    pub residual: usize,
}

#[derive(Debug, Clone, Default)]
pub struct RunIndex {
    len: usize,
    psi: Option<usize>,
    open_run_start: usize,
    current_tau: usize,
    occurrences: Vec<Vec<Occurrence>>,
    tau_counts: Fenwick,
}

impl RunIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let mut idx = Self::new();
        for &b in bits {
            idx.feed(b);
        }
        idx
    }

    /// Consumes the next bit (any nonzero byte counts as `1`).
    pub fn feed(&mut self, bit: u8) {
        let pos = self.len;
        self.len += 1;
        if bit == 0 {
            if self.psi.is_some() {
                let z = self.open_run_start;
                let s = pos - z - 1;
                if self.occurrences.len() <= s {
                    self.occurrences.resize_with(s + 1, Vec::new);
                }
                for t in 0..=s {
                    self.occurrences[t].push(Occurrence {
                        position: z + t,
                        residual: s - t,
                    });
                }
            } else {
                self.psi = Some(pos);
            }
            self.open_run_start = pos;
            self.current_tau = 0;
        } else if self.psi.is_some() {
            self.current_tau += 1;
        } else {
            return;
        }
        self.tau_counts.add(self.current_tau, 1);
    }

    /// Number of bits consumed.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Position of the most recently consumed bit.
    pub fn position(&self) -> Option<usize> {
        self.len.checked_sub(1)
    }

    pub fn psi(&self) -> Option<usize> {
        self.psi
    }

    /// `τ` at the current position.
    pub fn current_tau(&self) -> Result<usize, TrackerError> {
        self.psi.map(|_| self.current_tau).ok_or(TrackerError::PsiUnset)
    }

    /// Position of the zero opening the current run.
    pub fn open_run_start(&self) -> Option<usize> {
        self.psi.map(|_| self.open_run_start)
    }

    /// Stored occurrences of age `t`, ascending by position.
    pub fn occurrences(&self, t: usize) -> &[Occurrence] {
        self.occurrences.get(t).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Largest age with a stored occurrence list (exclusive bound).
    pub fn max_stored_tau(&self) -> usize {
        self.occurrences.len()
    }

    pub fn match_count(&self, t: usize) -> Result<usize, TrackerError> {
        self.psi.ok_or(TrackerError::PsiUnset)?;
        Ok(self.occurrences(t).len())
    }

    /// The `m` most recent occurrences of age `t`, ascending.
    pub fn last_m_occurrences(&self, t: usize, m: usize) -> Result<&[Occurrence], TrackerError> {
        let occ = self.occurrences(t);
        if occ.len() < m {
            return Err(TrackerError::Insufficient {
                tau: t,
                requested: m,
                available: occ.len(),
            });
        }
        Ok(&occ[occ.len() - m..])
    }

    /// The first `m` occurrences of age `t` with `lo < position < hi`.
    /// Returns fewer when the window holds fewer.
    pub fn first_m_in_window(&self, t: usize, lo: usize, hi: usize, m: usize) -> &[Occurrence] {
        let occ = self.occurrences(t);
        let start = occ.partition_point(|o| o.position <= lo);
        let end = occ.partition_point(|o| o.position < hi).max(start);
        let end = end.min(start.saturating_add(m));
        &occ[start..end]
    }

    /// `|{ψ ≤ i ≤ now : τ(X_0^i) < t}|`, including the open run.
    pub fn count_tau_less(&self, t: usize) -> Result<u64, TrackerError> {
        self.psi.ok_or(TrackerError::PsiUnset)?;
        Ok(self.tau_counts.prefix(t))
    }

    /// Number of positions `≥ ψ` with age exactly `t`.
    pub fn tau_count(&self, t: usize) -> u64 {
        self.tau_counts.get(t)
    }
}
