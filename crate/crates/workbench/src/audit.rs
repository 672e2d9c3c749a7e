//! JSON documents for adversarial stages.

use renewal_core::adversary::{StageState, VerifyReport};
use renewal_core::RenewalLaw;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoolingDoc {
    pub est: f64,
    pub ci: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TvDoc {
    pub exact_n: usize,
    pub value: f64,
    /// Coupling bound at the full horizon, reported alongside.
    pub analytic: f64,
}

/// `{stage, law, markers, delta, k, fooling{est, ci}, tv{exact_n, value}, mean}`.
/// Stage 0 has no perturbation, so its `delta`, `k`, `fooling` and `tv`
/// are null.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageAuditDoc {
    pub stage: usize,
    pub law: RenewalLaw,
    pub markers: Vec<usize>,
    pub delta: Option<f64>,
    pub k: Option<usize>,
    pub fooling: Option<FoolingDoc>,
    pub tv: Option<TvDoc>,
    pub mean: f64,
}

impl StageAuditDoc {
    /// Document for stage `j` of a state holding stages `0..=stage.stage`.
    pub fn new(state: &StageState, j: usize) -> Self {
        let law = state.laws[j].clone();
        let markers = match j {
            0 => vec![state.markers[0]],
            _ => state.markers[..2 * j].to_vec(),
        };
        let audit = j.checked_sub(1).and_then(|i| state.audit.get(i));
        StageAuditDoc {
            stage: j,
            mean: law.mean(),
            law,
            markers,
            delta: audit.map(|a| a.delta),
            k: audit.map(|a| a.k),
            fooling: audit.map(|a| FoolingDoc {
                est: a.fooling.est,
                ci: a.fooling.ci,
            }),
            tv: audit.map(|a| TvDoc {
                exact_n: a.tv.exact_n,
                value: a.tv.value,
                analytic: a.tv.analytic,
            }),
        }
    }

    pub fn all(state: &StageState) -> Vec<Self> {
        (0..=state.stage).map(|j| Self::new(state, j)).collect()
    }
}

/// Output of the `adversary` subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdversaryRun {
    pub config: serde_json::Value,
    pub stages: Vec<StageAuditDoc>,
    pub verify: Option<VerifyReport>,
    pub error: Option<String>,
}
