//! Fast built-in oracle and invariant checks behind `renewal selftest`.

use renewal_core::adversary::{mu_l_shift, tv_prefix_exact};
use renewal_core::estimators::reference::{ref_offline, ref_run, tau_at};
use renewal_core::estimators::{run_offline, run_scheme};
use renewal_core::evaluation::score_events;
use renewal_core::path::sample_path;
use renewal_core::rng::{self, Stream};
use renewal_core::{LawSpec, RenewalLaw, RunIndex, SchemeConfig, SchemeKind, StartMode};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::experiment::run_experiment;
use crate::report::{emit_report, parse_json_report, Format};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn outcome(name: &'static str, result: Result<String, String>) -> Outcome {
    match result {
        Ok(detail) => Outcome { name, pass: true, detail },
        Err(detail) => Outcome { name, pass: false, detail },
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_law(r: &mut Stream) -> RenewalLaw {
    let u = rng::uniform(r);
    if u < 0.5 {
        let len = 1 + (rng::uniform(r) * 10.0) as usize;
        let mut p: Vec<f64> = (0..len).map(|_| rng::uniform(r)).collect();
        p[0] += 1e-3;
        LawSpec::Explicit { p }.build().expect("positive mass")
    } else if u < 0.75 {
        let q = 0.2 + 0.6 * rng::uniform(r);
        LawSpec::Geometric { q, truncate: Some(60) }.build().expect("valid ratio")
    } else {
        let s = 1.5 + 2.5 * rng::uniform(r);
        LawSpec::Zipf { s, truncate: Some(80) }.build().expect("valid exponent")
    }
}

fn periodic(n: usize) -> Vec<u8> {
    (0..n).map(|i| u8::from(i % 3 != 0)).collect()
}

fn deterministic_trace() -> Result<String, String> {
    let law = LawSpec::Explicit { p: vec![0.0, 0.0, 1.0] }.build().map_err(|e| e.to_string())?;
    let bits = periodic(200);
    let cfg = SchemeConfig::with_gamma(0.5);
    let poly: Vec<usize> = run_scheme(SchemeKind::Poly, &bits, &cfg).iter().map(|e| e.lambda).collect();
    let mut expect = vec![9];
    expect.extend(12..200);
    ensure(poly == expect, || format!("poly firings {:?}", &poly[..poly.len().min(8)]))?;
    let eps: Vec<usize> = run_scheme(SchemeKind::Eps, &periodic(12), &SchemeConfig::with_epsilon(0.5))
        .iter()
        .map(|e| e.lambda)
        .collect();
    ensure(eps.starts_with(&[3, 4, 6, 7, 8]), || format!("eps firings {eps:?}"))?;
    for kind in SchemeKind::ALL {
        let scored = score_events(&law, &run_scheme(kind, &bits, &cfg)).map_err(|e| e.to_string())?;
        ensure(scored.iter().all(|s| s.abs_err == 0.0 && s.tv == 0.0), || {
            format!("{} has a nonzero error on the deterministic law", kind.name())
        })?;
    }
    Ok("traces match".into())
}

fn oracle_equivalence(seed: u64, cases: usize) -> Result<String, String> {
    let mut r = rng::stream(seed, 1);
    for case in 0..cases {
        let law = random_law(&mut r);
        let cfg = SchemeConfig {
            gamma: 0.05 + 0.55 * rng::uniform(&mut r),
            epsilon: 0.02 + 0.88 * rng::uniform(&mut r),
            declared_alpha: None,
        };
        let mode = if case % 2 == 0 { StartMode::Stationary } else { StartMode::AtRenewal };
        let bits = sample_path(&law, 1500, mode, rng::derive_seed(seed, case as u64)).bits;
        for kind in SchemeKind::ALL {
            ensure(run_scheme(kind, &bits, &cfg) == ref_run(kind, &bits, &cfg), || {
                format!("case {case}: {} differs from the reference on {}", kind.name(), law.provenance())
            })?;
        }
        ensure(run_offline(&bits) == ref_offline(&bits), || format!("case {case}: offline estimates differ"))?;
        let idx = RunIndex::from_bits(&bits);
        for t in 0..8 {
            let brute = (0..bits.len()).filter(|&i| tau_at(&bits, i) == Some(t)).count() as u64;
            ensure(idx.tau_count(t) == brute, || format!("case {case}: age count at {t}"))?;
        }
    }
    Ok(format!("{cases} random cases agree"))
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

fn law_invariants(seed: u64) -> Result<String, String> {
    let mut r = rng::stream(seed, 2);
    let mut laws: Vec<RenewalLaw> = (0..40).map(|_| random_law(&mut r)).collect();
    laws.push(LawSpec::Zipf { s: 3.0, truncate: Some(10_000) }.build().map_err(|e| e.to_string())?);
    let mut checked = 0;
    for law in &laws {
        let pi: f64 = law.chain_stationary_law().iter().sum();
        ensure(close(pi, 1.0, 1e-9), || format!("stationary law sums to {pi}"))?;
        ensure(close(law.chain_stationary_law()[0], law.kac_zero_prob(), 1e-12), || "Kac mass".into())?;
        for l in 0..=law.support_max().min(200) {
            let Ok(mu) = law.mu_l(l) else { continue };
            let res = law.residual_law(l).map_err(|e| e.to_string())?;
            let direct: f64 = res.probs.iter().enumerate().map(|(i, p)| i as f64 * p).sum();
            ensure(close(direct, mu, 1e-9), || format!("residual mean at L={l}"))?;
            let lhs = law.tail(l) * mu;
            let rhs = match law.mu_l(l + 1) {
                Ok(next) => law.tail(l + 1) * (next + 1.0),
                Err(_) => 0.0,
            };
            ensure(close(lhs, rhs, 1e-9), || format!("recursion at L={l}"))?;
            for k in [2u64, 3, 10, 1000, 1 << 20] {
                ensure(law.markov_tail_check(l, k) == Ok(true), || format!("tail bound L={l} k={k}"))?;
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} (law, L) pairs"))
}

fn adversary_identities() -> Result<String, String> {
    let e = |x: renewal_core::adversary::AdversaryError| x.to_string();
    let g = LawSpec::Geometric { q: 0.5, truncate: Some(60) }.build().map_err(|x| x.to_string())?;
    let p = g.perturb(0.001, 41).map_err(|x| x.to_string())?;
    let tv = tv_prefix_exact(&g, &p, 1).map_err(e)?;
    ensure(close(tv, 0.002, 1e-10), || format!("prefix distance {tv}"))?;
    let two = LawSpec::Explicit { p: vec![0.0, 0.0, 1.0] }.build().map_err(|x| x.to_string())?;
    let one = LawSpec::Explicit { p: vec![0.0, 1.0] }.build().map_err(|x| x.to_string())?;
    ensure(close(tv_prefix_exact(&two, &one, 2).map_err(e)?, 2.0, 1e-12), || "disjoint supports".into())?;
    let shift = mu_l_shift(&g, 0, 0.05, 41).map_err(e)?;
    ensure(close(shift, 2.05, 1e-12), || format!("mean shift {shift}"))?;
    for l in [1, 4, 10] {
        let c = mu_l_shift(&p, l, 1e-3, 500).map_err(e)?;
        let q = p.perturb(1e-3, 500).map_err(|x| x.to_string())?;
        let b = q.mu_l(l).map_err(|x| x.to_string())? - p.mu_l(l).map_err(|x| x.to_string())?;
        ensure((c - b).abs() < 1e-9, || format!("closed form at L={l}: {c} vs {b}"))?;
    }
    Ok("closed forms agree".into())
}

fn report_round_trip(seed: u64) -> Result<String, String> {
    let mut c = ExperimentConfig::new(LawSpec::Geometric { q: 0.5, truncate: Some(60) }, SchemeKind::Offline, 800, 2, seed);
    c.params.declared_alpha = Some(3.0);
    let report = run_experiment(&c).map_err(|e| e.to_string())?;
    let back = parse_json_report(&emit_report(&report, Format::Json)).map_err(|e| e.to_string())?;
    ensure(back == report, || "JSON report does not round-trip".into())?;
    let csv = emit_report(&report, Format::Csv);
    let rows = csv.iter().filter(|&&b| b == b'\n').count() - 1;
    let events: usize = report.replicates.iter().map(|r| r.events.len()).sum();
    ensure(rows == events, || format!("{rows} CSV rows for {events} events"))?;
    Ok(format!("{events} events"))
}

/// Runs every check; `seed` drives the randomized ones.
pub fn run_all(seed: u64) -> Vec<Outcome> {
    vec![
        outcome("deterministic-trace", deterministic_trace()),
        outcome("oracle-equivalence", oracle_equivalence(seed, 24)),
        outcome("law-invariants", law_invariants(seed)),
        outcome("adversary-identities", adversary_identities()),
        outcome("report-round-trip", report_round_trip(seed)),
    ]
}

#[cfg(test)]
mod tests {
    #[test]
    fn selftest_passes() {
        for o in super::run_all(1) {
            assert!(o.pass, "{}: {}", o.name, o.detail);
        }
    }
}
