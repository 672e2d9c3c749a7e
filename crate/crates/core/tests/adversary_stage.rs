use renewal_core::adversary::{
    advance_stage, fooling_probability, joint_fooling_probability, stage0, verify_stage, Budgets,
    Constraint, AdversaryError, Scheme, SchemeRunner,
};
use renewal_core::{LawSpec, SchemeConfig, SchemeKind};

fn poly() -> Scheme {
    Scheme {
        kind: SchemeKind::Poly,
        config: SchemeConfig::with_gamma(0.3),
    }
}

#[test]
fn first_stage_bookkeeping() {
    let s0 = stage0(60).unwrap();
    let s1 = advance_stage(&s0, &poly(), &Budgets::default()).unwrap();
    assert_eq!(s1.stage, 1);
    assert_eq!(s1.laws.len(), 2);
    assert_eq!(s1.markers.len(), 2);
    assert_eq!(s1.markers[0], 0);
    let a = &s1.audit[0];
    assert!(a.delta < 0.25 * s0.law().prob(0));
    assert!(a.mean_shift > 2.0 && a.mu_shift > 2.0);
    let total: f64 = s1.law().probs().iter().sum();
    assert!((total - 1.0).abs() < 1e-12);
    assert!((s1.law().mean() - s0.law().mean() - a.mean_shift).abs() < 1e-12);
    assert!(a.tv.value <= a.tv.bound && a.tv.analytic <= a.tv.bound);
    assert_eq!(a.tv.exact_n, a.horizon.min(20));
    for l in s0.ages() {
        assert!(s1.law().conditional_run_mean(l).unwrap() >= s0.law().conditional_run_mean(l).unwrap());
    }
    // the search measured the quantity it optimizes; rerun with fresh seeds
    let f = fooling_probability(s0.law(), &poly(), (0, a.horizon), s1.law().mean(), 2000, 4242).unwrap();
    assert!(f.est >= 0.99 - (f.est - f.ci.0));
    // deterministic given budgets
    assert_eq!(advance_stage(&s0, &poly(), &Budgets::default()).unwrap(), s1);
}

#[test]
fn verification_rerun() {
    let s1 = advance_stage(&stage0(60).unwrap(), &poly(), &Budgets::default()).unwrap();
    let report = verify_stage(&s1, &poly(), 2000, 777).unwrap();
    for name in [
        "joint_fooling",
        "total_mass",
        "markers_increasing",
        "delta_range/1",
        "mean_shift/1",
        "monotonicity/1",
        "prefix_tv/1",
        "prefix_tv_bound/1",
    ] {
        let c = report.check(name).unwrap();
        assert!(c.pass, "{name}: {c:?}");
    }
    assert!(report.joint_fooling.est >= 0.95);
    let again = verify_stage(&s1, &poly(), 2000, 777).unwrap();
    assert_eq!(again, report);
}

#[test]
fn corrupted_law_breaks_the_mean_bound() {
    let mut s1 = advance_stage(&stage0(60).unwrap(), &poly(), &Budgets::default()).unwrap();
    let mean_two = LawSpec::Explicit { p: vec![0.2, 0.2, 0.2, 0.2, 0.2] }.build().unwrap();
    assert!((mean_two.mean() - 2.0).abs() < 1e-12);
    *s1.laws.last_mut().unwrap() = mean_two;
    let report = verify_stage(&s1, &poly(), 200, 1).unwrap();
    let c = report.check("mean_bound").unwrap();
    assert!(!c.pass);
    assert!((c.measured - 2.0).abs() < 1e-12);
    assert!(!report.all_pass());
}

#[test]
fn perfect_oracle_is_never_fooled() {
    let law = stage0(60).unwrap().law().clone();
    let oracle = |bits: &[u8]| {
        let mut ev = poly().run(bits);
        for e in &mut ev {
            e.h = law.mu_l(e.tau).unwrap();
        }
        ev
    };
    for (age, horizon) in [(0, 64), (1, 512), (2, 1024)] {
        let mu = law.mu_l(age).unwrap();
        for shift in [0.5, 0.999] {
            let f = fooling_probability(&law, &oracle, (age, horizon), mu + shift, 300, 9).unwrap();
            assert_eq!(f.hits, 0);
            assert!(f.covered > 0, "age {age}: no qualifying firing");
        }
    }
}

#[test]
fn joint_event_is_no_more_likely_than_each_window() {
    let law = stage0(60).unwrap().law().clone();
    let w = |age, horizon| renewal_core::adversary::FoolingWindow {
        age,
        horizon,
        target_mu: law.mu_l(age).unwrap() + 1.5,
    };
    let a = joint_fooling_probability(&law, &poly(), &[w(0, 64)], 500, 3).unwrap();
    let b = joint_fooling_probability(&law, &poly(), &[w(2, 128)], 500, 3).unwrap();
    let ab = joint_fooling_probability(&law, &poly(), &[w(0, 64), w(2, 128)], 500, 3).unwrap();
    assert!(ab.hits <= a.hits.min(b.hits));
}

#[test]
fn second_stage_exhausts_a_small_budget() {
    let budgets = Budgets {
        max_horizon: 1 << 12,
        search_reps: 200,
        ..Budgets::default()
    };
    let s1 = advance_stage(&stage0(60).unwrap(), &poly(), &Budgets::default()).unwrap();
    match advance_stage(&s1, &poly(), &budgets) {
        Err(AdversaryError::BudgetExhausted { constraint, detail }) => {
            assert_eq!(constraint, Constraint::Horizon, "{detail}");
        }
        other => panic!("unexpected {other:?}"),
    }
    let capped = Budgets { max_stage: 1, ..Budgets::default() };
    assert!(matches!(advance_stage(&s1, &poly(), &capped), Err(AdversaryError::StageCap { cap: 1 })));
}
