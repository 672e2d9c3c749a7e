mod common;

use proptest::prelude::*;
use renewal_core::estimators::reference::{ref_offline, ref_run};
use renewal_core::estimators::{run_offline, run_scheme};
use renewal_core::path::sample_path;
use renewal_core::{SchemeConfig, SchemeKind, StartMode};

fn config() -> impl Strategy<Value = SchemeConfig> {
    (0.05f64..0.6, 0.02f64..0.9).prop_map(|(g, e)| SchemeConfig {
        gamma: g,
        epsilon: e,
        declared_alpha: None,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn streaming_equals_reference(law in common::any_law(), seed in any::<u64>(), cfg in config(), stationary in any::<bool>()) {
        let mode = if stationary { StartMode::Stationary } else { StartMode::AtRenewal };
        let bits = sample_path(&law, 1500, mode, seed).bits;
        for kind in SchemeKind::ALL {
            prop_assert_eq!(run_scheme(kind, &bits, &cfg), ref_run(kind, &bits, &cfg), "{:?}", kind);
        }
        prop_assert_eq!(run_offline(&bits), ref_offline(&bits));
    }

    #[test]
    fn adversarial_bit_strings(bits in common::bits(600), cfg in config()) {
        for kind in SchemeKind::ALL {
            prop_assert_eq!(run_scheme(kind, &bits, &cfg), ref_run(kind, &bits, &cfg), "{:?}", kind);
        }
    }

    #[test]
    fn events_on_a_prefix_are_a_prefix(bits in common::bits(600), cut in 0usize..600, cfg in config()) {
        let cut = cut.min(bits.len());
        for kind in SchemeKind::ALL {
            let full = run_scheme(kind, &bits, &cfg);
            let part = run_scheme(kind, &bits[..cut], &cfg);
            let expected: Vec<_> = full.iter().filter(|e| e.lambda < cut).cloned().collect();
            prop_assert_eq!(part, expected, "{:?}", kind);
        }
    }
}

#[test]
fn event_ordinals_and_means() {
    let law = renewal_core::LawSpec::Geometric { q: 0.5, truncate: Some(60) }.build().unwrap();
    let bits = sample_path(&law, 5000, StartMode::Stationary, 11).bits;
    for kind in SchemeKind::ALL {
        let ev = run_scheme(kind, &bits, &SchemeConfig::with_gamma(0.3));
        for (i, e) in ev.iter().enumerate() {
            assert_eq!(e.ordinal, i + 1);
            assert_eq!(e.h, e.phat.mean());
            assert_eq!(e.window.m as u64, e.phat.m);
        }
        assert!(ev.windows(2).all(|w| w[0].lambda < w[1].lambda));
    }
}
