#![allow(dead_code)]

use proptest::prelude::*;
use renewal_core::{LawSpec, RenewalLaw};

/// Explicit laws with small support, some zero masses allowed.
pub fn explicit_law() -> impl Strategy<Value = RenewalLaw> {
    prop::collection::vec(prop_oneof![3 => 0.01f64..1.0, 1 => Just(0.0)], 1..12)
        .prop_filter_map("needs positive mass", |p| LawSpec::Explicit { p }.build().ok())
}

/// Mix of explicit, geometric and truncated zipf laws.
pub fn any_law() -> impl Strategy<Value = RenewalLaw> {
    prop_oneof![
        2 => explicit_law(),
        1 => (0.2f64..0.8, 10usize..60).prop_map(|(q, k)| LawSpec::Geometric { q, truncate: Some(k) }
            .build()
            .unwrap()),
        1 => (1.5f64..4.0, 10usize..80).prop_map(|(s, k)| LawSpec::Zipf { s, truncate: Some(k) }
            .build()
            .unwrap()),
    ]
}

/// Bit strings biased towards long runs of ones.
pub fn bits(max_len: usize) -> impl Strategy<Value = Vec<u8>> {
    (0.05f64..0.9).prop_flat_map(move |zero| {
        prop::collection::vec(prop::bool::weighted(zero), 0..max_len)
            .prop_map(|v| v.into_iter().map(|z| u8::from(!z)).collect())
    })
}
