mod common;

use proptest::prelude::*;
use renewal_core::estimators::reference::{sigma_within, tau_at};
use renewal_core::tracker::Occurrence;
use renewal_core::RunIndex;

fn brute_occurrences(bits: &[u8], t: usize) -> Vec<Occurrence> {
    let q = bits.len() - 1;
    (0..bits.len())
        .filter(|&i| tau_at(bits, i) == Some(t))
        .filter_map(|i| sigma_within(bits, i, q).map(|residual| Occurrence { position: i, residual }))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn index_matches_brute_force(bits in common::bits(5000), queries in prop::collection::vec(0usize..40, 8)) {
        let idx = RunIndex::from_bits(&bits);
        let psi = bits.iter().position(|&b| b == 0);
        prop_assert_eq!(idx.psi(), psi);
        if bits.is_empty() {
            return Ok(());
        }
        let last = bits.len() - 1;
        match tau_at(&bits, last) {
            Some(t) if psi.is_some() => prop_assert_eq!(idx.current_tau().unwrap(), t),
            _ => prop_assert!(idx.current_tau().is_err()),
        }
        if psi.is_none() {
            return Ok(());
        }
        for &t in &queries {
            let brute = brute_occurrences(&bits, t);
            prop_assert_eq!(idx.occurrences(t), brute.as_slice());
            prop_assert_eq!(idx.match_count(t).unwrap(), brute.len());
            let less = (0..bits.len()).filter(|&i| tau_at(&bits, i).is_some_and(|a| a < t)).count();
            prop_assert_eq!(idx.count_tau_less(t).unwrap(), less as u64);
            let eq = (0..bits.len()).filter(|&i| tau_at(&bits, i) == Some(t)).count();
            prop_assert_eq!(idx.tau_count(t), eq as u64);
            let m = brute.len() / 2 + 1;
            match idx.last_m_occurrences(t, m) {
                Ok(s) => prop_assert_eq!(s, &brute[brute.len() - m..]),
                Err(_) => prop_assert!(brute.len() < m),
            }
            let (lo, hi) = (last / 4, last / 2 + 1);
            let inside: Vec<Occurrence> = brute
                .iter()
                .copied()
                .filter(|o| o.position > lo && o.position < hi)
                .take(3)
                .collect();
            prop_assert_eq!(idx.first_m_in_window(t, lo, hi, 3), inside.as_slice());
        }
    }

    #[test]
    fn streaming_never_looks_ahead(bits in common::bits(800), cut in 0usize..800) {
        let cut = cut.min(bits.len());
        let mut streamed = RunIndex::new();
        for &b in &bits[..cut] {
            streamed.feed(b);
        }
        let fresh = RunIndex::from_bits(&bits[..cut]);
        prop_assert_eq!(streamed.psi(), fresh.psi());
        for t in 0..20 {
            prop_assert_eq!(streamed.occurrences(t), fresh.occurrences(t));
        }
        // every stored residual is visible inside the prefix
        for t in 0..=streamed.max_stored_tau() {
            for o in streamed.occurrences(t) {
                prop_assert!(o.position + o.residual + 1 < cut);
                prop_assert_eq!(bits[o.position + o.residual + 1], 0);
            }
        }
    }
}
