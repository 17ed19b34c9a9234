mod common;

use proptest::prelude::*;

use tabinterp::logic::{is_nnf, to_nnf, Signature};
use tabinterp::models::{count_structures, enumerate_structures, isomorphism, satisfies};
use tabinterp::syntax::{parse, print};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn print_parse_round_trip(phi in common::sentence()) {
        let text = print(&phi);
        prop_assert_eq!(parse(&text).unwrap(), phi, "{}", text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn nnf_is_idempotent(phi in common::sentence()) {
        let n = to_nnf(&phi);
        prop_assert!(is_nnf(&n));
        prop_assert_eq!(to_nnf(&n), n);
    }

    #[test]
    fn nnf_preserves_truth(phi in common::sentence(), a in common::structure()) {
        prop_assert_eq!(satisfies(&a, &phi).unwrap(), satisfies(&a, &to_nnf(&phi)).unwrap());
    }

    #[test]
    fn truth_is_isomorphism_invariant(
        phi in common::sentence(),
        a in common::structure(),
        seed in any::<u64>(),
    ) {
        let n = a.domain;
        let mut perm: Vec<usize> = (0..n).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            let j = (s % (i as u64 + 1)) as usize;
            perm.swap(i, j);
            s /= i as u64 + 1;
        }
        let b = a.permuted(&perm);
        prop_assert!(isomorphism(&a, &b).is_some());
        prop_assert_eq!(satisfies(&a, &phi).unwrap(), satisfies(&b, &phi).unwrap());
    }
}

#[test]
fn structure_count_matches_enumeration() {
    let sig = Signature::default().with_relation("P", 1).with_relation("R", 2).with_constant("a");
    for n in 1..=2 {
        let expected = 2u128.pow((n + n * n) as u32) * n as u128;
        assert_eq!(count_structures(&sig, n), Some(expected));
        assert_eq!(enumerate_structures(&sig, n).count() as u128, expected);
    }
    let wide = Signature::default().with_relation("T", 3);
    assert_eq!(count_structures(&wide, 3), Some(1 << 27));
}
