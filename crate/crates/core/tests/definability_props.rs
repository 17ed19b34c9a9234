mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use tabinterp::access::{bind_patt, check_access_determinacy};
use tabinterp::definability::{explicit_definition, padoa_counterexample, robinson_separator, DefinabilityError, Theory};
use tabinterp::fragments::classify;
use tabinterp::interpolation::entails;
use tabinterp::logic::Formula;
use tabinterp::models::{find_model, satisfies};
use tabinterp::syntax::print;

const BUDGET: usize = 2_000;

fn theory() -> impl Strategy<Value = Theory> {
    prop::collection::vec(common::sentence(), 1..=3).prop_map(|s| Theory::new("t", s))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn padoa_pairs_exclude_definitions(sigma in theory()) {
        let tau: BTreeSet<String> = ["Q".to_string(), "R".to_string()].into();
        let pair = padoa_counterexample(&sigma, "P", &tau, 2);
        let def = explicit_definition(&sigma, "P", &tau, BUDGET);
        if let Some((a, b)) = &pair {
            prop_assert!(def.is_err());
            prop_assert!(sigma.sentences.iter().all(|s| satisfies(a, s).unwrap() && satisfies(b, s).unwrap()));
            prop_assert_eq!(a.relations.get("Q"), b.relations.get("Q"));
            prop_assert_eq!(a.relations.get("R"), b.relations.get("R"));
            prop_assert_ne!(a.relations.get("P"), b.relations.get("P"));
        }
        if let Ok(d) = &def {
            prop_assert!(pair.is_none());
            prop_assert!(!d.formula.relations().contains("P"));
        }
        if let Err(DefinabilityError::ImplicitDefinabilityRefuted(..)) = def {
            prop_assert!(padoa_counterexample(&sigma, "P", &tau, 3).is_some());
        }
    }

    #[test]
    fn separators_separate(s1 in theory(), s2 in theory()) {
        if let Ok(theta) = robinson_separator(&s1, &s2, BUDGET) {
            prop_assert!(entails(&s1.conjunction(), &theta, BUDGET).unwrap().is_closed(), "{}", print(&theta));
            prop_assert!(entails(&s2.conjunction(), &Formula::negate(theta.clone()), BUDGET).unwrap().is_closed());
            let mut both = s1.sentences.clone();
            both.extend(s2.sentences.iter().cloned());
            prop_assert!(find_model(&both, 2).is_none());
        }
    }

    #[test]
    fn binding_patterns_give_determinacy(phi in common::sentence(), a in common::structure()) {
        if let Some(s) = bind_patt(&phi) {
            prop_assert!(check_access_determinacy(&phi, &s, &a, &[]).unwrap(), "{}", print(&phi));
        }
    }

    #[test]
    fn empty_relativization_is_quantifier_free(phi in common::sentence()) {
        prop_assert_eq!(classify(&phi, &BTreeSet::new()).relativized, phi.is_quantifier_free());
    }
}
