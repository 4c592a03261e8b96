//! Property tests against a small, independent bitmask model of the theory.

use std::collections::BTreeSet;
use std::sync::Arc;

use hornex_core::bitset::all_subsets;
use hornex_core::eval::{precise_at, recalls_at, scores_over};
use hornex_core::exact::{plain_disagreements, strong_disagreements};
use hornex_core::io::{
    parse_burmeister, parse_formula, serialize_formula, write_burmeister, ContextDocument,
};
use hornex_core::learner::{horn1_observed, refine_negative, refine_positive};
use hornex_core::oracle::{envelope_closure, CachingOracle};
use hornex_core::*;
use proptest::prelude::*;

// ---- reference model on u64 masks ----

fn mask_env(rows: &[u64], a: u64) -> Option<u64> {
    rows.iter()
        .filter(|&&r| r & a == a)
        .fold(None, |acc, &r| Some(acc.map_or(r, |m| m & r)))
}

fn mask_hull(rows: &[u64]) -> BTreeSet<u64> {
    let mut hull: BTreeSet<u64> = rows.iter().copied().collect();
    loop {
        let pairs: Vec<u64> = hull
            .iter()
            .flat_map(|a| hull.iter().map(move |b| a & b))
            .collect();
        let before = hull.len();
        hull.extend(pairs);
        if hull.len() == before {
            return hull;
        }
    }
}

type MaskRule = (u64, Option<u64>);

fn mask_closure(rules: &[MaskRule], x: u64) -> Option<u64> {
    let mut cur = x;
    loop {
        let mut next = cur;
        for &(p, c) in rules {
            if p & next == p {
                next |= c?;
            }
        }
        if next == cur {
            return Some(cur);
        }
        cur = next;
    }
}

/// Canonical basis by the definition: pseudo-closed sets in order of size.
fn mask_dg(width: usize, close: impl Fn(u64) -> Option<u64>) -> BTreeSet<MaskRule> {
    let full = (1u64 << width) - 1;
    let mut subsets: Vec<u64> = (0..=full).collect();
    subsets.sort_by_key(|s| (s.count_ones(), *s));
    let mut pseudo: Vec<(u64, Option<u64>)> = Vec::new();
    for p in subsets {
        let cp = close(p);
        if cp == Some(p) {
            continue;
        }
        let respects = pseudo
            .iter()
            .filter(|(q, _)| q & p == *q && *q != p)
            .all(|(_, cq)| matches!(cq, Some(c) if c & p == *c));
        if respects {
            pseudo.push((p, cp));
        }
    }
    pseudo.into_iter().collect()
}

fn to_masks(h: &HornFormula) -> BTreeSet<MaskRule> {
    h.iter()
        .map(|imp| {
            (
                imp.premise.to_bits(),
                imp.conclusion.as_set().map(AttributeSet::to_bits),
            )
        })
        .collect()
}

fn rules_of(h: &HornFormula) -> Vec<MaskRule> {
    to_masks(h).into_iter().collect()
}

fn closure_bits(c: &ClosureResult) -> Option<u64> {
    c.as_set().map(AttributeSet::to_bits)
}

// ---- generators ----

fn dataset(max_width: usize, max_rows: usize) -> impl Strategy<Value = (usize, Vec<u64>)> {
    (1..=max_width)
        .prop_flat_map(move |w| (Just(w), prop::collection::vec(0..(1u64 << w), 0..=max_rows)))
}

fn formula_in(width: usize, max_len: usize) -> impl Strategy<Value = HornFormula> {
    let rule = (
        0..(1u64 << width),
        prop::option::weighted(0.8, 0..(1u64 << width)),
    );
    prop::collection::vec(rule, 0..=max_len).prop_map(move |rules| {
        HornFormula::from_implications(
            width,
            rules.into_iter().map(|(p, c)| Implication {
                premise: AttributeSet::from_bits(width, p),
                conclusion: match c {
                    Some(c) => ClosureResult::Closed(AttributeSet::from_bits(width, c)),
                    None => ClosureResult::Bottom,
                },
            }),
        )
        .unwrap()
    })
}

fn data_and_formula() -> impl Strategy<Value = (usize, Vec<u64>, HornFormula)> {
    dataset(6, 6).prop_flat_map(|(w, rows)| (Just(w), Just(rows), formula_in(w, 5)))
}

fn family(width: usize, rows: &[u64]) -> AssignmentFamily {
    AssignmentFamily::from_bits(width, rows)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn forward_closure_is_a_closure((w, _rows, h) in data_and_formula()) {
        let rules = rules_of(&h);
        for x in all_subsets(w) {
            let hx = h.closure_of(&x);
            prop_assert_eq!(closure_bits(&hx), mask_closure(&rules, x.to_bits()));
            prop_assert!(hx.contains_set(&x));
            match &hx {
                ClosureResult::Closed(c) => prop_assert_eq!(h.closure_of(c), hx.clone()),
                ClosureResult::Bottom => {}
            }
            for y in all_subsets(w).filter(|y| x.is_subset(y)) {
                prop_assert!(hx.is_subset_of(&h.closure_of(&y)));
            }
        }
    }

    #[test]
    fn env_closure_and_hull_match_reference((w, rows) in dataset(6, 6)) {
        let v = family(w, &rows);
        for x in all_subsets(w) {
            prop_assert_eq!(closure_bits(&v.env_closure(&x).unwrap()), mask_env(&rows, x.to_bits()));
        }
        let hull: BTreeSet<u64> = intersection_closure(&v).iter().map(AttributeSet::to_bits).collect();
        prop_assert_eq!(hull, mask_hull(&rows));
    }

    #[test]
    fn canonical_basis_matches_definition((w, rows) in dataset(7, 8)) {
        let v = family(w, &rows);
        let expected = mask_dg(w, |x| mask_env(&rows, x));
        let basis = dg_basis(&v, None).unwrap();
        prop_assert_eq!(basis.len(), expected.len());
        prop_assert_eq!(&to_masks(&basis), &expected);
        prop_assert_eq!(&to_masks(&brute_force_dg(&v).unwrap()), &expected);
        // sound and complete for the data closure
        for x in all_subsets(w) {
            prop_assert_eq!(basis.closure_of(&x), v.env_closure(&x).unwrap());
        }
    }

    #[test]
    fn canonical_basis_is_irredundant((w, rows) in dataset(6, 6)) {
        let basis = dg_basis(&family(w, &rows), None).unwrap();
        for k in 0..basis.len() {
            let rest = HornFormula::from_implications(
                w,
                basis.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, i)| i.clone()),
            ).unwrap();
            prop_assert!(!entails(&rest, &basis.as_slice()[k]).unwrap());
        }
    }

    #[test]
    fn membership_through_queries((w, rows) in dataset(6, 5)) {
        let v = Arc::new(family(w, &rows));
        let hull = mask_hull(&rows);
        let mut oracle = DatasetOracle::new(v.clone());
        for x in all_subsets(w) {
            prop_assert_eq!(is_member(&x, &mut oracle).unwrap(), hull.contains(&x.to_bits()));
            prop_assert_eq!(envelope_closure(&x, &mut oracle).unwrap(), v.env_closure(&x).unwrap());
        }
    }

    #[test]
    fn closure_agreement_criterion((w, rows, h) in data_and_formula()) {
        let v = Arc::new(family(w, &rows));
        let mut oracle = DatasetOracle::new(v.clone());
        for x in all_subsets(w) {
            let hx = h.closure_of(&x);
            let in_hull_or_bottom = match &hx {
                ClosureResult::Bottom => true,
                ClosureResult::Closed(y) => is_member(y, &mut oracle).unwrap(),
            };
            let imp = Implication { premise: x.clone(), conclusion: hx.clone() };
            let holds = v.holds(&imp).unwrap().is_valid();
            prop_assert_eq!(hx == v.env_closure(&x).unwrap(), in_hull_or_bottom && holds);
            // the two sampled scores meet exactly where closures agree
            prop_assert_eq!(
                precise_at(&h, &v, &x) && recalls_at(&h, &v, &x),
                hx == v.env_closure(&x).unwrap()
            );
        }
    }

    #[test]
    fn strong_error_dominates_plain((w, rows, h) in data_and_formula()) {
        let v = family(w, &rows);
        let plain = plain_disagreements(&h, &v).unwrap();
        let strong: BTreeSet<_> = strong_disagreements(&h, &v).unwrap().into_iter().collect();
        prop_assert!(plain.iter().all(|x| strong.contains(x)));
        prop_assert!(exact_strong_error(&h, &v).unwrap() >= exact_plain_error(&h, &v).unwrap());
    }

    #[test]
    fn exhaustive_scores_match_definitions((w, rows, h) in data_and_formula()) {
        let v = family(w, &rows);
        let rules = rules_of(&h);
        let n = 1u64 << w;
        let (mut p, mut r) = (0u64, 0u64);
        for a in 0..n {
            let hx = mask_closure(&rules, a);
            let env = mask_env(&rows, a);
            // v ⊨ a → H(a): no row containing a misses H(a)
            let precise = rows.iter().filter(|&&row| row & a == a).all(|&row| matches!(hx, Some(c) if row & c == c));
            let recalls = match (env, hx) {
                (_, None) => true,
                (None, Some(_)) => false,
                (Some(e), Some(c)) => e & c == e,
            };
            p += u64::from(precise);
            r += u64::from(recalls);
        }
        let s = scores_over(&h, &v, all_subsets(w)).unwrap();
        prop_assert_eq!(s.precision, p as f64 / n as f64);
        prop_assert_eq!(s.recall, r as f64 / n as f64);
    }

    #[test]
    fn caching_does_not_change_validity(
        (w, rows) in dataset(5, 5),
        queries in prop::collection::vec((0u64..32, prop::option::of(0u64..32), any::<bool>()), 1..40),
    ) {
        let v = Arc::new(family(w, &rows));
        let mut plain = DatasetOracle::new(v.clone());
        let mut cached = CachingOracle::new(DatasetOracle::new(v.clone()), true, true);
        let m = (1u64 << w) - 1;
        for (p, c, restricted) in queries {
            let imp = Implication {
                premise: AttributeSet::from_bits(w, p & m),
                conclusion: match c {
                    Some(c) => ClosureResult::Closed(AttributeSet::from_bits(w, c & m)),
                    None => ClosureResult::Bottom,
                },
            };
            let truth = plain.ask_restricted(&imp).unwrap();
            if restricted {
                prop_assert_eq!(cached.ask_restricted(&imp).unwrap(), truth);
            } else {
                match cached.ask(&imp).unwrap() {
                    OracleAnswer::Valid => prop_assert!(truth),
                    OracleAnswer::Counterexample(x) => {
                        prop_assert!(!truth);
                        prop_assert!(v.rows().contains(&x));
                        prop_assert!(!imp.is_satisfied_by(&x));
                    }
                }
            }
        }
        prop_assert!(cached.counts().total() <= plain.counts().total());
    }

    #[test]
    fn refinement_postconditions((w, rows, h) in data_and_formula(), pick in any::<u64>()) {
        let hull = mask_hull(&rows);
        // the learner keeps every premise inside its conclusion
        let h = HornFormula::from_implications(w, h.iter().map(Implication::normalized)).unwrap();
        let x = AttributeSet::from_bits(w, pick & ((1u64 << w) - 1));
        let mut h2 = h.clone();
        if h.is_model(&x) {
            let before = h.len();
            refine_negative(&mut h2, &x, |c| hull.contains(&c.to_bits()));
            prop_assert!(!h2.is_model(&x));
            prop_assert!(h2.len() == before || h2.len() == before + 1);
        } else {
            refine_positive(&mut h2, &x);
            prop_assert!(h2.is_model(&x));
            prop_assert_eq!(h2.len(), h.len());
        }
    }

    #[test]
    fn horn1_returns_canonical_basis(h in (1usize..=7).prop_flat_map(|w| formula_in(w, 5))) {
        let w = h.width();
        let target_rules = rules_of(&h);
        let expected = mask_dg(w, |x| mask_closure(&target_rules, x));
        let oracles = std::cell::RefCell::new(TargetFormulaOracles::new(h).unwrap());
        let mut max_len = 0;
        let out = horn1_observed(
            w,
            |g| oracles.borrow_mut().equivalent(g),
            |x| oracles.borrow_mut().member(x),
            Some(10_000),
            |g| max_len = max_len.max(g.len()),
        ).unwrap();
        prop_assert_eq!(to_masks(&out), expected.clone());
        prop_assert!(max_len <= expected.len());
    }

    #[test]
    fn valid_hypothesis_runs_stay_valid((w, rows) in dataset(5, 5), seed in any::<u64>()) {
        let v = Arc::new(family(w, &rows));
        let mut config = LearnerConfig::new(0.2, 0.2).with_seed(seed);
        config.valid_hypothesis = true;
        let mut learner = PacLearner::new(w, config).unwrap();
        let mut oracle = DatasetOracle::new(v.clone());
        while let Some(q) = learner.pending_query().cloned() {
            let valid = oracle.ask_restricted(&q.implication).unwrap();
            learner.feed(if valid { learner::Reply::Valid } else { learner::Reply::Invalid }).unwrap();
            for imp in learner.hypothesis() {
                prop_assert!(v.holds(imp).unwrap().is_valid());
            }
        }
    }

    #[test]
    fn formula_records_round_trip((w, _rows, h) in data_and_formula()) {
        let universe = AttributeUniverse::anonymous(w);
        let text = serialize_formula(&h, &universe);
        prop_assert_eq!(parse_formula(&text, &universe).unwrap(), h);
    }

    #[test]
    fn burmeister_round_trip((w, rows) in dataset(8, 6)) {
        let universe = AttributeUniverse::anonymous(w);
        let labels: Vec<String> = (0..rows.len()).map(|i| format!("obj {i}")).collect();
        let doc = ContextDocument {
            title: Some("random".into()),
            universe,
            family: family(w, &rows).with_labels(labels),
            provenance: Default::default(),
        };
        prop_assert_eq!(parse_burmeister(&write_burmeister(&doc)).unwrap(), doc);
    }
}
