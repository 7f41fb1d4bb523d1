//! Properties of the generation engines: family entries replay through
//! the derivation evaluator, generated sets are least prefixpoints,
//! monotone operators stabilize within the size of their universe, the
//! trivial broad lifting changes nothing, and budgets cut honestly.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use common::{basic_deriv, deriv, random_set, two_rule_rubric};
use hfgen::budget::Budget;
use hfgen::genengine::{
    eval_derivation, eval_derivation_broad, gamma_step, generate_family, generate_family_broad,
    generate_set, generate_set_broad, hat_rubric, is_inductive, iterate_monotone, Rubric, Rule,
};
use hfgen::oracle::family_minimality_check;
use hfgen::Store;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Rule 0 starts the chain at 10; rule 1 steps any value to its
/// successor. The class cap at 13 makes the closure exactly {10..13}.
fn chain_rubric(st: &Store) -> Rubric {
    let mut rules = BTreeMap::new();
    let st0 = st.clone();
    rules.insert(
        st.numeral(0).unwrap(),
        Rule::new(st.empty(), move |_| {
            Ok(common::affine_family(&st0, 0, |_| 10, Some(1)))
        }),
    );
    let st1 = st.clone();
    rules.insert(
        st.numeral(1).unwrap(),
        Rule::new(st.singleton(&st.empty()).unwrap(), move |args| {
            let m = hfgen::encodings::to_nat(&args[&st1.empty()]).unwrap();
            Ok(common::affine_family(&st1, m + 1, |p| p, Some(1)))
        }),
    );
    Rubric::new(rules).with_class(common::nat_class(13))
}

#[test]
fn family_entries_replay_through_the_evaluator() {
    let st = Store::new();
    let r = two_rule_rubric(&st, Some(2), Some(1000));
    let fam = generate_family(&st, &r, &Budget::new(2, 100_000, 10_000_000)).unwrap();
    assert_eq!(fam.entries.len(), 10);
    for (key, value) in &fam.entries {
        assert_eq!(&eval_derivation(&r, key).unwrap(), value);
    }

    // The family's range at depth d is the set generated in d rounds.
    let range: BTreeSet<_> = fam.entries.values().cloned().collect();
    let set = generate_set(&r, &Budget::new(2, 100_000, 10_000_000)).unwrap();
    assert_eq!(range, set.set);
}

#[test]
fn stabilized_families_are_entrywise_minimal() {
    let st = Store::new();
    let r = chain_rubric(&st);
    let fam = generate_family(&st, &r, &Budget::new(8, 1000, 1_000_000)).unwrap();
    assert!(fam.stabilized);
    assert_eq!(fam.entries.len(), 4);
    for (key, value) in &fam.entries {
        assert_eq!(&eval_derivation(&r, key).unwrap(), value);
    }
    assert!(family_minimality_check(&st, &r, &fam.entries).unwrap());
}

#[test]
fn generated_sets_are_least_prefixpoints_exhaustively() {
    let st = Store::new();
    let r = chain_rubric(&st);
    let g = generate_set(&r, &Budget::new(8, 1000, 1_000_000)).unwrap();
    assert!(g.stabilized);
    let expected: BTreeSet<_> = (10..=13).map(|n| st.numeral(n).unwrap()).collect();
    assert_eq!(g.set, expected);

    // The stabilized set is a fixpoint, and no proper subset of it is
    // even a prefixpoint.
    assert_eq!(gamma_step(&r, &g.set).unwrap(), g.set);
    assert!(is_inductive(&r, &g.set).unwrap());
    let elems: Vec<_> = g.set.iter().cloned().collect();
    for mask in 0..(1u32 << elems.len()) - 1 {
        let sub: BTreeSet<_> = elems
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, e)| e.clone())
            .collect();
        let image = gamma_step(&r, &sub).unwrap();
        assert!(
            !image.is_subset(&sub),
            "proper subset {mask:b} must not be a prefixpoint"
        );
        assert!(!is_inductive(&r, &sub).unwrap());
    }

    // Monotonicity of the step on nested subsets.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let small: u32 = rng.gen_range(0..16);
        let large = small | rng.gen_range(0..16u32);
        let pick = |mask: u32| -> BTreeSet<_> {
            elems
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, e)| e.clone())
                .collect()
        };
        let lo = gamma_step(&r, &pick(small)).unwrap();
        let hi = gamma_step(&r, &pick(large)).unwrap();
        assert!(lo.is_subset(&hi));
    }
}

#[test]
fn random_monotone_operators_stabilize_within_the_universe_size() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..300 {
        let st = Store::new();
        let universe: Vec<_> = {
            let mut seen = BTreeSet::new();
            while seen.len() < 5 {
                seen.insert(random_set(&st, &mut rng, 3));
            }
            seen.into_iter().collect()
        };
        let n = rng.gen_range(1..=universe.len());
        let universe = &universe[..n];

        // A table operator f(S) = union of B_i over rows with A_i within
        // S; any such operator is monotone.
        let rows: Vec<(u32, u32)> = (0..rng.gen_range(1..=6))
            .map(|_| (rng.gen_range(0..1u32 << n), rng.gen_range(0..1u32 << n)))
            .collect();
        let of_mask = |mask: u32| -> BTreeSet<_> {
            universe
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, e)| e.clone())
                .collect()
        };
        let to_mask = |s: &BTreeSet<hfgen::HfSet>| -> u32 {
            universe
                .iter()
                .enumerate()
                .filter(|(_, e)| s.contains(e))
                .map(|(i, _)| 1 << i)
                .sum()
        };
        let step_mask = |mask: u32| -> u32 {
            rows.iter()
                .filter(|(a, _)| a & mask == *a)
                .map(|(_, b)| b)
                .fold(0, |acc, b| acc | b)
        };
        let rows_for_op = rows.clone();
        let (chain, stabilized) = iterate_monotone(
            |s| {
                let m = to_mask(s);
                let out = rows_for_op
                    .iter()
                    .filter(|(a, _)| a & m == *a)
                    .map(|(_, b)| b)
                    .fold(0, |acc, b| acc | b);
                Ok(of_mask(out))
            },
            n + 1,
        )
        .unwrap();

        assert!(stabilized, "a 5-element universe stabilizes in 6 rounds");
        assert!(chain.len() <= n + 2);
        for pair in chain.windows(2) {
            assert!(pair[0].is_subset(&pair[1]), "the chain must be increasing");
        }

        // Brute-force the least fixpoint over bitmasks.
        let mut m = 0u32;
        loop {
            let next = step_mask(m);
            if next == m {
                break;
            }
            m = next;
        }
        assert_eq!(chain.last().unwrap(), &of_mask(m));
    }
}

#[test]
fn trivial_broad_lifting_changes_nothing() {
    let st = Store::new();
    let r = two_rule_rubric(&st, Some(2), Some(1000));
    let b = hat_rubric(&r);
    let budget = Budget::new(2, 100_000, 10_000_000);

    let plain = generate_set(&r, &budget).unwrap();
    let broad = generate_set_broad(&b, &budget).unwrap();
    assert_eq!(plain.set, broad.set);
    assert_eq!(plain.stabilized, broad.stabilized);

    let plain_fam = generate_family(&st, &r, &budget).unwrap();
    let broad_fam = generate_family_broad(&st, &b, &budget).unwrap();
    assert_eq!(plain_fam.entries.len(), broad_fam.entries.len());
    let broad_range: BTreeSet<_> = broad_fam.entries.values().cloned().collect();
    let plain_range: BTreeSet<_> = plain_fam.entries.values().cloned().collect();
    assert_eq!(broad_range, plain_range);

    let d = deriv(&st, 1, &[], 50);
    let bd = basic_deriv(&st, 1, &[], 50);
    assert_eq!(
        eval_derivation(&r, &d).unwrap(),
        eval_derivation_broad(&b, &bd).unwrap()
    );
    assert_eq!(eval_derivation(&r, &d).unwrap(), st.numeral(100).unwrap());
}

#[test]
fn budgets_cut_honestly() {
    let st = Store::new();
    let r = two_rule_rubric(&st, Some(2), Some(1000));

    // Depth truncation: one round yields the nullary outputs, unstably.
    let g = generate_set(&r, &Budget::new(1, 100_000, 10_000_000)).unwrap();
    assert!(!g.stabilized);
    let seeds: BTreeSet<_> = [100, 102].iter().map(|&n| st.numeral(n).unwrap()).collect();
    assert_eq!(g.set, seeds);

    // Element truncation: the run stops early and says so. The cap is
    // checked between rule firings, so one firing may overshoot it by a
    // family's worth of members; what matters is the honest flag and a
    // strictly smaller set than the untruncated run's.
    let full = generate_set(&r, &Budget::new(4, 100_000, 10_000_000)).unwrap();
    let g = generate_set(&r, &Budget::new(4, 3, 10_000_000)).unwrap();
    assert!(!g.stabilized);
    assert!(g.set.len() < full.set.len());
    assert!(g.set.is_subset(&full.set));

    // Fuel truncation behaves the same way.
    let g = generate_set(&r, &Budget::new(4, 100_000, 5)).unwrap();
    assert!(!g.stabilized);

    // A roomy budget stabilizes the finite chain and reports its rounds.
    let r = chain_rubric(&st);
    let g = generate_set(&r, &Budget::new(10, 1000, 1_000_000)).unwrap();
    assert!(g.stabilized);
    assert!(g.rounds <= 6);

    // Degenerate budgets are rejected outright.
    let result = std::panic::catch_unwind(|| Budget::new(0, 1, 1));
    assert!(result.is_err());
}

#[test]
fn dynamic_and_table_triggers_agree() {
    let st = Store::new();
    let b_table = common::broad_two_rule_rubric(&st, Some(2), Some(150));

    // The same rubric with its trigger table wrapped behind a closure.
    let table = match &b_table.trigger {
        hfgen::genengine::TriggerMap::Table(t) => t.clone(),
        _ => unreachable!("the shared helper builds a table"),
    };
    let b_dyn = hfgen::genengine::BroadRubric {
        basic: b_table.basic.clone(),
        trigger: hfgen::genengine::TriggerMap::Dynamic(Arc::new(move |x| table.get(x).cloned())),
    };

    let budget = Budget::new(2, 100_000, 10_000_000);
    let s1 = generate_set_broad(&b_table, &budget).unwrap();
    let s2 = generate_set_broad(&b_dyn, &budget).unwrap();
    assert_eq!(s1.set, s2.set);

    let f1 = generate_family_broad(&st, &b_table, &budget).unwrap();
    let f2 = generate_family_broad(&st, &b_dyn, &budget).unwrap();
    assert_eq!(f1.entries, f2.entries);
}
