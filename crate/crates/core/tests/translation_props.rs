//! The translation layer: second-level builds map bijectively onto broad
//! numbers, derivations written with the primed constructors round-trip
//! and evaluate to the same values as their plain translations, and the
//! bracket rubric generates exactly the broad-number fragments.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::{basic_deriv, broad_two_rule_rubric, trigger_deriv};
use hfgen::broadnum::{
    broad_fragment, broad_rank, eval_derivation_pseudo, generate_bu2_fragment, theta_derivs,
    theta_reduce, translation_preserves_value, BroadSignature, Direction,
};
use hfgen::budget::Budget;
use hfgen::encodings::{encode, func, Tag};
use hfgen::genengine::{bracket_broadsig, eval_derivation_broad, generate_set_broad};
use hfgen::oracle::naive_generate_broad;
use hfgen::ordinal::OrdCNF;
use hfgen::terms::Signature;
use hfgen::{HfSet, Store};

fn primed_basic(st: &Store, i: u64, children: &[(u64, HfSet)], p: u64) -> HfSet {
    let mut g = BTreeMap::new();
    for (k, d) in children {
        g.insert(st.numeral(*k).unwrap(), d.clone());
    }
    encode(
        st,
        Tag::BasicP,
        &[
            st.numeral(i).unwrap(),
            func(st, &g).unwrap(),
            st.numeral(p).unwrap(),
        ],
    )
    .unwrap()
}

fn primed_trigger(st: &Store, m: &HfSet, i: u64, children: &[(u64, HfSet)], p: u64) -> HfSet {
    let mut g = BTreeMap::new();
    for (k, d) in children {
        g.insert(st.numeral(*k).unwrap(), d.clone());
    }
    encode(
        st,
        Tag::TriggerP,
        &[
            m.clone(),
            st.numeral(i).unwrap(),
            func(st, &g).unwrap(),
            st.numeral(p).unwrap(),
        ],
    )
    .unwrap()
}

/// Five broad signatures of varied support and arity, from empty to a
/// ternary symbol, including one whose support reaches past the start.
fn sample_signatures(st: &Store) -> Vec<BroadSignature> {
    let start = st.empty();
    let sig = |arities: &[(u64, u64)]| Signature::from_nat_arities(st, arities).unwrap();

    let g1 = BroadSignature::new();

    let mut g2 = BroadSignature::new();
    g2.insert(start.clone(), sig(&[(0, 0)]));

    let mut g3 = BroadSignature::new();
    g3.insert(start.clone(), sig(&[(0, 0), (1, 1)]));

    let mut g4 = BroadSignature::new();
    g4.insert(start.clone(), sig(&[(0, 0)]));
    let built = encode(
        st,
        Tag::Build,
        &[
            start.clone(),
            st.numeral(0).unwrap(),
            func(st, &BTreeMap::new()).unwrap(),
        ],
    )
    .unwrap();
    g4.insert(built, sig(&[(5, 2)]));

    let mut g5 = BroadSignature::new();
    g5.insert(start, sig(&[(2, 3)]));

    vec![g1, g2, g3, g4, g5]
}

#[test]
fn second_level_builds_translate_onto_the_broad_fragment() {
    let st = Store::new();
    for (which, g) in sample_signatures(&st).into_iter().enumerate() {
        for depth in 0..=3 {
            let broad = broad_fragment(&st, &g, depth).unwrap();
            let second = generate_bu2_fragment(&st, &g, depth).unwrap();
            assert_eq!(
                broad.len(),
                second.len(),
                "signature {which} depth {depth}: fragment sizes differ"
            );

            let image: BTreeSet<HfSet> = second
                .iter()
                .map(|x| theta_reduce(Direction::Forward, x, &g).unwrap())
                .collect();
            assert_eq!(image, broad, "signature {which} depth {depth}");

            for x in &second {
                let there = theta_reduce(Direction::Forward, x, &g).unwrap();
                let back = theta_reduce(Direction::Backward, &there, &g).unwrap();
                assert_eq!(&back, x);
            }
            for y in &broad {
                let back = theta_reduce(Direction::Backward, y, &g).unwrap();
                let there = theta_reduce(Direction::Forward, &back, &g).unwrap();
                assert_eq!(&there, y);
            }
        }
    }
}

#[test]
fn translation_rejects_foreign_shapes() {
    let st = Store::new();
    let g = BroadSignature::new();
    let junk = st.numeral(3).unwrap();
    assert!(theta_reduce(Direction::Forward, &junk, &g).is_err());
    assert!(theta_reduce(Direction::Backward, &junk, &g).is_err());
    assert!(theta_derivs(Direction::Forward, &junk).is_err());
}

#[test]
fn primed_derivations_round_trip_and_keep_their_values() {
    let st = Store::new();
    let b = broad_two_rule_rubric(&st, None, None);

    let p1 = primed_basic(&st, 1, &[], 50);
    let p2 = primed_basic(&st, 1, &[], 70);
    let p3 = primed_trigger(
        &st,
        &primed_basic(&st, 1, &[], 50),
        2,
        &[(0, primed_basic(&st, 1, &[], 70)), (1, primed_basic(&st, 1, &[], 51))],
        5,
    );

    for (primed, value) in [(&p1, 100), (&p2, 140), (&p3, 107)] {
        assert_eq!(
            eval_derivation_pseudo(&b, primed).unwrap(),
            st.numeral(value).unwrap()
        );
        assert!(translation_preserves_value(&b, primed).unwrap());

        let plain = theta_derivs(Direction::Forward, primed).unwrap();
        assert_eq!(
            eval_derivation_broad(&b, &plain).unwrap(),
            st.numeral(value).unwrap()
        );
        let back = theta_derivs(Direction::Backward, &plain).unwrap();
        assert_eq!(&back, primed);
    }

    // The forward image is the plain encoding built directly.
    let plain3 = trigger_deriv(
        &st,
        &basic_deriv(&st, 1, &[], 50),
        2,
        &[(0, basic_deriv(&st, 1, &[], 70)), (1, basic_deriv(&st, 1, &[], 51))],
        5,
    );
    assert_eq!(theta_derivs(Direction::Forward, &p3).unwrap(), plain3);
}

#[test]
fn bracket_rubric_generates_the_broad_fragments() {
    let st = Store::new();
    let signatures = sample_signatures(&st);

    // A finite signature stabilizes; the brute-force closure agrees.
    let finite = &signatures[1];
    let r = bracket_broadsig(&st, finite);
    let g = generate_set_broad(&r, &Budget::depth(5)).unwrap();
    assert!(g.stabilized);
    assert_eq!(g.set, broad_fragment(&st, finite, 4).unwrap());
    assert_eq!(g.set, naive_generate_broad(&r, 50).unwrap());

    // Growing signatures agree fragment by fragment.
    for g_sig in [&signatures[2], &signatures[4]] {
        let r = bracket_broadsig(&st, g_sig);
        for depth in 0..=2 {
            let engine = generate_set_broad(&r, &Budget::depth(depth + 1)).unwrap();
            assert_eq!(engine.set, broad_fragment(&st, g_sig, depth).unwrap());
        }
    }
}

#[test]
fn build_rank_counts_build_depth() {
    let st = Store::new();
    let g = &sample_signatures(&st)[2];

    assert_eq!(broad_rank(&st.empty()).unwrap(), OrdCNF::zero());

    let mut previous: BTreeSet<HfSet> = BTreeSet::new();
    for depth in 0..=3 {
        let fragment = broad_fragment(&st, g, depth).unwrap();
        for x in &fragment {
            let rank = broad_rank(x).unwrap();
            assert!(rank <= OrdCNF::from_nat(depth as u64));
            if !previous.contains(x) {
                assert_eq!(
                    rank,
                    OrdCNF::from_nat(depth as u64),
                    "an element new at depth {depth} must have that rank"
                );
            }
        }
        previous = fragment;
    }
}
