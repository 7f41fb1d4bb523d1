//! Helpers shared by the integration suites. The rubric and signature
//! builders here deliberately duplicate shapes used inside the library's
//! own unit tests: the suites rebuild their instruments from the public
//! API instead of borrowing internals.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use hfgen::encodings::{encode, func, to_nat, tuple, Tag};
use hfgen::genengine::{
    BroadRubric, ClassPred, GenError, IndexedFamily, ResultFamily, Rubric, Rule, TriggerMap,
};
use hfgen::terms::Signature;
use hfgen::{HfSet, Store};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// A random set of rank at most `max_rank`, biased toward small widths.
pub fn random_set(store: &Store, rng: &mut ChaCha8Rng, max_rank: u32) -> HfSet {
    if max_rank == 0 {
        return store.empty();
    }
    let width = rng.gen_range(0..=3);
    let elems: Vec<HfSet> = (0..width)
        .map(|_| {
            let r = rng.gen_range(0..max_rank);
            random_set(store, rng, r)
        })
        .collect();
    store.set(&elems).unwrap()
}

/// The four-symbol signature: 5 with arity {0,1,2,3}, 6 and 7 nullary,
/// 8 with arity {0,1,2}.
pub fn four_symbol_signature(store: &Store) -> Signature {
    Signature::from_nat_arities(store, &[(5, 4), (6, 0), (7, 0), (8, 3)]).unwrap()
}

pub fn nullary_term(store: &Store, symbol: u64) -> HfSet {
    hfgen::terms::term(&store.numeral(symbol).unwrap(), &BTreeMap::new()).unwrap()
}

pub fn term_over(store: &Store, symbol: u64, children: &[(u64, HfSet)]) -> HfSet {
    let mut g = BTreeMap::new();
    for (k, c) in children {
        g.insert(store.numeral(*k).unwrap(), c.clone());
    }
    hfgen::terms::term(&store.numeral(symbol).unwrap(), &g).unwrap()
}

pub fn nat_class(cap: u64) -> ClassPred {
    Arc::new(move |x: &HfSet| to_nat(x).is_some_and(|n| n <= cap))
}

/// The family `(f(p))` for numeral indices `p >= lo`; `cap` attaches an
/// enumerator listing the first `cap` indices.
pub fn affine_family(
    store: &Store,
    lo: u64,
    f: impl Fn(u64) -> u64 + Send + Sync + Clone + 'static,
    cap: Option<usize>,
) -> ResultFamily {
    let st_eval = store.clone();
    let f_eval = f.clone();
    let st_enum = store.clone();
    ResultFamily::Indexed(IndexedFamily {
        contains: Arc::new(move |p: &HfSet| to_nat(p).is_some_and(|n| n >= lo)),
        eval: Arc::new(move |p: &HfSet| {
            let n = to_nat(p).expect("contains() admitted a numeral");
            Ok(st_eval.numeral(f_eval(n))?)
        }),
        enumerate: cap.map(|cap| {
            let f = f.clone();
            Arc::new(move || {
                let mut out = Vec::with_capacity(cap);
                for p in lo..lo + cap as u64 {
                    out.push((st_enum.numeral(p)?, st_enum.numeral(f(p))?));
                }
                Ok(out)
            })
                as Arc<dyn Fn() -> Result<Vec<(HfSet, HfSet)>, GenError> + Send + Sync>
        }),
    })
}

fn rule_arg(store: &Store, args: &BTreeMap<HfSet, HfSet>, k: u64) -> Result<u64, GenError> {
    to_nat(&args[&store.numeral(k)?]).ok_or_else(|| GenError::MalformedDerivation {
        detail: "rule argument is not a numeral".into(),
    })
}

/// The two-rule rubric on naturals: rule 0 (arity {0,1}) sends [m0, m1]
/// to (m0 + m1 + p) for p >= 2*m0; rule 1 (arity {}) sends [] to (2p) for
/// p >= 50.
pub fn two_rule_rubric(store: &Store, cap: Option<usize>, class_cap: Option<u64>) -> Rubric {
    let mut rules = BTreeMap::new();
    let st0 = store.clone();
    rules.insert(
        store.numeral(0).unwrap(),
        Rule::new(store.numeral(2).unwrap(), move |args| {
            let m0 = rule_arg(&st0, args, 0)?;
            let m1 = rule_arg(&st0, args, 1)?;
            Ok(affine_family(&st0, 2 * m0, move |p| m0 + m1 + p, cap))
        }),
    );
    let st1 = store.clone();
    rules.insert(
        store.numeral(1).unwrap(),
        Rule::new(store.empty(), move |_| {
            Ok(affine_family(&st1, 50, |p| 2 * p, cap))
        }),
    );
    let rubric = Rubric::new(rules);
    match class_cap {
        Some(cap) => rubric.with_class(nat_class(cap)),
        None => rubric,
    }
}

/// The broad rubric on naturals whose basic part is [`two_rule_rubric`]:
/// 7 triggers one rule of arity {0,1} sending [m0, m1] to (m0 + m1 + 500p)
/// for p >= 9; 100 triggers three rules: arity {0,1,2} to (m0 + m1*m2 + p)
/// for p >= 17, arity {} to (p) for p >= 1000, and arity {0,1} to (m1 + p)
/// for p >= 4.
pub fn broad_two_rule_rubric(
    store: &Store,
    cap: Option<usize>,
    class_cap: Option<u64>,
) -> BroadRubric {
    let class = class_cap.map(nat_class);
    let with_class = |r: Rubric| match &class {
        Some(c) => r.with_class(c.clone()),
        None => r,
    };

    let mut seven_rules = BTreeMap::new();
    let st = store.clone();
    seven_rules.insert(
        store.numeral(0).unwrap(),
        Rule::new(store.numeral(2).unwrap(), move |args| {
            let m0 = rule_arg(&st, args, 0)?;
            let m1 = rule_arg(&st, args, 1)?;
            Ok(affine_family(&st, 9, move |p| m0 + m1 + 500 * p, cap))
        }),
    );

    let mut hundred_rules = BTreeMap::new();
    let st = store.clone();
    hundred_rules.insert(
        store.numeral(0).unwrap(),
        Rule::new(store.numeral(3).unwrap(), move |args| {
            let m0 = rule_arg(&st, args, 0)?;
            let m1 = rule_arg(&st, args, 1)?;
            let m2 = rule_arg(&st, args, 2)?;
            Ok(affine_family(&st, 17, move |p| m0 + m1 * m2 + p, cap))
        }),
    );
    let st = store.clone();
    hundred_rules.insert(
        store.numeral(1).unwrap(),
        Rule::new(store.empty(), move |_| {
            Ok(affine_family(&st, 1000, |p| p, cap))
        }),
    );
    let st = store.clone();
    hundred_rules.insert(
        store.numeral(2).unwrap(),
        Rule::new(store.numeral(2).unwrap(), move |args| {
            let m1 = rule_arg(&st, args, 1)?;
            Ok(affine_family(&st, 4, move |p| m1 + p, cap))
        }),
    );

    let mut table = BTreeMap::new();
    table.insert(
        store.numeral(7).unwrap(),
        with_class(Rubric::new(seven_rules)),
    );
    table.insert(
        store.numeral(100).unwrap(),
        with_class(Rubric::new(hundred_rules)),
    );
    BroadRubric {
        basic: with_class(two_rule_rubric(store, cap, class_cap)),
        trigger: TriggerMap::Table(table),
    }
}

/// A plain derivation `<i, g, p>` with numeral rule index and family index.
pub fn deriv(store: &Store, i: u64, children: &[(u64, HfSet)], p: u64) -> HfSet {
    let mut g = BTreeMap::new();
    for (k, d) in children {
        g.insert(store.numeral(*k).unwrap(), d.clone());
    }
    tuple(
        store,
        &[
            store.numeral(i).unwrap(),
            func(store, &g).unwrap(),
            store.numeral(p).unwrap(),
        ],
    )
    .unwrap()
}

/// A broad basic derivation `Basic(i, g, p)`.
pub fn basic_deriv(store: &Store, i: u64, children: &[(u64, HfSet)], p: u64) -> HfSet {
    let mut g = BTreeMap::new();
    for (k, d) in children {
        g.insert(store.numeral(*k).unwrap(), d.clone());
    }
    encode(
        store,
        Tag::Basic,
        &[
            store.numeral(i).unwrap(),
            func(store, &g).unwrap(),
            store.numeral(p).unwrap(),
        ],
    )
    .unwrap()
}

/// A broad triggered derivation `Trigger(m, i, g, p)`.
pub fn trigger_deriv(
    store: &Store,
    m: &HfSet,
    i: u64,
    children: &[(u64, HfSet)],
    p: u64,
) -> HfSet {
    let mut g = BTreeMap::new();
    for (k, d) in children {
        g.insert(store.numeral(*k).unwrap(), d.clone());
    }
    encode(
        store,
        Tag::Trigger,
        &[
            m.clone(),
            store.numeral(i).unwrap(),
            func(store, &g).unwrap(),
            store.numeral(p).unwrap(),
        ],
    )
    .unwrap()
}
