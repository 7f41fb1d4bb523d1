//! Broad and reduced-broad signatures, bounded generation of broad
//! numbers, the translations between the Start/Build, Begin/Make, and
//! Basic/Trigger presentations, and the broad-number rank.
//!
//! A broad signature assigns a signature to every set; a reduced one
//! assigns just an arity set. Both are total through a finite-support
//! table with an empty default, because only finitely many triggers can
//! ever fire at desk scale; extending the support is table inclusion.
//! Generation here runs its own full-rescan worklists, deliberately
//! separate from the rubric engines, so the two routes can be compared.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::budget::Budget;
use crate::encodings::{classify, encode, func, unfunc, DecodedThing, EncodeError, Group, Tag};
use crate::genengine::{eval_derivation_broad, BroadRubric, GenError, Generated};
use crate::hfset::{HfError, HfSet, Store};
use crate::ordinal::{ssup, OrdCNF};
use crate::terms::Signature;

/// Errors from broad-number generation and translation.
#[derive(Debug, Clone, Error)]
pub enum BroadError {
    #[error("budget exceeded: {what}")]
    BudgetExceeded { what: &'static str },
    #[error("not a broad number: {detail}")]
    NotBroadNumber { detail: String },
    #[error("unexpected constructor: {detail}")]
    UnexpectedConstructor { detail: String },
    #[error(transparent)]
    Hf(#[from] HfError),
    #[error(transparent)]
    Encode(#[from] EncodeError),
}

/// Which way a translation runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// Total assignment of a signature to every set, with finite support.
#[derive(Debug, Clone, Default)]
pub struct BroadSignature {
    table: BTreeMap<HfSet, Signature>,
}

impl BroadSignature {
    pub fn new() -> BroadSignature {
        BroadSignature::default()
    }

    pub fn from_table(table: BTreeMap<HfSet, Signature>) -> BroadSignature {
        BroadSignature { table }
    }

    pub fn insert(&mut self, x: HfSet, sig: Signature) {
        self.table.insert(x, sig);
    }

    /// The signature assigned to `x`; empty off the support.
    pub fn signature_of(&self, x: &HfSet) -> Signature {
        self.table.get(x).cloned().unwrap_or_default()
    }

    pub fn table(&self) -> &BTreeMap<HfSet, Signature> {
        &self.table
    }
}

/// Total assignment of an arity set to every set, with finite support.
#[derive(Debug, Clone, Default)]
pub struct ReducedBroadSignature {
    table: BTreeMap<HfSet, HfSet>,
}

impl ReducedBroadSignature {
    pub fn new() -> ReducedBroadSignature {
        ReducedBroadSignature::default()
    }

    pub fn from_table(table: BTreeMap<HfSet, HfSet>) -> ReducedBroadSignature {
        ReducedBroadSignature { table }
    }

    pub fn insert(&mut self, x: HfSet, arity: HfSet) {
        self.table.insert(x, arity);
    }

    /// The arity assigned to `x`; empty off the support.
    pub fn arity_of(&self, store: &Store, x: &HfSet) -> HfSet {
        self.table.get(x).cloned().unwrap_or_else(|| store.empty())
    }

    pub fn table(&self) -> &BTreeMap<HfSet, HfSet> {
        &self.table
    }
}

/// Every function graph from `positions` into `pool`, visited once each.
fn for_each_graph(
    positions: &[HfSet],
    pool: &[HfSet],
    visit: &mut impl FnMut(&BTreeMap<HfSet, HfSet>) -> Result<(), BroadError>,
) -> Result<(), BroadError> {
    fn rec(
        positions: &[HfSet],
        pool: &[HfSet],
        acc: &mut BTreeMap<HfSet, HfSet>,
        visit: &mut impl FnMut(&BTreeMap<HfSet, HfSet>) -> Result<(), BroadError>,
    ) -> Result<(), BroadError> {
        let Some((k, rest)) = positions.split_first() else {
            return visit(acc);
        };
        for v in pool {
            acc.insert(k.clone(), v.clone());
            rec(rest, pool, acc, visit)?;
        }
        acc.remove(k);
        Ok(())
    }
    rec(positions, pool, &mut BTreeMap::new(), visit)
}

/// One full-rescan closure round shared by the three fragment builders.
fn closure_run(
    budget: &Budget,
    mut step: impl FnMut(&BTreeSet<HfSet>, &mut u64) -> Result<BTreeSet<HfSet>, BroadError>,
) -> Result<Generated, BroadError> {
    let mut all: BTreeSet<HfSet> = BTreeSet::new();
    let mut fuel = budget.fuel;
    let mut rounds = 0;
    for _ in 0..budget.depth {
        let next = step(&all, &mut fuel)?;
        rounds += 1;
        if next.len() > budget.max_elements {
            return Err(BroadError::BudgetExceeded {
                what: "element cap during broad-number generation",
            });
        }
        if next == all {
            return Ok(Generated {
                set: all,
                stabilized: true,
                rounds,
            });
        }
        all = next;
    }
    Ok(Generated {
        set: all,
        stabilized: false,
        rounds,
    })
}

fn spend(fuel: &mut u64) -> Result<(), BroadError> {
    if *fuel == 0 {
        return Err(BroadError::BudgetExceeded {
            what: "fuel during broad-number generation",
        });
    }
    *fuel -= 1;
    Ok(())
}

/// Depth-bounded fragment of the broad numbers of `g`: the closure of
/// Start under Build along the signatures `g` assigns. `budget.depth`
/// counts closure rounds; element or fuel exhaustion is an error.
pub fn generate_broad(
    store: &Store,
    g: &BroadSignature,
    budget: &Budget,
) -> Result<Generated, BroadError> {
    closure_run(budget, |all, fuel| {
        let mut next = all.clone();
        next.insert(encode(store, Tag::Start, &[])?);
        let pool: Vec<HfSet> = all.iter().cloned().collect();
        for x in all {
            let sig = g.signature_of(x);
            for (i, arity) in sig.arities() {
                let positions = arity.elements();
                for_each_graph(&positions, &pool, &mut |graph| {
                    spend(fuel)?;
                    let g_set = func(store, graph)?;
                    next.insert(encode(store, Tag::Build, &[x.clone(), i.clone(), g_set])?);
                    Ok(())
                })?;
            }
        }
        Ok(next)
    })
}

/// Depth-bounded fragment of the reduced broad numbers of `f`: the
/// closure of Begin under Make along the arities `f` assigns.
pub fn generate_reduced(
    store: &Store,
    f: &ReducedBroadSignature,
    budget: &Budget,
) -> Result<Generated, BroadError> {
    closure_run(budget, |all, fuel| {
        let mut next = all.clone();
        next.insert(encode(store, Tag::Begin, &[])?);
        let pool: Vec<HfSet> = all.iter().cloned().collect();
        for x in all {
            let positions = f.arity_of(store, x).elements();
            for_each_graph(&positions, &pool, &mut |graph| {
                spend(fuel)?;
                let g_set = func(store, graph)?;
                next.insert(encode(store, Tag::Make, &[x.clone(), g_set])?);
                Ok(())
            })?;
        }
        Ok(next)
    })
}

/// The fragment of broad numbers of build depth at most `depth`:
/// depth 0 is exactly {Start}.
pub fn broad_fragment(
    store: &Store,
    g: &BroadSignature,
    depth: usize,
) -> Result<BTreeSet<HfSet>, BroadError> {
    Ok(generate_broad(store, g, &Budget::depth(depth + 1))?.set)
}

/// The fragment of reduced broad numbers of build depth at most `depth`:
/// depth 0 is exactly {Begin}.
pub fn reduced_fragment(
    store: &Store,
    f: &ReducedBroadSignature,
    depth: usize,
) -> Result<BTreeSet<HfSet>, BroadError> {
    Ok(generate_reduced(store, f, &Budget::depth(depth + 1))?.set)
}

/// The depth-bounded fragment of the class of second-level builds: the
/// closure of the translated start under the Bu2 constructor, where each
/// step reads its signature off `g` at the translated base. Depth 0 is
/// exactly {translated Start}.
pub fn generate_bu2_fragment(
    store: &Store,
    g: &BroadSignature,
    depth: usize,
) -> Result<BTreeSet<HfSet>, BroadError> {
    let budget = Budget::depth(depth + 1);
    let generated = closure_run(&budget, |all, fuel| {
        let mut next = all.clone();
        next.insert(encode(store, Tag::StartP, &[])?);
        let pool: Vec<HfSet> = all.iter().cloned().collect();
        for u in all {
            let w = theta_reduce(Direction::Forward, u, g)?;
            let sig = g.signature_of(&w);
            if sig.is_empty() {
                continue;
            }
            let sig_set = sig.encode(store)?;
            for (i, arity) in sig.arities() {
                let positions = arity.elements();
                for_each_graph(&positions, &pool, &mut |graph| {
                    spend(fuel)?;
                    let f_set = func(store, graph)?;
                    next.insert(encode(
                        store,
                        Tag::Bu2,
                        &[u.clone(), sig_set.clone(), i.clone(), f_set],
                    )?);
                    Ok(())
                })?;
            }
        }
        Ok(next)
    })?;
    Ok(generated.set)
}

/// Translate between the second-level-build presentation and the broad
/// numbers: forward sends the translated start to Start and each Bu2 to
/// the Build on its translated parts; backward inverts, reading the
/// signature component off `g`.
pub fn theta_reduce(direction: Direction, x: &HfSet, g: &BroadSignature) -> Result<HfSet, BroadError> {
    let store = x.store();
    match direction {
        Direction::Forward => match classify(store, Group::Reduced, x) {
            DecodedThing::Tagged { tag: Tag::StartP, .. } => Ok(encode(store, Tag::Start, &[])?),
            DecodedThing::Tagged { tag: Tag::Bu2, args } => {
                let [w, _sig, i, f] = args.as_slice() else { unreachable!() };
                let base = theta_reduce(direction, w, g)?;
                let entries = unfunc(f).expect("constructor payload is a function graph");
                let mut image = BTreeMap::new();
                for (k, v) in entries {
                    image.insert(k, theta_reduce(direction, &v, g)?);
                }
                let f_set = func(store, &image)?;
                Ok(encode(store, Tag::Build, &[base, i.clone(), f_set])?)
            }
            _ => Err(BroadError::UnexpectedConstructor {
                detail: format!("{x} is not a second-level build"),
            }),
        },
        Direction::Backward => match classify(store, Group::Build, x) {
            DecodedThing::Tagged { tag: Tag::Start, .. } => Ok(encode(store, Tag::StartP, &[])?),
            DecodedThing::Tagged { tag: Tag::Build, args } => {
                let [base, i, f] = args.as_slice() else { unreachable!() };
                let u = theta_reduce(direction, base, g)?;
                let sig = g.signature_of(base);
                let sig_set = sig.encode(store)?;
                let entries = unfunc(f).expect("constructor payload is a function graph");
                let mut image = BTreeMap::new();
                for (k, v) in entries {
                    image.insert(k, theta_reduce(direction, &v, g)?);
                }
                let f_set = func(store, &image)?;
                Ok(encode(store, Tag::Bu2, &[u, sig_set, i.clone(), f_set])?)
            }
            _ => Err(BroadError::UnexpectedConstructor {
                detail: format!("{x} is not a broad number"),
            }),
        },
    }
}

/// Translate derivations between the plain Basic/Trigger constructors
/// and their primed doubles, recursing through children; rule indices
/// and family indices pass through untouched.
pub fn theta_derivs(direction: Direction, d: &HfSet) -> Result<HfSet, BroadError> {
    let store = d.store();
    let recurse_graph = |g: &HfSet| -> Result<HfSet, BroadError> {
        let entries = unfunc(g).ok_or_else(|| BroadError::UnexpectedConstructor {
            detail: "derivation children are not a function graph".into(),
        })?;
        let mut image = BTreeMap::new();
        for (k, v) in entries {
            image.insert(k, theta_derivs(direction, &v)?);
        }
        Ok(func(store, &image)?)
    };
    match direction {
        Direction::Forward => match classify(store, Group::Pseudo, d) {
            DecodedThing::Tagged { tag: Tag::BasicP, args } => {
                let [i, g, p] = args.as_slice() else { unreachable!() };
                let g2 = recurse_graph(g)?;
                Ok(encode(store, Tag::Basic, &[i.clone(), g2, p.clone()])?)
            }
            DecodedThing::Tagged { tag: Tag::TriggerP, args } => {
                let [m, i, g, p] = args.as_slice() else { unreachable!() };
                let m2 = theta_derivs(direction, m)?;
                let g2 = recurse_graph(g)?;
                Ok(encode(store, Tag::Trigger, &[m2, i.clone(), g2, p.clone()])?)
            }
            _ => Err(BroadError::UnexpectedConstructor {
                detail: format!("{d} is not a primed derivation"),
            }),
        },
        Direction::Backward => match classify(store, Group::Derivation, d) {
            DecodedThing::Tagged { tag: Tag::Basic, args } => {
                let [i, g, p] = args.as_slice() else { unreachable!() };
                let g2 = recurse_graph(g)?;
                Ok(encode(store, Tag::BasicP, &[i.clone(), g2, p.clone()])?)
            }
            DecodedThing::Tagged { tag: Tag::Trigger, args } => {
                let [m, i, g, p] = args.as_slice() else { unreachable!() };
                let m2 = theta_derivs(direction, m)?;
                let g2 = recurse_graph(g)?;
                Ok(encode(store, Tag::TriggerP, &[m2, i.clone(), g2, p.clone()])?)
            }
            _ => Err(BroadError::UnexpectedConstructor {
                detail: format!("{d} is not a derivation"),
            }),
        },
    }
}

/// Evaluate a derivation written with the primed constructors directly,
/// without translating first; used to check that translation preserves
/// values.
pub fn eval_derivation_pseudo(b: &BroadRubric, d: &HfSet) -> Result<HfSet, GenError> {
    let store = d.store();
    match classify(store, Group::Pseudo, d) {
        DecodedThing::Tagged { tag: Tag::BasicP, args } => {
            let [i, g, p] = args.as_slice() else { unreachable!() };
            eval_pseudo_rule(&b.basic, b, i, g, p)
        }
        DecodedThing::Tagged { tag: Tag::TriggerP, args } => {
            let [m, i, g, p] = args.as_slice() else { unreachable!() };
            let value = eval_derivation_pseudo(b, m)?;
            let rubric = b.trigger.rubric_for(&value);
            if !rubric.rules.contains_key(i) {
                return Err(GenError::TriggerMissingRule {
                    value: value.to_string(),
                    index: i.to_string(),
                });
            }
            eval_pseudo_rule(&rubric, b, i, g, p)
        }
        _ => Err(GenError::MalformedDerivation {
            detail: "expected a primed Basic or Trigger constructor".into(),
        }),
    }
}

fn eval_pseudo_rule(
    rubric: &crate::genengine::Rubric,
    b: &BroadRubric,
    i: &HfSet,
    g: &HfSet,
    p: &HfSet,
) -> Result<HfSet, GenError> {
    let children = unfunc(g).ok_or_else(|| GenError::MalformedDerivation {
        detail: "child tuple is not a function graph".into(),
    })?;
    let rule = rubric.rules.get(i).ok_or_else(|| GenError::UnknownRuleIndex {
        index: i.to_string(),
    })?;
    crate::genengine::check_domain(&rule.arity, &children)?;
    let mut values = BTreeMap::new();
    for (k, sub) in &children {
        values.insert(k.clone(), eval_derivation_pseudo(b, sub)?);
    }
    let family = (rule.apply)(&values)?;
    family.eval_at(p, rubric.class.as_ref())
}

/// Check translation against direct evaluation on one derivation: the
/// broad evaluation of the translated derivation must equal the direct
/// primed evaluation.
pub fn translation_preserves_value(b: &BroadRubric, primed: &HfSet) -> Result<bool, GenError> {
    let plain = theta_derivs(Direction::Forward, primed).map_err(|e| {
        GenError::MalformedDerivation {
            detail: e.to_string(),
        }
    })?;
    Ok(eval_derivation_broad(b, &plain)? == eval_derivation_pseudo(b, primed)?)
}

/// The rank of a broad number: Start has rank 0, and a Build has the
/// strict supremum of the ranks of its base and children.
pub fn broad_rank(w: &HfSet) -> Result<OrdCNF, BroadError> {
    let store = w.store();
    match classify(store, Group::Build, w) {
        DecodedThing::Tagged { tag: Tag::Start, .. } => Ok(OrdCNF::zero()),
        DecodedThing::Tagged { tag: Tag::Build, args } => {
            let [base, _i, f] = args.as_slice() else { unreachable!() };
            let mut ranks = vec![broad_rank(base)?];
            let entries = unfunc(f).ok_or_else(|| BroadError::NotBroadNumber {
                detail: "children are not a function graph".into(),
            })?;
            for child in entries.values() {
                ranks.push(broad_rank(child)?);
            }
            Ok(ssup(&ranks))
        }
        _ => Err(BroadError::NotBroadNumber {
            detail: w.to_string(),
        }),
    }
}
