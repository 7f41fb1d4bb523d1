//! Spections: per-element child assignments that generate and cogenerate
//! classes of sets.
//!
//! A spection gives each suitable element `e` a finite set of children
//! `J(e)`. It generates the least class closed under "all children present
//! implies parent present" and cogenerates the greatest class all of whose
//! members have their whole descendant cone inside the suitable class. An
//! introspection (children strictly below the parent) generates and
//! cogenerates the same class, and that class supports a recursion
//! principle: each element has a unique attempt on its descendant set.
//!
//! Fam-spections extend this with a partial per-element evaluator and
//! generate partial value assignments; a rubric's derivation family is the
//! canonical instance.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

use crate::broadnum::{BroadSignature, ReducedBroadSignature};
use crate::encodings::{unbuild, unfunc, unpair, untuple};
use crate::genengine::{GenError, Rubric};
use crate::hfset::{HfError, HfSet};
use crate::terms::{term, Signature};

/// Generous default for the traversal fuel parameters below.
pub const DEFAULT_FUEL: u64 = 1_000_000;

#[derive(Debug, Error)]
pub enum SpectError {
    #[error("fuel exhausted while {what}")]
    FuelExhausted { what: &'static str },
    #[error("element is not generated: {detail}")]
    NotGenerated { detail: String },
    #[error("malformed input: {detail}")]
    Malformed { detail: String },
    #[error(transparent)]
    Hf(#[from] HfError),
    #[error(transparent)]
    Engine(#[from] GenError),
}

pub type SuitablePred = Arc<dyn Fn(&HfSet) -> bool + Send + Sync>;
pub type ChildrenFn = Arc<dyn Fn(&HfSet) -> Result<HfSet, SpectError> + Send + Sync>;

/// A suitability predicate plus a children map on suitable elements.
///
/// The `introspective` flag asserts that children always lie strictly below
/// their parent; `introspective_at` spot-checks it.
#[derive(Clone)]
pub struct Spection {
    suitable: SuitablePred,
    children: ChildrenFn,
    introspective: bool,
}

impl Spection {
    pub fn new(
        suitable: impl Fn(&HfSet) -> bool + Send + Sync + 'static,
        children: impl Fn(&HfSet) -> Result<HfSet, SpectError> + Send + Sync + 'static,
    ) -> Spection {
        Spection {
            suitable: Arc::new(suitable),
            children: Arc::new(children),
            introspective: false,
        }
    }

    /// Like `new`, asserting that children lie strictly below the parent.
    pub fn introspection(
        suitable: impl Fn(&HfSet) -> bool + Send + Sync + 'static,
        children: impl Fn(&HfSet) -> Result<HfSet, SpectError> + Send + Sync + 'static,
    ) -> Spection {
        Spection {
            introspective: true,
            ..Spection::new(suitable, children)
        }
    }

    pub fn is_suitable(&self, e: &HfSet) -> bool {
        (self.suitable)(e)
    }

    /// The children set `J(e)`; meaningful only for suitable `e`.
    pub fn children(&self, e: &HfSet) -> Result<HfSet, SpectError> {
        (self.children)(e)
    }

    pub fn introspective(&self) -> bool {
        self.introspective
    }

    /// Point check of the introspection claim: every child of `e` is a
    /// strict descendant of `e`. Vacuously true on unsuitable elements.
    pub fn introspective_at(&self, e: &HfSet) -> Result<bool, SpectError> {
        if !self.is_suitable(e) {
            return Ok(true);
        }
        let descendants = e.descendant_set()?;
        Ok(self
            .children(e)?
            .elements()
            .iter()
            .all(|d| d != e && descendants.contains(d)))
    }
}

fn spend(fuel: &mut u64, what: &'static str) -> Result<(), SpectError> {
    if *fuel == 0 {
        return Err(SpectError::FuelExhausted { what });
    }
    *fuel -= 1;
    Ok(())
}

/// The least set containing `e` that is closed under taking children of its
/// suitable members: the union of the iterated children layers, starting
/// from the layer `{e}` itself.
///
/// Converges whenever children keep descending (any introspection); the
/// fuel bounds child expansions so a non-descending spection errors instead
/// of looping.
pub fn m_descendant_set(s: &Spection, e: &HfSet, mut fuel: u64) -> Result<HfSet, SpectError> {
    let store = e.store().clone();
    let mut seen: BTreeSet<HfSet> = BTreeSet::new();
    seen.insert(e.clone());
    let mut frontier = vec![e.clone()];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for x in frontier.drain(..) {
            if !s.is_suitable(&x) {
                continue;
            }
            for d in s.children(&x)?.elements() {
                spend(&mut fuel, "expanding a descendant set")?;
                if seen.insert(d.clone()) {
                    next.push(d);
                }
            }
        }
        frontier = next;
    }
    let elems: Vec<HfSet> = seen.into_iter().collect();
    Ok(store.set(&elems)?)
}

/// Bottom-up pass over the descendant cone of `e`: each suitable node is
/// assigned a value once all its children hold one, in rounds to a fixpoint.
/// Nodes that are unsuitable, or sit above an unassignable node, stay absent.
fn bottom_up<T: Clone>(
    s: &Spection,
    e: &HfSet,
    fuel: u64,
    mut assign: impl FnMut(&HfSet, BTreeMap<HfSet, T>) -> Result<T, SpectError>,
) -> Result<BTreeMap<HfSet, T>, SpectError> {
    let reach = m_descendant_set(s, e, fuel)?;
    let mut kids: BTreeMap<HfSet, Vec<HfSet>> = BTreeMap::new();
    for d in reach.elements() {
        if s.is_suitable(&d) {
            let children = s.children(&d)?.elements();
            kids.insert(d, children);
        }
    }
    let mut done: BTreeMap<HfSet, T> = BTreeMap::new();
    loop {
        let mut progressed = false;
        for (d, children) in &kids {
            if done.contains_key(d) || !children.iter().all(|b| done.contains_key(b)) {
                continue;
            }
            let restriction: BTreeMap<HfSet, T> = children
                .iter()
                .map(|b| (b.clone(), done[b].clone()))
                .collect();
            let value = assign(d, restriction)?;
            done.insert(d.clone(), value);
            progressed = true;
        }
        if !progressed {
            return Ok(done);
        }
    }
}

/// The derivation for `e`, if it has one: the term `<e, [t_b]_{b in J(e)}>`
/// whose branches are the children's derivations, built bottom-up over the
/// descendant cone. `e` is generated exactly when this term exists.
pub fn derivation_term(
    s: &Spection,
    e: &HfSet,
    fuel: u64,
) -> Result<Option<HfSet>, SpectError> {
    let terms = bottom_up(s, e, fuel, |d, sub| Ok(term(d, &sub)?))?;
    Ok(terms.get(e).cloned())
}

/// Membership in the generated class, decided by constructing the
/// derivation term.
pub fn is_generated(s: &Spection, e: &HfSet, fuel: u64) -> Result<bool, SpectError> {
    Ok(derivation_term(s, e, fuel)?.is_some())
}

/// Membership in the cogenerated class: the whole descendant cone of `e` is
/// suitable.
pub fn is_cogenerated(s: &Spection, e: &HfSet, fuel: u64) -> Result<bool, SpectError> {
    let reach = m_descendant_set(s, e, fuel)?;
    Ok(reach.elements().iter().all(|x| s.is_suitable(x)))
}

/// Recursion over the generated class: the unique `F` with
/// `F(x) = step(x, F restricted to children(x))`, computed as the attempt
/// on the descendant cone of `e`. Errors if `e` is not generated.
pub fn recurse(
    s: &Spection,
    step: impl Fn(&HfSet, &BTreeMap<HfSet, HfSet>) -> Result<HfSet, SpectError>,
    e: &HfSet,
    fuel: u64,
) -> Result<HfSet, SpectError> {
    let attempt = bottom_up(s, e, fuel, |d, sub| step(d, &sub))?;
    attempt.get(e).cloned().ok_or_else(|| SpectError::NotGenerated {
        detail: format!("{e}"),
    })
}

pub type DomainPred =
    Arc<dyn Fn(&HfSet, &BTreeMap<HfSet, HfSet>) -> Result<bool, SpectError> + Send + Sync>;
pub type ValueFn =
    Arc<dyn Fn(&HfSet, &BTreeMap<HfSet, HfSet>) -> Result<HfSet, SpectError> + Send + Sync>;

/// A spection with a partial per-element evaluator: for suitable `e` and a
/// tuple `h` of values over `children(e)`, `in_domain` decides whether the
/// evaluator applies and `value` (consulted only then) produces the result.
#[derive(Clone)]
pub struct FamSpection {
    pub spection: Spection,
    pub in_domain: DomainPred,
    pub value: ValueFn,
}

/// The value the generated partial assignment gives `e`, or `None` when `e`
/// is outside its domain.
///
/// Bottom-up over the descendant cone, each suitable node whose children
/// are all decided becomes `Some(value)` when every child carries a value
/// and the tuple is in the evaluator's domain, and bottom otherwise; nodes
/// above an undecidable node stay bottom.
pub fn famspec_membership(
    fs: &FamSpection,
    e: &HfSet,
    fuel: u64,
) -> Result<Option<HfSet>, SpectError> {
    if !fs.spection.is_suitable(e) {
        return Ok(None);
    }
    let decided: BTreeMap<HfSet, Option<HfSet>> =
        bottom_up(&fs.spection, e, fuel, |d, sub| {
            let mut values = BTreeMap::new();
            for (child, decided) in sub {
                match decided {
                    Some(v) => {
                        values.insert(child, v);
                    }
                    None => return Ok(None),
                }
            }
            if !(fs.in_domain)(d, &values)? {
                return Ok(None);
            }
            Ok(Some((fs.value)(d, &values)?))
        })?;
    Ok(decided.get(e).cloned().flatten())
}

/// Apply rule `i` of `rubric` to the child values `h` routed through the
/// graph `g` of the triple `e = <i, g, p>`, returning the family value at
/// `p`. `None` when any part fails to line up: malformed triple, unknown
/// rule, domain mismatch, rule inapplicable to these values, or `p` outside
/// the produced family.
fn rubric_row_value(
    rubric: &Rubric,
    e: &HfSet,
    h: &BTreeMap<HfSet, HfSet>,
) -> Result<Option<HfSet>, SpectError> {
    let Some(parts) = untuple(e) else {
        return Ok(None);
    };
    let [i, g, p] = parts.as_slice() else {
        return Ok(None);
    };
    let Some(graph) = unfunc(g) else {
        return Ok(None);
    };
    let Some(rule) = rubric.rules.get(i) else {
        return Ok(None);
    };
    if graph.len() != rule.arity.len() || !graph.keys().all(|k| rule.arity.contains(k)) {
        return Ok(None);
    }
    let mut args = BTreeMap::new();
    for (k, target) in &graph {
        let Some(v) = h.get(target) else {
            return Err(SpectError::Malformed {
                detail: "child tuple must cover the range of the derivation graph".into(),
            });
        };
        args.insert(k.clone(), v.clone());
    }
    let family = match (rule.apply)(&args) {
        Ok(f) => f,
        Err(GenError::MalformedDerivation { .. } | GenError::DomainMismatch { .. }) => {
            return Ok(None)
        }
        Err(err) => return Err(err.into()),
    };
    match family.eval_at(p, rubric.class.as_ref()) {
        Ok(v) => Ok(Some(v)),
        Err(GenError::IndexRejected { .. }) => Ok(None),
        Err(err) => Err(err.into()),
    }
}

/// The fam-spection whose generated partial assignment is `rubric`'s
/// derivation family: suitable elements are triples `<i, g, p>` with `g` a
/// function graph, children are the range of `g`, and the evaluator applies
/// rule `i` to the child values and selects index `p`.
pub fn rubric_famspection(rubric: &Rubric) -> FamSpection {
    let suitable = |e: &HfSet| {
        untuple(e)
            .filter(|parts| parts.len() == 3)
            .is_some_and(|parts| unfunc(&parts[1]).is_some())
    };
    let children = |e: &HfSet| {
        let parts = untuple(e).ok_or_else(|| SpectError::Malformed {
            detail: "children require a triple".into(),
        })?;
        let graph = unfunc(&parts[1]).ok_or_else(|| SpectError::Malformed {
            detail: "children require a function graph".into(),
        })?;
        let range: Vec<HfSet> = graph.into_values().collect();
        Ok(e.store().set(&range)?)
    };
    let r_dom = rubric.clone();
    let r_val = rubric.clone();
    FamSpection {
        spection: Spection::introspection(suitable, children),
        in_domain: Arc::new(move |e, h| Ok(rubric_row_value(&r_dom, e, h)?.is_some())),
        value: Arc::new(move |e, h| {
            rubric_row_value(&r_val, e, h)?.ok_or_else(|| SpectError::Malformed {
                detail: "evaluator consulted outside its domain".into(),
            })
        }),
    }
}

/// Naturals as iterated singletons: the empty set has no children and a
/// singleton's one child is its member, so in both cases the children set
/// is the element itself.
pub fn nat_spection() -> Spection {
    Spection::introspection(|e| e.len() <= 1, |e| Ok(e.clone()))
}

/// Terms over `sig`: suitable elements are pairs `<i, w>` with `i` a known
/// symbol and `w` a function graph over its arity; children are the range
/// of `w`.
pub fn mu_spection(sig: &Signature) -> Spection {
    let sig_suit = sig.clone();
    let suitable = move |e: &HfSet| {
        let Some((i, w)) = unpair(e) else {
            return false;
        };
        let Some(arity) = sig_suit.arity(&i) else {
            return false;
        };
        graph_over(&w, arity)
    };
    let children = |e: &HfSet| {
        let (_, w) = unpair(e).ok_or_else(|| SpectError::Malformed {
            detail: "children require a term".into(),
        })?;
        graph_range(&w)
    };
    Spection::introspection(suitable, children)
}

/// Reduced broad numbers over `f`: the empty set (no children) and pairs
/// `<x, w>` with `w` a graph over the arity `f` assigns to `x` (children:
/// `x` and the range of `w`).
pub fn reduced_broad_spection(f: &ReducedBroadSignature) -> Spection {
    let f_suit = f.clone();
    let suitable = move |e: &HfSet| {
        if e.is_empty() {
            return true;
        }
        let Some((x, w)) = unpair(e) else {
            return false;
        };
        graph_over(&w, &f_suit.arity_of(x.store(), &x))
    };
    let children = |e: &HfSet| {
        if e.is_empty() {
            return Ok(e.store().empty());
        }
        let (x, w) = unpair(e).ok_or_else(|| SpectError::Malformed {
            detail: "children require a reduced build".into(),
        })?;
        graph_range_with(&w, x)
    };
    Spection::introspection(suitable, children)
}

/// Broad numbers over `g`: the empty set (no children) and builds
/// `<x, <i, w>>` with `i` a symbol of the signature `g` assigns to `x` and
/// `w` a graph over that symbol's arity (children: `x` and the range of
/// `w`).
pub fn broad_spection(g: &BroadSignature) -> Spection {
    let g_suit = g.clone();
    let suitable = move |e: &HfSet| {
        if e.is_empty() {
            return true;
        }
        let Some((x, i, w)) = unbuild(e) else {
            return false;
        };
        let sig = g_suit.signature_of(&x);
        let Some(arity) = sig.arity(&i) else {
            return false;
        };
        graph_over(&w, arity)
    };
    let children = |e: &HfSet| {
        if e.is_empty() {
            return Ok(e.store().empty());
        }
        let (x, _, w) = unbuild(e).ok_or_else(|| SpectError::Malformed {
            detail: "children require a build".into(),
        })?;
        graph_range_with(&w, x)
    };
    Spection::introspection(suitable, children)
}

/// Every set is suitable and its children are its elements; the generated
/// class is the whole well-founded kernel and the descendant cone is the
/// ordinary descendant set.
pub fn element_spection() -> Spection {
    Spection::introspection(|_| true, |e| Ok(e.clone()))
}

/// Ordinals: suitable sets are the transitive ones, children are the
/// elements, so the generated sets are the hereditarily transitive ones.
pub fn ord_spection() -> Spection {
    Spection::introspection(is_transitive, |e| Ok(e.clone()))
}

fn is_transitive(e: &HfSet) -> bool {
    e.elements()
        .iter()
        .all(|x| x.elements().iter().all(|y| e.contains(y)))
}

/// Whether `w` is a function graph whose domain is exactly `arity`.
fn graph_over(w: &HfSet, arity: &HfSet) -> bool {
    unfunc(w)
        .is_some_and(|map| map.len() == arity.len() && map.keys().all(|k| arity.contains(k)))
}

fn graph_range(w: &HfSet) -> Result<HfSet, SpectError> {
    let map = unfunc(w).ok_or_else(|| SpectError::Malformed {
        detail: "children require a function graph".into(),
    })?;
    let range: Vec<HfSet> = map.into_values().collect();
    Ok(w.store().set(&range)?)
}

fn graph_range_with(w: &HfSet, extra: HfSet) -> Result<HfSet, SpectError> {
    let map = unfunc(w).ok_or_else(|| SpectError::Malformed {
        detail: "children require a function graph".into(),
    })?;
    let mut out: Vec<HfSet> = map.into_values().collect();
    out.push(extra);
    Ok(w.store().set(&out)?)
}
