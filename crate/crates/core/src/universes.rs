//! Bounded enumeration of the least Tarski-style universe extending a
//! finite family of finite sets.
//!
//! Codes arrive through broad generation: a basic rubric contributes the
//! base embeddings plus the empty and two-element codes, and every
//! generated decode `D` triggers a rubric contributing equality codes for
//! pairs in `D`, dependent sums over `D`, and W-type codes over `D`. The
//! resulting derivation keys translate one-to-one into constructor codes.
//!
//! W-type decodes are infinite whenever their signature admits growth, so
//! they are carried as signature handles with bounded enumeration and never
//! materialized. A rubric row that would consume a handle where a set is
//! required (triggering on it, or feeding it to a sum or W-type rule)
//! cannot fire; such rows are skipped during generation and counted in
//! `TarskiUniverse::suppressed`, so a nonzero count marks the table as the
//! restriction of the full universe to materializable decodes.
//!
//! Grothendieck-style universes (transitive sets closed under powerset and
//! containing the naturals) have no finite instances, so there is nothing
//! for this kernel to enumerate; the code/decode view is the whole module.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::budget::Budget;
use crate::encodings::{
    classify, encode, pair, to_nat, unfunc, unpair, DecodedThing, EncodeError, Group, Tag,
};
use crate::genengine::{
    atom_string, generate_family_broad, BroadRubric, GenError, ResultFamily, Rubric, Rule,
    TriggerMap,
};
use crate::hfset::{HfError, HfSet, Store};
use crate::terms::{generate_terms, Signature, TermLevels};

#[derive(Debug, Error)]
pub enum UniverseError {
    #[error("two derivations translate to one code")]
    CodeCollision,
    #[error("malformed universe key: {detail}")]
    MalformedKey { detail: String },
    #[error(transparent)]
    Engine(#[from] GenError),
    #[error(transparent)]
    Hf(#[from] HfError),
    #[error(transparent)]
    Encode(#[from] EncodeError),
}

/// What a code denotes: a finite set, or the terms of a signature (kept
/// symbolic; enumerate a fragment with `wtype_fragment`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decode {
    Explicit(HfSet),
    WType(Signature),
}

/// The generated code table.
#[derive(Debug, Clone)]
pub struct TarskiUniverse {
    pub codes: BTreeMap<HfSet, Decode>,
    /// Rule applications skipped because a W-type handle stood where a set
    /// was required: one per handle consulted as a trigger source, one per
    /// sum or W-type row with a handle child.
    pub suppressed: u64,
    /// True when the final round added no new codes.
    pub stabilized: bool,
}

/// Bounded enumeration of a W-type decode: the terms of its signature.
pub fn wtype_fragment(sig: &Signature, budget: &Budget) -> Result<TermLevels, HfError> {
    generate_terms(sig, budget)
}

// Engine values are decodes in a two-variant sum: a realized set, or a
// W-type handle carrying the signature's function graph.
fn value_of_set(store: &Store, d: &HfSet) -> Result<HfSet, GenError> {
    Ok(encode(store, Tag::Inl, &[d.clone()])?)
}

fn value_of_handle(store: &Store, sig_graph: &HfSet) -> Result<HfSet, GenError> {
    Ok(encode(store, Tag::Inr, &[sig_graph.clone()])?)
}

enum ValueKind {
    Set(HfSet),
    Handle(HfSet),
}

fn split_value(store: &Store, v: &HfSet) -> Result<ValueKind, GenError> {
    match classify(store, Group::Sum, v) {
        DecodedThing::Tagged { tag: Tag::Inl, args } => Ok(ValueKind::Set(args[0].clone())),
        DecodedThing::Tagged { tag: Tag::Inr, args } => Ok(ValueKind::Handle(args[0].clone())),
        _ => Err(GenError::MalformedDerivation {
            detail: "engine value is not a tagged decode".into(),
        }),
    }
}

fn truth_value(store: &Store, holds: bool) -> Result<HfSet, HfError> {
    if holds {
        store.singleton(&store.empty())
    } else {
        Ok(store.empty())
    }
}

/// One rule per base entry (producing its embedding) plus the empty and
/// two-element decodes, indexed over the sum of the base keys and two.
fn basic_rubric(store: &Store, base: &BTreeMap<HfSet, HfSet>) -> Result<Rubric, UniverseError> {
    let mut rules = BTreeMap::new();
    for (a, b_a) in base {
        let index = encode(store, Tag::Inl, &[a.clone()])?;
        let st = store.clone();
        let payload = b_a.clone();
        rules.insert(
            index,
            Rule::new(store.empty(), move |_| {
                ResultFamily::singleton(&st, value_of_set(&st, &payload)?)
            }),
        );
    }
    let st0 = store.clone();
    rules.insert(
        encode(store, Tag::Inr, &[store.numeral(0)?])?,
        Rule::new(store.empty(), move |_| {
            ResultFamily::singleton(&st0, value_of_set(&st0, &st0.empty())?)
        }),
    );
    let st1 = store.clone();
    rules.insert(
        encode(store, Tag::Inr, &[store.numeral(1)?])?,
        Rule::new(store.empty(), move |_| {
            let two = st1.set(&[st1.numeral(0)?, st1.numeral(1)?])?;
            ResultFamily::singleton(&st1, value_of_set(&st1, &two)?)
        }),
    );
    Ok(Rubric::new(rules))
}

/// The rubric a realized decode `D` triggers, indexed over `D * D + 2`:
/// equality decodes for each pair in `D`, then sums and W-types over `D`.
/// The sum and W-type rules skip assignments with a handle child.
fn trigger_rubric(store: &Store, d: &HfSet) -> Result<Rubric, UniverseError> {
    let mut rules = BTreeMap::new();
    let elems = d.elements();
    for x in &elems {
        for y in &elems {
            let index = encode(store, Tag::Inl, &[pair(x, y)?])?;
            let st = store.clone();
            let holds = x == y;
            rules.insert(
                index,
                Rule::new(store.empty(), move |_| {
                    ResultFamily::singleton(&st, value_of_set(&st, &truth_value(&st, holds)?)?)
                }),
            );
        }
    }
    let st_sum = store.clone();
    rules.insert(
        encode(store, Tag::Inr, &[store.numeral(0)?])?,
        Rule::new(d.clone(), move |args| {
            let mut sum = Vec::new();
            for (k, v) in args {
                match split_value(&st_sum, v)? {
                    ValueKind::Set(e_k) => {
                        for x in e_k.elements() {
                            sum.push(pair(k, &x)?);
                        }
                    }
                    ValueKind::Handle(_) => return Ok(ResultFamily::empty()),
                }
            }
            let total = st_sum.set(&sum)?;
            ResultFamily::singleton(&st_sum, value_of_set(&st_sum, &total)?)
        }),
    );
    let st_w = store.clone();
    rules.insert(
        encode(store, Tag::Inr, &[store.numeral(1)?])?,
        Rule::new(d.clone(), move |args| {
            let mut arities = BTreeMap::new();
            for (k, v) in args {
                match split_value(&st_w, v)? {
                    ValueKind::Set(e_k) => {
                        arities.insert(k.clone(), e_k);
                    }
                    ValueKind::Handle(_) => return Ok(ResultFamily::empty()),
                }
            }
            let graph = Signature::new(arities).encode(&st_w)?;
            ResultFamily::singleton(&st_w, value_of_handle(&st_w, &graph)?)
        }),
    );
    Ok(Rubric::new(rules))
}

fn universe_rubric(store: &Store, base: &BTreeMap<HfSet, HfSet>) -> Result<BroadRubric, UniverseError> {
    let st = store.clone();
    Ok(BroadRubric {
        basic: basic_rubric(store, base)?,
        trigger: TriggerMap::Dynamic(Arc::new(move |value| {
            match split_value(&st, value) {
                Ok(ValueKind::Set(d)) => trigger_rubric(&st, &d).ok(),
                _ => None,
            }
        })),
    })
}

/// Translate a derivation key to its constructor code: basic rules map to
/// embeddings or the zero/two codes, triggered rules map to equality, sum,
/// and W-type codes over the translated source and children.
fn translate_key(
    store: &Store,
    key: &HfSet,
    memo: &mut BTreeMap<HfSet, HfSet>,
) -> Result<HfSet, UniverseError> {
    if let Some(code) = memo.get(key) {
        return Ok(code.clone());
    }
    let malformed = |detail: &str| UniverseError::MalformedKey {
        detail: detail.into(),
    };
    let code = match classify(store, Group::Derivation, key) {
        DecodedThing::Tagged { tag: Tag::Basic, args } => {
            match classify(store, Group::Sum, &args[0]) {
                DecodedThing::Tagged { tag: Tag::Inl, args: sum } => {
                    encode(store, Tag::TarskiEmbed, &[sum[0].clone()])?
                }
                DecodedThing::Tagged { tag: Tag::Inr, args: sum } => match to_nat(&sum[0]) {
                    Some(0) => encode(store, Tag::TarskiZero, &[])?,
                    Some(1) => encode(store, Tag::TarskiTwo, &[])?,
                    _ => return Err(malformed("basic rule index out of range")),
                },
                _ => return Err(malformed("basic rule index is not a sum")),
            }
        }
        DecodedThing::Tagged { tag: Tag::Trigger, args } => {
            let source = translate_key(store, &args[0], memo)?;
            match classify(store, Group::Sum, &args[1]) {
                DecodedThing::Tagged { tag: Tag::Inl, args: sum } => {
                    let (x, y) = unpair(&sum[0])
                        .ok_or_else(|| malformed("equality rule index is not a pair"))?;
                    encode(store, Tag::TarskiEq, &[source, x, y])?
                }
                DecodedThing::Tagged { tag: Tag::Inr, args: sum } => {
                    let graph = unfunc(&args[2])
                        .ok_or_else(|| malformed("rule children are not a graph"))?;
                    let mut translated = BTreeMap::new();
                    for (k, child) in graph {
                        translated.insert(k, translate_key(store, &child, memo)?);
                    }
                    let g = crate::encodings::func(store, &translated)?;
                    match to_nat(&sum[0]) {
                        Some(0) => encode(store, Tag::TarskiSigma, &[source, g])?,
                        Some(1) => encode(store, Tag::TarskiWtype, &[source, g])?,
                        _ => return Err(malformed("triggered rule index out of range")),
                    }
                }
                _ => return Err(malformed("triggered rule index is not a sum")),
            }
        }
        _ => return Err(malformed("key is not a derivation")),
    };
    memo.insert(key.clone(), code.clone());
    Ok(code)
}

/// Derivation height of a key: one more than the deepest of its trigger
/// source and rule children. Matches the round the key first appears in.
fn key_depth(
    store: &Store,
    key: &HfSet,
    memo: &mut BTreeMap<HfSet, usize>,
) -> Result<usize, UniverseError> {
    if let Some(d) = memo.get(key) {
        return Ok(*d);
    }
    let (base, graph) = match classify(store, Group::Derivation, key) {
        DecodedThing::Tagged { tag: Tag::Basic, args } => (0, args[1].clone()),
        DecodedThing::Tagged { tag: Tag::Trigger, args } => {
            (key_depth(store, &args[0], memo)?, args[2].clone())
        }
        _ => {
            return Err(UniverseError::MalformedKey {
                detail: "key is not a derivation".into(),
            })
        }
    };
    let children = unfunc(&graph).ok_or_else(|| UniverseError::MalformedKey {
        detail: "rule children are not a graph".into(),
    })?;
    let mut deepest = base;
    for child in children.values() {
        deepest = deepest.max(key_depth(store, child, memo)?);
    }
    let depth = deepest + 1;
    memo.insert(key.clone(), depth);
    Ok(depth)
}

/// Count the rule applications the bounded run skipped over W-type
/// handles: each handle-valued key below the horizon would have triggered
/// a rubric (one skip), and each sum or W-type row with at least one handle
/// child within the horizon is one skip per rule, counted in closed form.
fn count_suppressed(
    store: &Store,
    entries: &BTreeMap<HfSet, HfSet>,
    max_depth: usize,
) -> Result<u64, UniverseError> {
    let mut depth_memo = BTreeMap::new();
    for key in entries.keys() {
        key_depth(store, key, &mut depth_memo)?;
    }
    // Children of an in-budget row may be any key below the horizon.
    let pool: Vec<&HfSet> = entries
        .keys()
        .filter(|k| depth_memo[*k] < max_depth)
        .collect();
    let handles = pool
        .iter()
        .filter(|k| matches!(split_value(store, &entries[**k]), Ok(ValueKind::Handle(_))))
        .count() as u128;
    let n = pool.len() as u128;
    let mut suppressed: u128 = 0;
    for (key, value) in entries {
        if depth_memo[key] >= max_depth {
            continue;
        }
        match split_value(store, value)? {
            ValueKind::Handle(_) => suppressed += 1,
            ValueKind::Set(d) => {
                let k = d.len() as u32;
                // Assignments with at least one handle child, for each of
                // the two decode-consuming rules.
                let total = n.saturating_pow(k);
                let clean = (n - handles).saturating_pow(k);
                suppressed += 2 * (total - clean);
            }
        }
    }
    Ok(u64::try_from(suppressed).unwrap_or(u64::MAX))
}

/// The codes of constructor depth at most `budget.depth` in the least
/// Tarski-style universe extending `base`, with their decodes.
pub fn tarski_universe(
    store: &Store,
    base: &BTreeMap<HfSet, HfSet>,
    budget: &Budget,
) -> Result<TarskiUniverse, UniverseError> {
    let rubric = universe_rubric(store, base)?;
    let family = generate_family_broad(store, &rubric, budget)?;
    let mut memo = BTreeMap::new();
    let mut codes = BTreeMap::new();
    for (key, value) in &family.entries {
        let code = translate_key(store, key, &mut memo)?;
        let decode = match split_value(store, value)? {
            ValueKind::Set(d) => Decode::Explicit(d),
            ValueKind::Handle(graph) => Decode::WType(Signature::decode(&graph).ok_or_else(
                || UniverseError::MalformedKey {
                    detail: "handle payload is not a signature graph".into(),
                },
            )?),
        };
        // The translation must stay injective on the key set.
        if codes.insert(code, decode).is_some() {
            return Err(UniverseError::CodeCollision);
        }
    }
    let suppressed = count_suppressed(store, &family.entries, budget.depth)?;
    Ok(TarskiUniverse {
        codes,
        suppressed,
        stabilized: family.stabilized,
    })
}

impl TarskiUniverse {
    /// Recompute every equality and sum decode from the decodes of its
    /// constituents and compare with the stored decode.
    pub fn redecodes_consistently(&self, store: &Store) -> Result<bool, UniverseError> {
        for (code, decode) in &self.codes {
            match classify(store, Group::Tarski, code) {
                DecodedThing::Tagged { tag: Tag::TarskiEq, args } => {
                    let Some(Decode::Explicit(dm)) = self.codes.get(&args[0]) else {
                        return Ok(false);
                    };
                    if !dm.contains(&args[1]) || !dm.contains(&args[2]) {
                        return Ok(false);
                    }
                    let expected = truth_value(store, args[1] == args[2])?;
                    if *decode != Decode::Explicit(expected) {
                        return Ok(false);
                    }
                }
                DecodedThing::Tagged { tag: Tag::TarskiSigma, args } => {
                    let Some(Decode::Explicit(dm)) = self.codes.get(&args[0]) else {
                        return Ok(false);
                    };
                    let Some(graph) = unfunc(&args[1]) else {
                        return Ok(false);
                    };
                    let mut sum = Vec::new();
                    for k in dm.elements() {
                        let Some(child) = graph.get(&k) else {
                            return Ok(false);
                        };
                        let Some(Decode::Explicit(dk)) = self.codes.get(child) else {
                            return Ok(false);
                        };
                        for x in dk.elements() {
                            sum.push(pair(&k, &x)?);
                        }
                    }
                    if *decode != Decode::Explicit(store.set(&sum)?) {
                        return Ok(false);
                    }
                }
                _ => {}
            }
        }
        Ok(true)
    }

    /// Whether every code of `self` appears in `larger` with the same
    /// decode.
    pub fn extended_by(&self, larger: &TarskiUniverse) -> bool {
        self.codes
            .iter()
            .all(|(code, decode)| larger.codes.get(code) == Some(decode))
    }
}

/// Constructor rendering of a code, e.g. `eq(two, 0, 1)` or
/// `sigma(two, [0 -> zero, 1 -> two])`.
pub fn code_text(store: &Store, code: &HfSet) -> String {
    match classify(store, Group::Tarski, code) {
        DecodedThing::Tagged { tag: Tag::TarskiEmbed, args } => {
            format!("embed({})", atom_string(&args[0]))
        }
        DecodedThing::Tagged { tag: Tag::TarskiZero, .. } => "zero".into(),
        DecodedThing::Tagged { tag: Tag::TarskiTwo, .. } => "two".into(),
        DecodedThing::Tagged { tag: Tag::TarskiEq, args } => format!(
            "eq({}, {}, {})",
            code_text(store, &args[0]),
            atom_string(&args[1]),
            atom_string(&args[2]),
        ),
        DecodedThing::Tagged { tag: Tag::TarskiSigma, args } => {
            format!("sigma({}, {})", code_text(store, &args[0]), graph_text(store, &args[1]))
        }
        DecodedThing::Tagged { tag: Tag::TarskiWtype, args } => {
            format!("wtype({}, {})", code_text(store, &args[0]), graph_text(store, &args[1]))
        }
        _ => code.render(256),
    }
}

fn graph_text(store: &Store, g: &HfSet) -> String {
    let Some(map) = unfunc(g) else {
        return g.render(256);
    };
    let inner: Vec<String> = map
        .iter()
        .map(|(k, v)| format!("{} -> {}", atom_string(k), code_text(store, v)))
        .collect();
    format!("[{}]", inner.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn store() -> Store {
        Store::new()
    }

    fn empty_universe(st: &Store, depth: usize) -> TarskiUniverse {
        tarski_universe(st, &BTreeMap::new(), &Budget::new(depth, 500_000, 50_000_000)).unwrap()
    }

    fn code(st: &Store, tag: Tag, args: &[HfSet]) -> HfSet {
        encode(st, tag, args).unwrap()
    }

    fn two_decode(st: &Store) -> HfSet {
        st.set(&[st.numeral(0).unwrap(), st.numeral(1).unwrap()])
            .unwrap()
    }

    #[test]
    fn depth_one_over_the_empty_base() {
        let st = store();
        let u = empty_universe(&st, 1);
        assert_eq!(u.codes.len(), 2);
        assert_eq!(
            u.codes.get(&code(&st, Tag::TarskiZero, &[])),
            Some(&Decode::Explicit(st.empty())),
        );
        assert_eq!(
            u.codes.get(&code(&st, Tag::TarskiTwo, &[])),
            Some(&Decode::Explicit(two_decode(&st))),
        );
        assert_eq!(u.suppressed, 0);
    }

    #[test]
    fn depth_two_over_the_empty_base() {
        let st = store();
        let u = empty_universe(&st, 2);
        assert_eq!(u.codes.len(), 16);
        let zero = code(&st, Tag::TarskiZero, &[]);
        let two = code(&st, Tag::TarskiTwo, &[]);
        let n0 = st.numeral(0).unwrap();
        let n1 = st.numeral(1).unwrap();
        // Equality decodes are truth values.
        let truthy = st.singleton(&st.empty()).unwrap();
        assert_eq!(
            u.codes
                .get(&code(&st, Tag::TarskiEq, &[two.clone(), n0.clone(), n0.clone()])),
            Some(&Decode::Explicit(truthy)),
        );
        assert_eq!(
            u.codes
                .get(&code(&st, Tag::TarskiEq, &[two.clone(), n0.clone(), n1.clone()])),
            Some(&Decode::Explicit(st.empty())),
        );
        // The sum over the two-element decode picking zero then two.
        let mut g = BTreeMap::new();
        g.insert(n0.clone(), zero.clone());
        g.insert(n1.clone(), two.clone());
        let graph = crate::encodings::func(&st, &g).unwrap();
        let expected = st
            .set(&[
                pair(&n1, &n0).unwrap(),
                pair(&n1, &n1).unwrap(),
            ])
            .unwrap();
        assert_eq!(
            u.codes
                .get(&code(&st, Tag::TarskiSigma, &[two.clone(), graph])),
            Some(&Decode::Explicit(expected)),
        );
        // Constructor census: 1 zero + 1 two + 4 eq + 5 sigma + 5 wtype.
        let mut census = BTreeMap::new();
        for c in u.codes.keys() {
            let kind = match classify(&st, Group::Tarski, c) {
                DecodedThing::Tagged { tag, .. } => format!("{tag:?}"),
                DecodedThing::Opaque => "opaque".into(),
            };
            *census.entry(kind).or_insert(0) += 1;
        }
        assert_eq!(census.get("TarskiZero"), Some(&1));
        assert_eq!(census.get("TarskiTwo"), Some(&1));
        assert_eq!(census.get("TarskiEq"), Some(&4));
        assert_eq!(census.get("TarskiSigma"), Some(&5));
        assert_eq!(census.get("TarskiWtype"), Some(&5));
        assert_eq!(census.get("opaque"), None);
        assert_eq!(u.suppressed, 0);
        assert!(u.redecodes_consistently(&st).unwrap());
    }

    #[test]
    fn deeper_runs_extend_shallower_ones() {
        let st = store();
        let d1 = empty_universe(&st, 1);
        let d2 = empty_universe(&st, 2);
        let d3 = empty_universe(&st, 3);
        assert!(d1.extended_by(&d2));
        assert!(d2.extended_by(&d3));
        assert!(d3.codes.len() > d2.codes.len());
        // Depth-two W-type codes become consultable sources at depth three,
        // so some rows are suppressed there.
        assert!(d3.suppressed > 0);
        assert!(d3.redecodes_consistently(&st).unwrap());
    }

    #[test]
    fn base_entries_become_embeddings() {
        let st = store();
        let mut base = BTreeMap::new();
        let a = st.numeral(7).unwrap();
        let b_a = st.set(&[st.numeral(3).unwrap(), st.numeral(4).unwrap()]).unwrap();
        base.insert(a.clone(), b_a.clone());
        let u = tarski_universe(&st, &base, &Budget::new(2, 500_000, 50_000_000)).unwrap();
        let embed = code(&st, Tag::TarskiEmbed, &[a]);
        assert_eq!(u.codes.get(&embed), Some(&Decode::Explicit(b_a.clone())));
        // The base decode participates in equality codes at depth two.
        let eq = code(
            &st,
            Tag::TarskiEq,
            &[embed.clone(), st.numeral(3).unwrap(), st.numeral(3).unwrap()],
        );
        assert_eq!(
            u.codes.get(&eq),
            Some(&Decode::Explicit(st.singleton(&st.empty()).unwrap())),
        );
        assert!(u.redecodes_consistently(&st).unwrap());
    }

    #[test]
    fn wtype_handles_enumerate_boundedly() {
        let st = store();
        let u = empty_universe(&st, 2);
        let zero = code(&st, Tag::TarskiZero, &[]);
        let two = code(&st, Tag::TarskiTwo, &[]);
        let mut g = BTreeMap::new();
        g.insert(st.numeral(0).unwrap(), zero.clone());
        g.insert(st.numeral(1).unwrap(), zero);
        let graph = crate::encodings::func(&st, &g).unwrap();
        let wcode = code(&st, Tag::TarskiWtype, &[two, graph]);
        let Some(Decode::WType(sig)) = u.codes.get(&wcode) else {
            panic!("expected a W-type handle");
        };
        // Both symbols are nullary, so the term fragment is two constants.
        let terms = wtype_fragment(sig, &Budget::depth(3)).unwrap();
        assert_eq!(terms.all().len(), 2);
        assert!(terms.stabilized);
    }

    #[test]
    fn element_cap_is_an_error() {
        let st = store();
        let err = tarski_universe(&st, &BTreeMap::new(), &Budget::new(2, 4, 1_000_000))
            .unwrap_err();
        assert!(matches!(err, UniverseError::Engine(GenError::BudgetExceeded { .. })));
    }

    #[test]
    fn code_rendering_is_structural() {
        let st = store();
        let two = code(&st, Tag::TarskiTwo, &[]);
        let zero = code(&st, Tag::TarskiZero, &[]);
        let eq = code(
            &st,
            Tag::TarskiEq,
            &[two.clone(), st.numeral(0).unwrap(), st.numeral(1).unwrap()],
        );
        assert_eq!(code_text(&st, &eq), "eq(two, 0, 1)");
        let mut g = BTreeMap::new();
        g.insert(st.numeral(0).unwrap(), zero.clone());
        let graph = crate::encodings::func(&st, &g).unwrap();
        let sigma = code(&st, Tag::TarskiSigma, &[two, graph]);
        assert_eq!(code_text(&st, &sigma), "sigma(two, [0 -> zero])");
    }
}
