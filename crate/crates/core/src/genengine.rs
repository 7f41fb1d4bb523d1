//! Rules, rubrics, broad rubrics, and the engines that run them: the
//! one-step operator, bounded least-fixpoint generation, derivation
//! evaluation, and family generation, plus the rubric translations
//! (hat, bracket, cover lift).
//!
//! A rule takes a K-tuple of already-generated elements to a family of new
//! elements. A rubric is a finite map of rules; a broad rubric adds, for
//! every generated element, a further rubric triggered by that element.
//! Everything an engine produces is driven by pure callbacks, so rerunning
//! any engine on the same input yields the same output.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

use crate::broadnum::BroadSignature;
use crate::budget::Budget;
use crate::encodings::{self, encode, func, to_nat, tuple, unfunc, untuple, DecodedThing, Group, Tag};
use crate::hfset::{HfError, HfSet, Store};

/// A class of sets, given as a membership predicate. `None` at use sites
/// means the universal class.
pub type ClassPred = Arc<dyn Fn(&HfSet) -> bool + Send + Sync>;

/// Errors from the generation engines.
#[derive(Debug, Clone, Error)]
pub enum GenError {
    #[error("unknown rule index {index}")]
    UnknownRuleIndex { index: String },
    #[error("derivation child domain does not match the rule arity: {detail}")]
    DomainMismatch { detail: String },
    #[error("index {index} rejected by the result family")]
    IndexRejected { index: String },
    #[error("malformed derivation: {detail}")]
    MalformedDerivation { detail: String },
    #[error("rubric triggered by {value} has no rule {index}")]
    TriggerMissingRule { value: String, index: String },
    #[error("result family has no enumerator and cannot be materialized")]
    NonFinitary,
    #[error("budget exceeded: {what}")]
    BudgetExceeded { what: &'static str },
    #[error(transparent)]
    Hf(#[from] HfError),
    #[error(transparent)]
    Encode(#[from] encodings::EncodeError),
}

/// Render an index or value for an error message: numerals as decimals,
/// anything else in set syntax.
pub(crate) fn atom_string(x: &HfSet) -> String {
    match to_nat(x) {
        Some(n) => n.to_string(),
        None => x.render(256),
    }
}

/// A family of elements indexed by sets, as produced by one rule firing.
#[derive(Clone)]
pub enum ResultFamily {
    /// Finite family given outright: index -> element.
    Explicit(BTreeMap<HfSet, HfSet>),
    /// Family given by callbacks; may be infinite.
    Indexed(IndexedFamily),
}

/// Callback-backed family.
///
/// # Invariants
///
/// - `eval` is defined exactly on the indices accepted by `contains`.
/// - `enumerate`, when present, returns finitely many `(index, element)`
///   pairs, each of which `contains`/`eval` agrees with; it is the
///   family's own finite materialization (a family without one can only
///   be evaluated pointwise).
#[derive(Clone)]
pub struct IndexedFamily {
    pub contains: Arc<dyn Fn(&HfSet) -> bool + Send + Sync>,
    pub eval: Arc<dyn Fn(&HfSet) -> Result<HfSet, GenError> + Send + Sync>,
    pub enumerate: Option<Arc<dyn Fn() -> Result<Vec<(HfSet, HfSet)>, GenError> + Send + Sync>>,
}

impl ResultFamily {
    pub fn empty() -> ResultFamily {
        ResultFamily::Explicit(BTreeMap::new())
    }

    /// The one-element family `(y)` indexed by `0`.
    pub fn singleton(store: &Store, y: HfSet) -> Result<ResultFamily, GenError> {
        let mut map = BTreeMap::new();
        map.insert(store.numeral(0)?, y);
        Ok(ResultFamily::Explicit(map))
    }

    /// The element at index `p`, restricted to `class`. Rejections caused
    /// by the class restriction surface as `IndexRejected`, the same as a
    /// missing index: the restricted family simply lacks that index.
    pub(crate) fn eval_at(&self, p: &HfSet, class: Option<&ClassPred>) -> Result<HfSet, GenError> {
        let rejected = || GenError::IndexRejected {
            index: atom_string(p),
        };
        let value = match self {
            ResultFamily::Explicit(map) => map.get(p).cloned().ok_or_else(rejected)?,
            ResultFamily::Indexed(fam) => {
                if !(fam.contains)(p) {
                    return Err(rejected());
                }
                (fam.eval)(p)?
            }
        };
        if let Some(pred) = class {
            if !pred(&value) {
                return Err(rejected());
            }
        }
        Ok(value)
    }

    /// All `(index, element)` pairs, restricted to `class`.
    fn materialize(&self, class: Option<&ClassPred>) -> Result<Vec<(HfSet, HfSet)>, GenError> {
        let raw = match self {
            ResultFamily::Explicit(map) => {
                map.iter().map(|(p, y)| (p.clone(), y.clone())).collect()
            }
            ResultFamily::Indexed(fam) => {
                let enumerate = fam.enumerate.as_ref().ok_or(GenError::NonFinitary)?;
                enumerate()?
            }
        };
        Ok(match class {
            None => raw,
            Some(pred) => raw.into_iter().filter(|(_, y)| pred(y)).collect(),
        })
    }
}

/// One rule: an arity set and the function taking each tuple over that
/// arity to a result family.
#[derive(Clone)]
pub struct Rule {
    pub arity: HfSet,
    pub apply: Arc<dyn Fn(&BTreeMap<HfSet, HfSet>) -> Result<ResultFamily, GenError> + Send + Sync>,
}

impl Rule {
    pub fn new(
        arity: HfSet,
        apply: impl Fn(&BTreeMap<HfSet, HfSet>) -> Result<ResultFamily, GenError>
            + Send
            + Sync
            + 'static,
    ) -> Rule {
        Rule {
            arity,
            apply: Arc::new(apply),
        }
    }
}

/// A finite family of rules on a class.
///
/// The class restricts generated elements index-wise: a family member
/// whose value falls outside the class is treated as absent.
#[derive(Clone, Default)]
pub struct Rubric {
    pub rules: BTreeMap<HfSet, Rule>,
    pub class: Option<ClassPred>,
}

impl Rubric {
    pub fn new(rules: BTreeMap<HfSet, Rule>) -> Rubric {
        Rubric { rules, class: None }
    }

    pub fn with_class(mut self, class: ClassPred) -> Rubric {
        self.class = Some(class);
        self
    }

    pub fn empty() -> Rubric {
        Rubric::default()
    }
}

/// Assignment of a rubric to every possible trigger value.
#[derive(Clone)]
pub enum TriggerMap {
    /// Finite support: values outside the table trigger the empty rubric.
    Table(BTreeMap<HfSet, Rubric>),
    /// Computed triggers; `None` means the empty rubric.
    Dynamic(Arc<dyn Fn(&HfSet) -> Option<Rubric> + Send + Sync>),
}

impl TriggerMap {
    pub fn empty() -> TriggerMap {
        TriggerMap::Table(BTreeMap::new())
    }

    /// The rubric triggered by `x` (empty by default).
    pub fn rubric_for(&self, x: &HfSet) -> Rubric {
        match self {
            TriggerMap::Table(table) => table.get(x).cloned().unwrap_or_default(),
            TriggerMap::Dynamic(f) => f(x).unwrap_or_default(),
        }
    }
}

/// A basic rubric plus a rubric triggered by every generated element.
#[derive(Clone)]
pub struct BroadRubric {
    pub basic: Rubric,
    pub trigger: TriggerMap,
}

/// Result of a bounded closure run.
#[derive(Debug, Clone)]
pub struct Generated {
    pub set: BTreeSet<HfSet>,
    /// True when a full round added nothing, i.e. the set is the least
    /// prefixpoint. False means the budget cut the run; the partial set is
    /// still a postfixpoint.
    pub stabilized: bool,
    pub rounds: usize,
}

/// Result of a bounded family-generation run: derivations mapped to the
/// values they derive.
#[derive(Debug, Clone)]
pub struct GeneratedFamily {
    pub entries: BTreeMap<HfSet, HfSet>,
    /// True when the final round added no new derivations.
    pub stabilized: bool,
}

/// Enumerate every function from `positions` to `pool[0..pool_len]`,
/// invoking `visit` on each; `visit` returns false to stop early.
fn for_each_assignment(
    positions: &[HfSet],
    pool: &[HfSet],
    mut visit: impl FnMut(&BTreeMap<HfSet, HfSet>, &[usize]) -> Result<bool, GenError>,
) -> Result<(), GenError> {
    if positions.is_empty() {
        visit(&BTreeMap::new(), &[])?;
        return Ok(());
    }
    if pool.is_empty() {
        return Ok(());
    }
    let mut picks = vec![0usize; positions.len()];
    loop {
        let assignment: BTreeMap<HfSet, HfSet> = positions
            .iter()
            .cloned()
            .zip(picks.iter().map(|&ix| pool[ix].clone()))
            .collect();
        if !visit(&assignment, &picks)? {
            return Ok(());
        }
        let mut place = 0;
        loop {
            if place == picks.len() {
                return Ok(());
            }
            picks[place] += 1;
            if picks[place] < pool.len() {
                break;
            }
            picks[place] = 0;
            place += 1;
        }
    }
}

/// Run every rule of `rules` over every tuple from `pool` that touches
/// `pool[new_from..]`, inserting family members not already in `all` into
/// `fresh`. Returns true when the fuel or element budget stopped the run.
#[allow(clippy::too_many_arguments)]
fn run_rules(
    rules: &BTreeMap<HfSet, Rule>,
    class: Option<&ClassPred>,
    pool: &[HfSet],
    new_from: usize,
    fuel: &mut u64,
    max_elements: usize,
    all: &BTreeSet<HfSet>,
    fresh: &mut BTreeSet<HfSet>,
) -> Result<bool, GenError> {
    for rule in rules.values() {
        let positions = rule.arity.elements();
        // A nullary rule has exactly one (empty) tuple, which never
        // touches new elements; it fires only on all-tuples passes.
        if positions.is_empty() && new_from > 0 {
            continue;
        }
        let mut truncated = false;
        for_each_assignment(&positions, pool, |assignment, picks| {
            if new_from > 0 && picks.iter().all(|&ix| ix < new_from) {
                return Ok(true);
            }
            if *fuel == 0 || all.len() + fresh.len() >= max_elements {
                truncated = true;
                return Ok(false);
            }
            *fuel -= 1;
            let family = (rule.apply)(assignment)?;
            for (_, y) in family.materialize(class)? {
                if !all.contains(&y) {
                    fresh.insert(y);
                }
            }
            Ok(true)
        })?;
        if truncated {
            return Ok(true);
        }
    }
    Ok(false)
}

/// One step of the operator for a plain rubric: every family member
/// produced by every rule applied to every tuple within `x`.
pub fn gamma_step(r: &Rubric, x: &BTreeSet<HfSet>) -> Result<BTreeSet<HfSet>, GenError> {
    let pool: Vec<HfSet> = x.iter().cloned().collect();
    let mut out = BTreeSet::new();
    let mut fuel = u64::MAX;
    run_rules(
        &r.rules,
        r.class.as_ref(),
        &pool,
        0,
        &mut fuel,
        usize::MAX,
        &BTreeSet::new(),
        &mut out,
    )?;
    Ok(out)
}

/// One step of the operator for a broad rubric: the basic step plus the
/// triggered rubrics of all members of `x` applied to tuples within `x`.
pub fn gamma_step_broad(b: &BroadRubric, x: &BTreeSet<HfSet>) -> Result<BTreeSet<HfSet>, GenError> {
    let mut out = gamma_step(&b.basic, x)?;
    let pool: Vec<HfSet> = x.iter().cloned().collect();
    let mut fuel = u64::MAX;
    for source in x {
        let rubric = b.trigger.rubric_for(source);
        run_rules(
            &rubric.rules,
            rubric.class.as_ref(),
            &pool,
            0,
            &mut fuel,
            usize::MAX,
            &BTreeSet::new(),
            &mut out,
        )?;
    }
    Ok(out)
}

/// Whether `x` is inductive for `r`: every rule applied to every tuple
/// within `x` lands back in `x`.
pub fn is_inductive(r: &Rubric, x: &BTreeSet<HfSet>) -> Result<bool, GenError> {
    Ok(gamma_step(r, x)?.is_subset(x))
}

/// Broad form of [`is_inductive`]: also checks the rubrics triggered by
/// members of `x`.
pub fn is_inductive_broad(b: &BroadRubric, x: &BTreeSet<HfSet>) -> Result<bool, GenError> {
    Ok(gamma_step_broad(b, x)?.is_subset(x))
}

/// Run the inductive chain of `r` from the empty set until it stabilizes
/// or the budget runs out.
pub fn generate_set(r: &Rubric, budget: &Budget) -> Result<Generated, GenError> {
    generate_set_impl(&r.clone().into_broad_trivial(), budget, false)
}

/// Run the inductive chain of a broad rubric.
pub fn generate_set_broad(b: &BroadRubric, budget: &Budget) -> Result<Generated, GenError> {
    generate_set_impl(b, budget, true)
}

impl Rubric {
    fn into_broad_trivial(self) -> BroadRubric {
        BroadRubric {
            basic: self,
            trigger: TriggerMap::empty(),
        }
    }
}

fn generate_set_impl(b: &BroadRubric, budget: &Budget, broad: bool) -> Result<Generated, GenError> {
    let mut all: BTreeSet<HfSet> = BTreeSet::new();
    let mut pool: Vec<HfSet> = Vec::new();
    // pool[new_from..] holds the previous round's additions. Semi-naive:
    // rules fire only on tuples touching a new element, and new trigger
    // sources see all tuples; by monotonicity this reproduces the full
    // cumulative step.
    let mut new_from = 0;
    let mut fuel = budget.fuel;
    let mut rounds = 0;
    for _ in 0..budget.depth {
        let mut fresh: BTreeSet<HfSet> = BTreeSet::new();
        let truncated = run_round(
            b,
            broad,
            &pool,
            new_from,
            &mut fuel,
            budget.max_elements,
            &all,
            &mut fresh,
        )?;
        rounds += 1;
        if truncated {
            all.extend(fresh);
            return Ok(Generated {
                set: all,
                stabilized: false,
                rounds,
            });
        }
        if fresh.is_empty() {
            return Ok(Generated {
                set: all,
                stabilized: true,
                rounds,
            });
        }
        new_from = pool.len();
        for y in fresh {
            if all.insert(y.clone()) {
                pool.push(y);
            }
        }
    }
    Ok(Generated {
        set: all,
        stabilized: false,
        rounds,
    })
}

#[allow(clippy::too_many_arguments)]
fn run_round(
    b: &BroadRubric,
    broad: bool,
    pool: &[HfSet],
    new_from: usize,
    fuel: &mut u64,
    max_elements: usize,
    all: &BTreeSet<HfSet>,
    fresh: &mut BTreeSet<HfSet>,
) -> Result<bool, GenError> {
    if run_rules(
        &b.basic.rules,
        b.basic.class.as_ref(),
        pool,
        new_from,
        fuel,
        max_elements,
        all,
        fresh,
    )? {
        return Ok(true);
    }
    if broad {
        for (source_ix, source) in pool.iter().enumerate() {
            let rubric = b.trigger.rubric_for(source);
            if rubric.rules.is_empty() {
                continue;
            }
            // New sources must see every tuple; old sources only need
            // tuples touching new elements.
            let tuple_new_from = if source_ix >= new_from { 0 } else { new_from };
            if run_rules(
                &rubric.rules,
                rubric.class.as_ref(),
                pool,
                tuple_new_from,
                fuel,
                max_elements,
                all,
                fresh,
            )? {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Evaluate a derivation `<i, g, p>` against a rubric, bottom-up.
pub fn eval_derivation(r: &Rubric, d: &HfSet) -> Result<HfSet, GenError> {
    let parts = untuple(d).ok_or_else(|| GenError::MalformedDerivation {
        detail: "expected a 3-tuple <i, g, p>".into(),
    })?;
    let [i, g, p] = parts.as_slice() else {
        return Err(GenError::MalformedDerivation {
            detail: format!("expected a 3-tuple <i, g, p>, got {} components", parts.len()),
        });
    };
    let children = unfunc(g).ok_or_else(|| GenError::MalformedDerivation {
        detail: "child tuple is not a function graph".into(),
    })?;
    let rule = r.rules.get(i).ok_or_else(|| GenError::UnknownRuleIndex {
        index: atom_string(i),
    })?;
    check_domain(&rule.arity, &children)?;
    let mut values = BTreeMap::new();
    for (k, sub) in &children {
        values.insert(k.clone(), eval_derivation(r, sub)?);
    }
    let family = (rule.apply)(&values)?;
    family.eval_at(p, r.class.as_ref())
}

/// Evaluate a broad derivation built from the Basic/Trigger constructors.
pub fn eval_derivation_broad(b: &BroadRubric, d: &HfSet) -> Result<HfSet, GenError> {
    let store = d.store();
    match encodings::classify(store, Group::Derivation, d) {
        DecodedThing::Tagged { tag: Tag::Basic, args } => {
            let [i, g, p] = args.as_slice() else { unreachable!() };
            eval_rule_of(&b.basic, b, i, g, p, None)
        }
        DecodedThing::Tagged { tag: Tag::Trigger, args } => {
            let [m, i, g, p] = args.as_slice() else { unreachable!() };
            let value = eval_derivation_broad(b, m)?;
            let rubric = b.trigger.rubric_for(&value);
            eval_rule_of(&rubric, b, i, g, p, Some(&value))
        }
        _ => Err(GenError::MalformedDerivation {
            detail: "expected a Basic or Trigger constructor".into(),
        }),
    }
}

fn eval_rule_of(
    rubric: &Rubric,
    b: &BroadRubric,
    i: &HfSet,
    g: &HfSet,
    p: &HfSet,
    trigger_value: Option<&HfSet>,
) -> Result<HfSet, GenError> {
    let children = unfunc(g).ok_or_else(|| GenError::MalformedDerivation {
        detail: "child tuple is not a function graph".into(),
    })?;
    let rule = rubric.rules.get(i).ok_or_else(|| match trigger_value {
        Some(value) => GenError::TriggerMissingRule {
            value: atom_string(value),
            index: atom_string(i),
        },
        None => GenError::UnknownRuleIndex {
            index: atom_string(i),
        },
    })?;
    check_domain(&rule.arity, &children)?;
    let mut values = BTreeMap::new();
    for (k, sub) in &children {
        values.insert(k.clone(), eval_derivation_broad(b, sub)?);
    }
    let family = (rule.apply)(&values)?;
    family.eval_at(p, rubric.class.as_ref())
}

pub(crate) fn check_domain(arity: &HfSet, children: &BTreeMap<HfSet, HfSet>) -> Result<(), GenError> {
    let ok = children.len() == arity.len() && children.keys().all(|k| arity.contains(k));
    if !ok {
        let dom: Vec<String> = children.keys().map(atom_string).collect();
        return Err(GenError::DomainMismatch {
            detail: format!(
                "rule arity is {} but the derivation supplies [{}]",
                arity.render(256),
                dom.join(", ")
            ),
        });
    }
    Ok(())
}

/// All derivations of depth at most `budget.depth`, with their values.
/// Keys are `<i, g, p>` tuples whose `g` maps positions to child keys.
pub fn generate_family(
    store: &Store,
    r: &Rubric,
    budget: &Budget,
) -> Result<GeneratedFamily, GenError> {
    generate_family_impl(store, &r.clone().into_broad_trivial(), budget, false)
}

/// Broad form of [`generate_family`]; keys are Basic/Trigger encodings.
pub fn generate_family_broad(
    store: &Store,
    b: &BroadRubric,
    budget: &Budget,
) -> Result<GeneratedFamily, GenError> {
    generate_family_impl(store, b, budget, true)
}

fn generate_family_impl(
    store: &Store,
    b: &BroadRubric,
    budget: &Budget,
    broad: bool,
) -> Result<GeneratedFamily, GenError> {
    // keys[ix] = (derivation key, value, depth); depth 1 = leaf rules.
    let mut keys: Vec<(HfSet, HfSet, usize)> = Vec::new();
    let mut entries: BTreeMap<HfSet, HfSet> = BTreeMap::new();
    let mut fuel = budget.fuel;
    let mut stabilized = false;

    for round in 1..=budget.depth {
        let mut new_entries: Vec<(HfSet, HfSet, usize)> = Vec::new();
        let key_list: Vec<HfSet> = keys.iter().map(|(k, _, _)| k.clone()).collect();
        let depths: Vec<usize> = keys.iter().map(|(_, _, d)| *d).collect();
        let values: BTreeMap<HfSet, HfSet> = keys
            .iter()
            .map(|(k, v, _)| (k.clone(), v.clone()))
            .collect();

        // Basic rules: child assignments whose deepest child has depth
        // round-1 (so the new derivation has depth round).
        for (i, rule) in &b.basic.rules {
            collect_family_rows(
                store,
                FamilyKind::Basic,
                i,
                rule,
                b.basic.class.as_ref(),
                &key_list,
                &depths,
                &values,
                round,
                &mut fuel,
                budget,
                entries.len() + new_entries.len(),
                &mut new_entries,
                broad,
            )?;
        }
        if broad {
            for (m_key, m_value, m_depth) in &keys {
                let rubric = b.trigger.rubric_for(m_value);
                for (i, rule) in &rubric.rules {
                    collect_family_rows(
                        store,
                        FamilyKind::Trigger {
                            m_key,
                            m_depth: *m_depth,
                        },
                        i,
                        rule,
                        rubric.class.as_ref(),
                        &key_list,
                        &depths,
                        &values,
                        round,
                        &mut fuel,
                        budget,
                        entries.len() + new_entries.len(),
                        &mut new_entries,
                        broad,
                    )?;
                }
            }
        }

        if new_entries.is_empty() {
            stabilized = true;
            break;
        }
        for (key, value, depth) in new_entries {
            if entries.insert(key.clone(), value.clone()).is_none() {
                keys.push((key, value, depth));
            }
        }
    }
    Ok(GeneratedFamily {
        entries,
        stabilized,
    })
}

enum FamilyKind<'a> {
    Basic,
    Trigger { m_key: &'a HfSet, m_depth: usize },
}

#[allow(clippy::too_many_arguments)]
fn collect_family_rows(
    store: &Store,
    kind: FamilyKind<'_>,
    i: &HfSet,
    rule: &Rule,
    class: Option<&ClassPred>,
    key_list: &[HfSet],
    depths: &[usize],
    values: &BTreeMap<HfSet, HfSet>,
    round: usize,
    fuel: &mut u64,
    budget: &Budget,
    current_len: usize,
    out: &mut Vec<(HfSet, HfSet, usize)>,
    broad: bool,
) -> Result<(), GenError> {
    let positions = rule.arity.elements();
    let base_depth = match &kind {
        FamilyKind::Basic => 0,
        FamilyKind::Trigger { m_depth, .. } => *m_depth,
    };
    // The new derivation's depth is 1 + max(children, trigger source).
    // Only emit rows landing exactly at `round`, so each key appears once.
    for_each_assignment(&positions, key_list, |assignment, picks| {
        let child_max = picks.iter().map(|&ix| depths[ix]).max().unwrap_or(0);
        if 1 + child_max.max(base_depth) != round {
            return Ok(true);
        }
        if *fuel == 0 || current_len + out.len() >= budget.max_elements {
            return Err(GenError::BudgetExceeded {
                what: "family generation element or fuel cap",
            });
        }
        *fuel -= 1;
        let mut child_values = BTreeMap::new();
        for (k, key) in assignment {
            child_values.insert(k.clone(), values[key].clone());
        }
        let family = (rule.apply)(&child_values)?;
        let rows = family.materialize(class)?;
        if rows.is_empty() {
            return Ok(true);
        }
        let g = func(store, assignment)?;
        for (p, y) in rows {
            let key = match &kind {
                FamilyKind::Basic => {
                    if broad {
                        encode(store, Tag::Basic, &[i.clone(), g.clone(), p])?
                    } else {
                        tuple(store, &[i.clone(), g.clone(), p])?
                    }
                }
                FamilyKind::Trigger { m_key, .. } => encode(
                    store,
                    Tag::Trigger,
                    &[(*m_key).clone(), i.clone(), g.clone(), p],
                )?,
            };
            out.push((key, y, round));
        }
        Ok(true)
    })
}

/// Iterate an arbitrary monotone operator from the empty set, returning
/// the chain (including the starting empty set) and whether it reached a
/// fixpoint within `max_rounds` steps.
pub fn iterate_monotone(
    gamma: impl Fn(&BTreeSet<HfSet>) -> Result<BTreeSet<HfSet>, GenError>,
    max_rounds: usize,
) -> Result<(Vec<BTreeSet<HfSet>>, bool), GenError> {
    let mut chain = vec![BTreeSet::new()];
    for _ in 0..max_rounds {
        let next = gamma(chain.last().unwrap())?;
        if &next == chain.last().unwrap() {
            return Ok((chain, true));
        }
        chain.push(next);
    }
    Ok((chain, false))
}

/// View a plain rubric as a broad rubric with empty triggers.
pub fn hat_rubric(r: &Rubric) -> BroadRubric {
    BroadRubric {
        basic: r.clone(),
        trigger: TriggerMap::empty(),
    }
}

/// The broad rubric whose generated set is the set of broad numbers of
/// `g`: the basic part produces `Start`, and each element `x` triggers
/// one rule per symbol of `g(x)`, building `Build(x, i, [a_k])`.
pub fn bracket_broadsig(store: &Store, g: &BroadSignature) -> BroadRubric {
    let mut basic_rules = BTreeMap::new();
    let start_store = store.clone();
    basic_rules.insert(
        store.empty(),
        Rule::new(store.empty(), move |_| {
            ResultFamily::singleton(&start_store, start_store.empty())
        }),
    );
    let g = g.clone();
    let trig_store = store.clone();
    BroadRubric {
        basic: Rubric::new(basic_rules),
        trigger: TriggerMap::Dynamic(Arc::new(move |x: &HfSet| {
            let sig = g.signature_of(x);
            if sig.is_empty() {
                return None;
            }
            let mut rules = BTreeMap::new();
            for (i, arity) in sig.arities() {
                let store = trig_store.clone();
                let x = x.clone();
                let i_inner = i.clone();
                rules.insert(
                    i.clone(),
                    Rule::new(arity.clone(), move |assignment| {
                        let graph = func(&store, assignment)?;
                        let built = encode(&store, Tag::Build, &[x.clone(), i_inner.clone(), graph])?;
                        ResultFamily::singleton(&store, built)
                    }),
                );
            }
            Some(Rubric::new(rules))
        })),
    }
}

/// Lift a rule along a cover of its arity: the new arity is the disjoint
/// sum of the cover's components, the result on fiber-constant tuples is
/// the original rule's on the collapsed tuple, and the family is empty on
/// every other tuple.
pub fn cover_lift_rule(
    store: &Store,
    rule: &Rule,
    cover: &BTreeMap<HfSet, HfSet>,
) -> Result<Rule, GenError> {
    let positions = rule.arity.elements();
    if cover.len() != positions.len() || !positions.iter().all(|k| cover.contains_key(k)) {
        return Err(GenError::DomainMismatch {
            detail: "cover must be indexed exactly by the rule arity".into(),
        });
    }
    let mut sum_elems = Vec::new();
    for (k, component) in cover {
        if component.is_empty() {
            return Err(GenError::MalformedDerivation {
                detail: format!("cover component at {} is empty", atom_string(k)),
            });
        }
        for d in component.elements() {
            sum_elems.push(encodings::pair(k, &d)?);
        }
    }
    let new_arity = store.set(&sum_elems)?;
    let inner = rule.apply.clone();
    let cover = cover.clone();
    Ok(Rule::new(new_arity, move |assignment| {
        // Collapse: each fiber {<k, d> : d in D_k} must be constant.
        let mut collapsed = BTreeMap::new();
        for (k, component) in &cover {
            let mut common: Option<HfSet> = None;
            for d in component.elements() {
                let key = encodings::pair(k, &d)?;
                let value = assignment.get(&key).ok_or_else(|| GenError::DomainMismatch {
                    detail: "tuple does not cover the lifted arity".into(),
                })?;
                match &common {
                    None => common = Some(value.clone()),
                    Some(prev) if prev == value => {}
                    Some(_) => return Ok(ResultFamily::empty()),
                }
            }
            collapsed.insert(k.clone(), common.expect("components are inhabited"));
        }
        inner(&collapsed)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat_class(cap: u64) -> ClassPred {
        Arc::new(move |x: &HfSet| to_nat(x).is_some_and(|n| n <= cap))
    }

    /// The two-rule rubric on naturals: rule 0 (arity {0,1}) sends
    /// [m0, m1] to (m0 + m1 + p) for p >= 2*m0; rule 1 (arity {}) sends
    /// [] to (2p) for p >= 50. `cap` attaches an enumerator listing the
    /// first `cap` indices; None leaves the families eval-only.
    fn sample_rubric(store: &Store, cap: Option<usize>, class_cap: Option<u64>) -> Rubric {
        let mut rules = BTreeMap::new();
        let st0 = store.clone();
        rules.insert(
            store.numeral(0).unwrap(),
            Rule::new(store.numeral(2).unwrap(), move |args| {
                let m0 = to_nat(&args[&st0.numeral(0)?]).ok_or_else(|| {
                    GenError::MalformedDerivation {
                        detail: "rule 0 needs naturals".into(),
                    }
                })?;
                let m1 = to_nat(&args[&st0.numeral(1)?]).ok_or_else(|| {
                    GenError::MalformedDerivation {
                        detail: "rule 0 needs naturals".into(),
                    }
                })?;
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

    /// The family (f(p)) for numeral indices p >= lo.
    fn affine_family(
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
                }) as Arc<dyn Fn() -> Result<Vec<(HfSet, HfSet)>, GenError> + Send + Sync>
            }),
        })
    }

    fn deriv(store: &Store, i: u64, children: &[(u64, HfSet)], p: u64) -> HfSet {
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

    #[test]
    fn gamma_of_empty_set() {
        let st = Store::new();
        // No nullary rules: one rule of arity {0}.
        let mut rules = BTreeMap::new();
        let st2 = st.clone();
        rules.insert(
            st.numeral(0).unwrap(),
            Rule::new(st.numeral(1).unwrap(), move |args| {
                ResultFamily::singleton(&st2, args[&st2.numeral(0)?].clone())
            }),
        );
        let r = Rubric::new(rules);
        assert!(gamma_step(&r, &BTreeSet::new()).unwrap().is_empty());

        // A nullary rule makes the step produce its family.
        let st3 = st.clone();
        let mut rules = BTreeMap::new();
        rules.insert(
            st.numeral(0).unwrap(),
            Rule::new(st.empty(), move |_| {
                ResultFamily::singleton(&st3, st3.numeral(7)?)
            }),
        );
        let r = Rubric::new(rules);
        let step = gamma_step(&r, &BTreeSet::new()).unwrap();
        assert_eq!(step.len(), 1);
        assert!(step.contains(&st.numeral(7).unwrap()));
    }

    #[test]
    fn gamma_is_monotone() {
        let st = Store::new();
        let r = sample_rubric(&st, Some(2), Some(1000));
        let mut small = BTreeSet::new();
        small.insert(st.numeral(100).unwrap());
        let mut large = small.clone();
        large.insert(st.numeral(102).unwrap());
        let gs = gamma_step(&r, &small).unwrap();
        let gl = gamma_step(&r, &large).unwrap();
        assert!(gs.is_subset(&gl));
    }

    #[test]
    fn idempotent_rule_stabilizes() {
        let st = Store::new();
        let mut rules = BTreeMap::new();
        let st2 = st.clone();
        rules.insert(
            st.numeral(0).unwrap(),
            Rule::new(st.empty(), move |_| {
                ResultFamily::singleton(&st2, st2.numeral(3)?)
            }),
        );
        let st3 = st.clone();
        rules.insert(
            st.numeral(1).unwrap(),
            Rule::new(st.numeral(1).unwrap(), move |args| {
                ResultFamily::singleton(&st3, args[&st3.numeral(0)?].clone())
            }),
        );
        let r = Rubric::new(rules);
        let generated = generate_set(&r, &Budget::depth(10)).unwrap();
        assert!(generated.stabilized);
        assert_eq!(generated.set.len(), 1);
        assert!(generated.set.contains(&st.numeral(3).unwrap()));
    }

    #[test]
    fn truncated_sample_rubric_stabilizes_at_or_above_100() {
        let st = Store::new();
        let r = sample_rubric(&st, Some(2), Some(1000));
        let generated = generate_set(&r, &Budget::new(30, 1_000_000, 50_000_000)).unwrap();
        assert!(generated.stabilized, "rounds: {}", generated.rounds);
        assert!(!generated.set.is_empty());
        for x in &generated.set {
            let n = to_nat(x).expect("closure stays within the numerals");
            assert!(n >= 100, "generated {n} below 100");
        }
        assert!(is_inductive(&r, &generated.set).unwrap());
    }

    #[test]
    fn non_finitary_family_is_an_error_for_generation_only() {
        let st = Store::new();
        let r = sample_rubric(&st, None, None);
        let err = generate_set(&r, &Budget::depth(3)).unwrap_err();
        assert!(matches!(err, GenError::NonFinitary));
        // Pointwise evaluation still works.
        let d = deriv(&st, 1, &[], 50);
        assert_eq!(eval_derivation(&r, &d).unwrap(), st.numeral(100).unwrap());
    }

    #[test]
    fn derivation_evaluation_matches_hand_results() {
        let st = Store::new();
        let r = sample_rubric(&st, None, None);
        let d50 = deriv(&st, 1, &[], 50);
        let d51 = deriv(&st, 1, &[], 51);
        assert_eq!(eval_derivation(&r, &d50).unwrap(), st.numeral(100).unwrap());
        assert_eq!(eval_derivation(&r, &d51).unwrap(), st.numeral(102).unwrap());
        // Two distinct derivations of 402.
        let a = deriv(&st, 0, &[(0, d50.clone()), (1, d50.clone())], 202);
        let b = deriv(&st, 0, &[(0, d50.clone()), (1, d51.clone())], 200);
        assert_ne!(a, b);
        assert_eq!(eval_derivation(&r, &a).unwrap(), st.numeral(402).unwrap());
        assert_eq!(eval_derivation(&r, &b).unwrap(), st.numeral(402).unwrap());
    }

    #[test]
    fn derivation_errors_are_specific() {
        let st = Store::new();
        let r = sample_rubric(&st, None, None);
        let bad_index = deriv(&st, 9, &[], 50);
        assert!(matches!(
            eval_derivation(&r, &bad_index),
            Err(GenError::UnknownRuleIndex { .. })
        ));
        let d50 = deriv(&st, 1, &[], 50);
        let bad_domain = deriv(&st, 0, &[(0, d50.clone())], 200);
        assert!(matches!(
            eval_derivation(&r, &bad_domain),
            Err(GenError::DomainMismatch { .. })
        ));
        let bad_p = deriv(&st, 1, &[], 49);
        assert!(matches!(
            eval_derivation(&r, &bad_p),
            Err(GenError::IndexRejected { .. })
        ));
        assert!(matches!(
            eval_derivation(&r, &st.empty()),
            Err(GenError::MalformedDerivation { .. })
        ));
    }

    #[test]
    fn family_generation_singleton() {
        let st = Store::new();
        let mut rules = BTreeMap::new();
        let st2 = st.clone();
        let a = st.numeral(9).unwrap();
        let a2 = a.clone();
        rules.insert(
            st.numeral(0).unwrap(),
            Rule::new(st.empty(), move |_| {
                ResultFamily::singleton(&st2, a2.clone())
            }),
        );
        let r = Rubric::new(rules);
        let fam = generate_family(&st, &r, &Budget::depth(3)).unwrap();
        assert!(fam.stabilized);
        assert_eq!(fam.entries.len(), 1);
        let key = deriv(&st, 0, &[], 0);
        assert_eq!(fam.entries.get(&key), Some(&a));
    }

    #[test]
    fn family_contains_both_derivations_of_402() {
        let st = Store::new();
        // Cap 3 so the (100, 100) branch lists p in {200, 201, 202}: the
        // p = 202 route to 402 must coexist with the p = 200 route below.
        let r = sample_rubric(&st, Some(3), Some(1000));
        let fam = generate_family(&st, &r, &Budget::new(2, 500_000, 10_000_000)).unwrap();
        let d50 = deriv(&st, 1, &[], 50);
        let d51 = deriv(&st, 1, &[], 51);
        let a = deriv(&st, 0, &[(0, d50.clone()), (1, d50.clone())], 202);
        let b = deriv(&st, 0, &[(0, d50.clone()), (1, d51.clone())], 200);
        assert_eq!(fam.entries.get(&a), Some(&st.numeral(402).unwrap()));
        assert_eq!(fam.entries.get(&b), Some(&st.numeral(402).unwrap()));
        // Every family entry evaluates to its stored value.
        for (d, v) in &fam.entries {
            assert_eq!(&eval_derivation(&r, d).unwrap(), v);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let st = Store::new();
        let r = sample_rubric(&st, Some(2), Some(500));
        let g1 = generate_set(&r, &Budget::depth(20)).unwrap();
        let g2 = generate_set(&r, &Budget::depth(20)).unwrap();
        assert_eq!(g1.set, g2.set);
        assert_eq!(g1.stabilized, g2.stabilized);
        let f1 = generate_family(&st, &r, &Budget::depth(2)).unwrap();
        let f2 = generate_family(&st, &r, &Budget::depth(2)).unwrap();
        assert_eq!(f1.entries, f2.entries);
    }

    #[test]
    fn hat_rubric_generates_the_same_set() {
        let st = Store::new();
        let r = sample_rubric(&st, Some(2), Some(600));
        let plain = generate_set(&r, &Budget::depth(20)).unwrap();
        let broad = generate_set_broad(&hat_rubric(&r), &Budget::depth(20)).unwrap();
        assert_eq!(plain.set, broad.set);
        assert_eq!(hat_rubric(&r).basic.rules.len(), r.rules.len());
    }

    #[test]
    fn budget_truncation_is_flagged_not_fatal() {
        let st = Store::new();
        let r = sample_rubric(&st, Some(2), Some(1000));
        let generated = generate_set(&r, &Budget::new(30, 10, 100_000)).unwrap();
        assert!(!generated.stabilized);
        assert!(generated.set.len() <= 10 + 2);
    }

    #[test]
    fn cover_lift_collapses_fiber_constant_tuples() {
        let st = Store::new();
        // Original rule: arity {0,1}, [x, y] -> singleton family (pair of
        // the two).
        let st2 = st.clone();
        let rule = Rule::new(st.numeral(2).unwrap(), move |args| {
            let v = encodings::pair(&args[&st2.numeral(0)?], &args[&st2.numeral(1)?])?;
            ResultFamily::singleton(&st2, v)
        });
        // Cover: position 0 by {a}, position 1 by {b, c}.
        let a = st.numeral(5).unwrap();
        let b = st.numeral(6).unwrap();
        let c = st.numeral(7).unwrap();
        let mut cover = BTreeMap::new();
        cover.insert(st.numeral(0).unwrap(), st.singleton(&a).unwrap());
        cover.insert(st.numeral(1).unwrap(), st.pair_set(&b, &c).unwrap());
        let lifted = cover_lift_rule(&st, &rule, &cover).unwrap();
        assert_eq!(lifted.arity.len(), 3);

        let key = |k: &HfSet, d: &HfSet| encodings::pair(k, d).unwrap();
        let x = st.numeral(30).unwrap();
        let y = st.numeral(40).unwrap();
        let mut fiber_constant = BTreeMap::new();
        fiber_constant.insert(key(&st.numeral(0).unwrap(), &a), x.clone());
        fiber_constant.insert(key(&st.numeral(1).unwrap(), &b), y.clone());
        fiber_constant.insert(key(&st.numeral(1).unwrap(), &c), y.clone());
        let fam = (lifted.apply)(&fiber_constant).unwrap();
        let got = fam.materialize(None).unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].1, encodings::pair(&x, &y).unwrap());

        let mut skew = fiber_constant.clone();
        skew.insert(key(&st.numeral(1).unwrap(), &c), x.clone());
        let fam = (lifted.apply)(&skew).unwrap();
        assert!(fam.materialize(None).unwrap().is_empty());
    }

    #[test]
    fn cover_lift_validates_inputs() {
        let st = Store::new();
        let st2 = st.clone();
        let rule = Rule::new(st.numeral(1).unwrap(), move |args| {
            ResultFamily::singleton(&st2, args[&st2.numeral(0)?].clone())
        });
        let empty_cover = BTreeMap::new();
        assert!(cover_lift_rule(&st, &rule, &empty_cover).is_err());
        let mut bad = BTreeMap::new();
        bad.insert(st.numeral(0).unwrap(), st.empty());
        assert!(cover_lift_rule(&st, &rule, &bad).is_err());
    }

    #[test]
    fn unit_cover_is_isomorphic() {
        let st = Store::new();
        let st2 = st.clone();
        let rule = Rule::new(st.numeral(1).unwrap(), move |args| {
            ResultFamily::singleton(&st2, st2.singleton(&args[&st2.numeral(0)?])?)
        });
        let mut cover = BTreeMap::new();
        cover.insert(st.numeral(0).unwrap(), st.numeral(1).unwrap());
        let lifted = cover_lift_rule(&st, &rule, &cover).unwrap();
        assert_eq!(lifted.arity.len(), 1);
        let x = st.numeral(8).unwrap();
        let mut tuple_in = BTreeMap::new();
        tuple_in.insert(
            encodings::pair(&st.numeral(0).unwrap(), &st.numeral(0).unwrap()).unwrap(),
            x.clone(),
        );
        let fam = (lifted.apply)(&tuple_in).unwrap();
        let got = fam.materialize(None).unwrap();
        assert_eq!(got[0].1, st.singleton(&x).unwrap());
    }

    #[test]
    fn monotone_iteration_stabilizes_within_ground_size() {
        let st = Store::new();
        let ground: Vec<HfSet> = (0..5).map(|n| st.numeral(n).unwrap()).collect();
        // Gamma adds element n+1 if n is present, plus element 0.
        let g2 = ground.clone();
        let gamma = move |x: &BTreeSet<HfSet>| {
            let mut out = BTreeSet::new();
            out.insert(g2[0].clone());
            for (n, e) in g2.iter().enumerate() {
                if n + 1 < g2.len() && x.contains(e) {
                    out.insert(g2[n + 1].clone());
                }
            }
            Ok(out)
        };
        let (chain, stabilized) = iterate_monotone(gamma, 6).unwrap();
        assert!(stabilized);
        assert!(chain.len() <= 6);
        assert_eq!(chain.last().unwrap().len(), 5);
        for w in chain.windows(2) {
            assert!(w[0].is_subset(&w[1]));
        }
    }
}
