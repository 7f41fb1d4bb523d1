//! Brute-force reference implementations, deliberately naive and slow.
//!
//! These functions back the test suites as an independent vote: they share
//! no generation code with the engines they check. Closures here rescan
//! every rule over every assignment from scratch each round (no worklist,
//! no delta tracking), membership is decided by a structural key table the
//! oracle builds itself rather than by the kernel's interner identity, and
//! search is literal backtracking. Caps are hard errors, never silent: an
//! oracle that cannot decide must not vote.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use thiserror::Error;

use crate::encodings::{func, tuple};
use crate::genengine::{BroadRubric, GenError, ResultFamily, Rubric};
use crate::hfset::{HfError, HfSet, Store};

/// Extensional identity, derived from scratch: every distinct structure
/// gets a label, computed bottom-up from the sorted, deduplicated labels
/// of its elements. Node ids are used only as memo handles (one id names
/// one stored node); equality never consults them, so agreement between
/// oracle and engine genuinely cross-checks the kernel's interning.
#[derive(Default)]
struct StructKeys {
    by_node: HashMap<u32, u64>,
    by_shape: HashMap<Box<[u64]>, u64>,
}

impl StructKeys {
    fn key(&mut self, x: &HfSet) -> u64 {
        if let Some(&k) = self.by_node.get(&x.raw_id()) {
            return k;
        }
        let mut shape: Vec<u64> = x.elements().iter().map(|e| self.key(e)).collect();
        shape.sort_unstable();
        shape.dedup();
        let next = self.by_shape.len() as u64;
        let k = *self.by_shape.entry(shape.into_boxed_slice()).or_insert(next);
        self.by_node.insert(x.raw_id(), k);
        k
    }
}

/// Largest argument accepted by the injection and surjection searches.
pub const BRUTE_CAP: usize = 9;

/// Largest set accepted by the minimality checks.
pub const MINIMALITY_CAP: usize = 12;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("closure exceeded the cap of {cap} elements")]
    CapExceeded { cap: usize },
    #[error("argument of size {got} exceeds the oracle cap {limit}")]
    SizeCap { limit: usize, got: usize },
    #[error("check is not applicable: {detail}")]
    NotApplicable { detail: &'static str },
    #[error(transparent)]
    Engine(#[from] GenError),
    #[error(transparent)]
    Hf(#[from] HfError),
}

/// Every `(index, value)` pair one rubric contributes over a pool, with
/// the rubric's class filter applied. Families without a finite
/// materialization are an engine error here as everywhere.
fn rubric_yield(r: &Rubric, pool: &[HfSet]) -> Result<Vec<(HfSet, HfSet)>, OracleError> {
    let mut out = Vec::new();
    for rule in r.rules.values() {
        let positions = rule.arity.elements();
        let mut counters = vec![0usize; positions.len()];
        loop {
            if !positions.is_empty() && pool.is_empty() {
                break;
            }
            let mut assignment = BTreeMap::new();
            for (pos, c) in positions.iter().zip(&counters) {
                assignment.insert(pos.clone(), pool[*c].clone());
            }
            let family = (rule.apply)(&assignment)?;
            let pairs = match family {
                ResultFamily::Explicit(map) => map.into_iter().collect(),
                ResultFamily::Indexed(fam) => {
                    let enumerate = fam.enumerate.as_ref().ok_or(GenError::NonFinitary)?;
                    enumerate()?
                }
            };
            for (p, v) in pairs {
                if r.class.as_ref().map_or(true, |pred| pred(&v)) {
                    out.push((p, v));
                }
            }
            // Odometer over the assignment space.
            let mut carry = true;
            for c in counters.iter_mut() {
                *c += 1;
                if *c < pool.len() {
                    carry = false;
                    break;
                }
                *c = 0;
            }
            if carry {
                break;
            }
        }
    }
    Ok(out)
}

fn close(
    step: impl Fn(&[HfSet]) -> Result<Vec<HfSet>, OracleError>,
    cap: usize,
) -> Result<BTreeSet<HfSet>, OracleError> {
    let mut keys = StructKeys::default();
    let mut seen: BTreeMap<u64, HfSet> = BTreeMap::new();
    loop {
        let pool: Vec<HfSet> = seen.values().cloned().collect();
        let produced = step(&pool)?;
        let before = seen.len();
        for v in produced {
            let k = keys.key(&v);
            seen.entry(k).or_insert(v);
        }
        if seen.len() > cap {
            return Err(OracleError::CapExceeded { cap });
        }
        if seen.len() == before {
            return Ok(seen.into_values().collect());
        }
    }
}

/// Closure of a rubric by repeated full rescan, up to `cap` elements.
pub fn naive_generate(r: &Rubric, cap: usize) -> Result<BTreeSet<HfSet>, OracleError> {
    close(
        |pool| Ok(rubric_yield(r, pool)?.into_iter().map(|(_, v)| v).collect()),
        cap,
    )
}

/// Closure of a broad rubric: each round rescans the basic rubric plus the
/// trigger rubric of every element generated so far.
pub fn naive_generate_broad(b: &BroadRubric, cap: usize) -> Result<BTreeSet<HfSet>, OracleError> {
    close(
        |pool| {
            let mut out: Vec<HfSet> =
                rubric_yield(&b.basic, pool)?.into_iter().map(|(_, v)| v).collect();
            for x in pool {
                let triggered = b.trigger.rubric_for(x);
                out.extend(rubric_yield(&triggered, pool)?.into_iter().map(|(_, v)| v));
            }
            Ok(out)
        },
        cap,
    )
}

/// Whether every value the rubric produces from `pool` keys into `members`.
fn is_closed(
    keys: &mut StructKeys,
    r: &Rubric,
    pool: &[HfSet],
    members: &HashSet<u64>,
) -> Result<bool, OracleError> {
    for (_, v) in rubric_yield(r, pool)? {
        if !members.contains(&keys.key(&v)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether `x` is a minimal inductive set for `r`: `x` is closed under
/// every rule and no proper subset is. Exhaustive over the `2^|x|` subsets,
/// pruning those that miss a nullary-rule output (no inductive set can).
pub fn minimality_check(r: &Rubric, x: &BTreeSet<HfSet>) -> Result<bool, OracleError> {
    if x.len() > MINIMALITY_CAP {
        return Err(OracleError::SizeCap {
            limit: MINIMALITY_CAP,
            got: x.len(),
        });
    }
    if x.is_empty() {
        return Err(OracleError::NotApplicable {
            detail: "minimality of the empty set is vacuous",
        });
    }
    let mut keys = StructKeys::default();
    let elems: Vec<HfSet> = x.iter().cloned().collect();
    let elem_keys: Vec<u64> = elems.iter().map(|e| keys.key(e)).collect();
    let full: HashSet<u64> = elem_keys.iter().copied().collect();
    if !is_closed(&mut keys, r, &elems, &full)? {
        return Ok(false);
    }
    // Any inductive set contains every nullary-rule output; subsets
    // missing one need no closure scan.
    let seeds: HashSet<u64> = rubric_yield(r, &[])?
        .into_iter()
        .map(|(_, v)| keys.key(&v))
        .collect();
    let seed_mask: u32 = elem_keys
        .iter()
        .enumerate()
        .filter(|(_, k)| seeds.contains(*k))
        .map(|(i, _)| 1u32 << i)
        .sum();
    if seeds.iter().any(|k| !full.contains(k)) {
        // A seed falls outside x, so no subset of x is inductive; x itself
        // being closed was already contradicted above, but guard anyway.
        return Ok(true);
    }
    let n = elems.len();
    for mask in 0..(1u32 << n) - 1 {
        if mask & seed_mask != seed_mask {
            continue;
        }
        let pool: Vec<HfSet> = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| elems[i].clone())
            .collect();
        let members: HashSet<u64> = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| elem_keys[i])
            .collect();
        if is_closed(&mut keys, r, &pool, &members)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether every key the rubric derives from keys in `present` (with child
/// values read off `entries`) keys into `members`.
fn keys_closed(
    keys: &mut StructKeys,
    store: &Store,
    r: &Rubric,
    entries: &BTreeMap<HfSet, HfSet>,
    present: &[HfSet],
    members: &HashSet<u64>,
) -> Result<bool, OracleError> {
    for (i, rule) in &r.rules {
        let positions = rule.arity.elements();
        let mut counters = vec![0usize; positions.len()];
        loop {
            if !positions.is_empty() && present.is_empty() {
                break;
            }
            let mut child_keys = BTreeMap::new();
            let mut child_values = BTreeMap::new();
            for (pos, c) in positions.iter().zip(&counters) {
                let key = present[*c].clone();
                child_values.insert(pos.clone(), entries[&key].clone());
                child_keys.insert(pos.clone(), key);
            }
            let family = (rule.apply)(&child_values)?;
            let pairs = match family {
                ResultFamily::Explicit(map) => map.into_iter().collect(),
                ResultFamily::Indexed(fam) => {
                    let enumerate = fam.enumerate.as_ref().ok_or(GenError::NonFinitary)?;
                    enumerate()?
                }
            };
            let g = func(store, &child_keys)?;
            for (p, v) in pairs {
                if r.class.as_ref().map_or(true, |pred| pred(&v)) {
                    let key = tuple(store, &[i.clone(), g.clone(), p])?;
                    if !members.contains(&keys.key(&key)) {
                        return Ok(false);
                    }
                }
            }
            let mut carry = true;
            for c in counters.iter_mut() {
                *c += 1;
                if *c < present.len() {
                    carry = false;
                    break;
                }
                *c = 0;
            }
            if carry {
                break;
            }
        }
    }
    Ok(true)
}

/// Whether deleting any one entry from a generated family leaves a key set
/// that is no longer closed under derivation: the deleted key stays
/// derivable from its still-present children, so every deletion must break
/// closure. Meaningful on stabilized families; bounded at 12 entries.
pub fn family_minimality_check(
    store: &Store,
    r: &Rubric,
    entries: &BTreeMap<HfSet, HfSet>,
) -> Result<bool, OracleError> {
    if entries.len() > MINIMALITY_CAP {
        return Err(OracleError::SizeCap {
            limit: MINIMALITY_CAP,
            got: entries.len(),
        });
    }
    if entries.is_empty() {
        return Err(OracleError::NotApplicable {
            detail: "minimality of the empty family is vacuous",
        });
    }
    let mut keys = StructKeys::default();
    let family_keys: Vec<HfSet> = entries.keys().cloned().collect();
    for drop in 0..family_keys.len() {
        let present: Vec<HfSet> = family_keys
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != drop)
            .map(|(_, k)| k.clone())
            .collect();
        let members: HashSet<u64> = present.iter().map(|k| keys.key(k)).collect();
        if keys_closed(&mut keys, store, r, entries, &present, &members)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn cap_pair(a: &HfSet, b: &HfSet) -> Result<(Vec<HfSet>, Vec<HfSet>), OracleError> {
    for s in [a, b] {
        if s.len() > BRUTE_CAP {
            return Err(OracleError::SizeCap {
                limit: BRUTE_CAP,
                got: s.len(),
            });
        }
    }
    Ok((a.elements(), b.elements()))
}

/// An injection from `a` into `b` found by exhaustive backtracking, or
/// `None` when no assignment of distinct images exists.
pub fn brute_injection(
    a: &HfSet,
    b: &HfSet,
) -> Result<Option<BTreeMap<HfSet, HfSet>>, OracleError> {
    let (xs, ys) = cap_pair(a, b)?;
    fn go(
        xs: &[HfSet],
        ys: &[HfSet],
        i: usize,
        used: &mut Vec<bool>,
        acc: &mut BTreeMap<HfSet, HfSet>,
    ) -> bool {
        if i == xs.len() {
            return true;
        }
        for j in 0..ys.len() {
            if used[j] {
                continue;
            }
            used[j] = true;
            acc.insert(xs[i].clone(), ys[j].clone());
            if go(xs, ys, i + 1, used, acc) {
                return true;
            }
            acc.remove(&xs[i]);
            used[j] = false;
        }
        false
    }
    let mut used = vec![false; ys.len()];
    let mut acc = BTreeMap::new();
    Ok(go(&xs, &ys, 0, &mut used, &mut acc).then_some(acc))
}

/// A partial function on `a` whose image is exactly `b`, found by picking
/// a distinct preimage in `a` for each element of `b` by exhaustive
/// backtracking, or `None` when none exists.
pub fn brute_partial_surjection(
    a: &HfSet,
    b: &HfSet,
) -> Result<Option<BTreeMap<HfSet, HfSet>>, OracleError> {
    let (xs, ys) = cap_pair(a, b)?;
    fn go(
        xs: &[HfSet],
        ys: &[HfSet],
        j: usize,
        used: &mut Vec<bool>,
        acc: &mut BTreeMap<HfSet, HfSet>,
    ) -> bool {
        if j == ys.len() {
            return true;
        }
        for i in 0..xs.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            acc.insert(xs[i].clone(), ys[j].clone());
            if go(xs, ys, j + 1, used, acc) {
                return true;
            }
            acc.remove(&xs[i]);
            used[i] = false;
        }
        false
    }
    let mut used = vec![false; xs.len()];
    let mut acc = BTreeMap::new();
    Ok(go(&xs, &ys, 0, &mut used, &mut acc).then_some(acc))
}
