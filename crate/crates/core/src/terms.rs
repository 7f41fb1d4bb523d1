//! Signatures and the well-founded terms over them.
//!
//! A signature assigns each symbol `i` an arity set `K_i`. A term is
//! `<i, [a_k]_{k in K_i}>`: the pair of a symbol and a function graph
//! sending each position to a subterm. Terms are generated level by level;
//! level `d` holds every term of height at most `d` (a term with no
//! children has height 1).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::budget::Budget;
use crate::encodings::{func, pair, to_nat, unfunc, unpair};
use crate::hfset::{HfError, HfSet, Store};

/// A family of arity sets, keyed by symbol.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Signature {
    arities: BTreeMap<HfSet, HfSet>,
}

impl Signature {
    pub fn new(arities: BTreeMap<HfSet, HfSet>) -> Signature {
        Signature { arities }
    }

    /// Convenience: symbols and arities given as naturals, with arity `n`
    /// meaning the position set `{0, ..., n-1}`.
    pub fn from_nat_arities(store: &Store, arities: &[(u64, u64)]) -> Result<Signature, HfError> {
        let mut map = BTreeMap::new();
        for &(symbol, arity) in arities {
            map.insert(store.numeral(symbol)?, store.numeral(arity)?);
        }
        Ok(Signature::new(map))
    }

    pub fn arities(&self) -> &BTreeMap<HfSet, HfSet> {
        &self.arities
    }

    pub fn arity(&self, symbol: &HfSet) -> Option<&HfSet> {
        self.arities.get(symbol)
    }

    pub fn is_empty(&self) -> bool {
        self.arities.is_empty()
    }

    /// The signature as the function graph `{<i, K_i>}`.
    pub fn encode(&self, store: &Store) -> Result<HfSet, HfError> {
        func(store, &self.arities)
    }

    /// Decode a function graph back into a signature.
    pub fn decode(x: &HfSet) -> Option<Signature> {
        unfunc(x).map(Signature::new)
    }
}

/// Build the term `<symbol, [children]>`.
pub fn term(symbol: &HfSet, children: &BTreeMap<HfSet, HfSet>) -> Result<HfSet, HfError> {
    let graph = func(symbol.store(), children)?;
    pair(symbol, &graph)
}

/// Split a term into its symbol and child graph.
pub fn unterm(t: &HfSet) -> Option<(HfSet, BTreeMap<HfSet, HfSet>)> {
    let (symbol, graph) = unpair(t)?;
    Some((symbol, unfunc(&graph)?))
}

/// Whether `t` is a well-formed term of `sig` (symbol known, child graph
/// keyed exactly by the symbol's arity, children terms themselves).
pub fn is_term(sig: &Signature, t: &HfSet) -> bool {
    let Some((symbol, children)) = unterm(t) else {
        return false;
    };
    let Some(arity) = sig.arity(&symbol) else {
        return false;
    };
    if children.len() != arity.len() || !children.keys().all(|k| arity.contains(k)) {
        return false;
    }
    children.values().all(|c| is_term(sig, c))
}

/// Terms generated level by level.
#[derive(Debug, Clone)]
pub struct TermLevels {
    /// `levels[d]` holds every term of height at most `d + 1`, sorted.
    levels: Vec<Vec<HfSet>>,
    /// True when some level repeated the previous one, i.e. the signature
    /// generates nothing new past that height.
    pub stabilized: bool,
    /// False when the element or fuel cap truncated the last level.
    pub complete: bool,
}

impl TermLevels {
    /// Terms of height at most `height` (1-based).
    pub fn up_to_height(&self, height: usize) -> &[HfSet] {
        assert!(height >= 1 && height <= self.levels.len());
        &self.levels[height - 1]
    }

    /// Terms of the deepest generated level.
    pub fn all(&self) -> &[HfSet] {
        self.levels.last().map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn height_reached(&self) -> usize {
        self.levels.len()
    }
}

/// Generate every term of `sig` with height at most `budget.depth`.
///
/// Each level enumerates `<i, g>` for every symbol `i` and every function
/// `g` from its arity to the previous level, so the levels are cumulative
/// by construction.
pub fn generate_terms(
    sig: &Signature,
    budget: &Budget,
) -> Result<TermLevels, HfError> {
    let mut levels: Vec<Vec<HfSet>> = Vec::new();
    let mut prev: Vec<HfSet> = Vec::new();
    let mut fuel = budget.fuel;
    let mut stabilized = false;
    let mut complete = true;

    'levels: for _ in 0..budget.depth {
        let mut current: BTreeSet<HfSet> = BTreeSet::new();
        for (symbol, arity) in sig.arities() {
            let positions = arity.elements();
            if positions.is_empty() {
                if fuel == 0 {
                    complete = false;
                    break 'levels;
                }
                fuel -= 1;
                current.insert(term(symbol, &BTreeMap::new())?);
                continue;
            }
            if prev.is_empty() {
                continue;
            }
            // Odometer over all |prev|^|positions| child assignments.
            let mut picks = vec![0usize; positions.len()];
            loop {
                if fuel == 0 || current.len() >= budget.max_elements {
                    complete = false;
                    break 'levels;
                }
                fuel -= 1;
                let children: BTreeMap<HfSet, HfSet> = positions
                    .iter()
                    .cloned()
                    .zip(picks.iter().map(|&ix| prev[ix].clone()))
                    .collect();
                current.insert(term(symbol, &children)?);
                let mut place = 0;
                loop {
                    if place == picks.len() {
                        break;
                    }
                    picks[place] += 1;
                    if picks[place] < prev.len() {
                        break;
                    }
                    picks[place] = 0;
                    place += 1;
                }
                if place == picks.len() {
                    break;
                }
            }
        }
        let current: Vec<HfSet> = current.into_iter().collect();
        if current == prev {
            stabilized = true;
            levels.push(current);
            break;
        }
        prev = current.clone();
        levels.push(current);
    }

    Ok(TermLevels {
        levels,
        stabilized,
        complete,
    })
}

/// The branch map of a term: every downward position path, mapped to the
/// symbol at its end. The empty path maps to the root symbol.
pub fn branches(t: &HfSet) -> Option<BTreeMap<Vec<HfSet>, HfSet>> {
    let mut out = BTreeMap::new();
    let mut prefix = Vec::new();
    collect_branches(t, &mut prefix, &mut out)?;
    Some(out)
}

fn collect_branches(
    t: &HfSet,
    prefix: &mut Vec<HfSet>,
    out: &mut BTreeMap<Vec<HfSet>, HfSet>,
) -> Option<()> {
    let (symbol, children) = unterm(t)?;
    out.insert(prefix.clone(), symbol);
    for (k, child) in children {
        prefix.push(k);
        collect_branches(&child, prefix, out)?;
        prefix.pop();
    }
    Some(())
}

/// The symbol reached by following `path` from the root of `t`.
pub fn result(t: &HfSet, path: &[HfSet]) -> Option<HfSet> {
    let (symbol, children) = unterm(t)?;
    match path.split_first() {
        None => Some(symbol),
        Some((k, rest)) => result(children.get(k)?, rest),
    }
}

/// Whether every branch that `s` and `t` share has the same result in
/// both. For well-formed terms of one signature this forces `s == t`.
pub fn branch_agreement(s: &HfSet, t: &HfSet) -> Option<bool> {
    let bs = branches(s)?;
    let bt = branches(t)?;
    Some(
        bs.iter()
            .all(|(path, sym)| bt.get(path).map_or(true, |other| other == sym)),
    )
}

/// Human-readable rendering `i(k -> child, ...)`, with numerals decoded.
pub fn readable(t: &HfSet) -> String {
    let mut out = String::new();
    write_readable(t, &mut out);
    out
}

fn write_readable(t: &HfSet, out: &mut String) {
    let Some((symbol, children)) = unterm(t) else {
        out.push_str(&t.render(512));
        return;
    };
    write_atom(&symbol, out);
    out.push('(');
    for (i, (k, child)) in children.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_atom(k, out);
        out.push_str(" -> ");
        write_readable(child, out);
    }
    out.push(')');
}

fn write_atom(x: &HfSet, out: &mut String) {
    match to_nat(x) {
        Some(n) => {
            let _ = write!(out, "{n}");
        }
        None => out.push_str(&x.render(256)),
    }
}
