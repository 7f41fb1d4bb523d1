//! Ordinals below w^w in Cantor normal form, finite well-orders and
//! their order types, Hartogs and Lindenbaum numbers of finite sets by
//! brute force, and the iterated-powerset stages.
//!
//! Ordinals live in two representations: finite ones double as von
//! Neumann numerals in the kernel, while the symbolic form here reaches
//! up to (but not including) w^w. Completeness and limit notions are
//! vacuous or false on the finite side alone, which is why the symbolic
//! side exists.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::encodings::to_nat;
use crate::hfset::{HfError, HfSet, Store};

/// Errors from ordinal arithmetic, well-order validation, and stages.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum OrdError {
    #[error("ordinal syntax error: {msg}")]
    Parse { msg: String },
    #[error("not a well-order ({axis}): {detail}")]
    WellOrder { axis: &'static str, detail: String },
    #[error("stage {0} exceeds the desk-scale bound of {MAX_STAGE}")]
    StageTooDeep(u32),
    #[error("regularity of {0} is refused at desk scale: only w is certified")]
    RegularityRefused(String),
    #[error("carrier of {got} elements exceeds the brute-force bound of {limit}")]
    TooLarge { got: usize, limit: usize },
    #[error(transparent)]
    Hf(#[from] HfError),
}

/// Largest iterated-powerset stage the kernel will materialize.
pub const MAX_STAGE: u32 = 5;

/// Largest carrier the brute-force searches accept.
pub const BRUTE_LIMIT: usize = 9;

/// An ordinal below w^w: the strictly descending sum of terms w^e * c
/// with positive coefficients. The empty sum is 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrdCNF {
    terms: Vec<(u32, u64)>,
}

impl OrdCNF {
    pub fn zero() -> OrdCNF {
        OrdCNF { terms: Vec::new() }
    }

    pub fn from_nat(n: u64) -> OrdCNF {
        if n == 0 {
            OrdCNF::zero()
        } else {
            OrdCNF { terms: vec![(0, n)] }
        }
    }

    pub fn omega() -> OrdCNF {
        OrdCNF { terms: vec![(1, 1)] }
    }

    /// Build from explicit terms, validating the normal form.
    pub fn from_terms(terms: Vec<(u32, u64)>) -> Result<OrdCNF, OrdError> {
        for window in terms.windows(2) {
            if window[0].0 <= window[1].0 {
                return Err(OrdError::Parse {
                    msg: "exponents must be strictly decreasing".into(),
                });
            }
        }
        if terms.iter().any(|&(_, c)| c == 0) {
            return Err(OrdError::Parse {
                msg: "coefficients must be positive".into(),
            });
        }
        Ok(OrdCNF { terms })
    }

    pub fn terms(&self) -> &[(u32, u64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The natural this ordinal denotes, when finite.
    pub fn to_nat(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [(0, c)] => Some(*c),
            _ => None,
        }
    }

    pub fn succ(&self) -> OrdCNF {
        let mut terms = self.terms.clone();
        match terms.last_mut() {
            Some((0, c)) => *c += 1,
            _ => terms.push((0, 1)),
        }
        OrdCNF { terms }
    }

    /// Limits are the nonzero ordinals closed under successor from
    /// below; in normal form that means no trailing finite part.
    pub fn is_limit(&self) -> bool {
        matches!(self.terms.last(), Some(&(e, _)) if e >= 1)
    }

    pub fn is_successor(&self) -> bool {
        !self.is_zero() && !self.is_limit()
    }
}

impl Ord for OrdCNF {
    fn cmp(&self, other: &OrdCNF) -> Ordering {
        for (a, b) in self.terms.iter().zip(other.terms.iter()) {
            match a.0.cmp(&b.0).then(a.1.cmp(&b.1)) {
                Ordering::Equal => continue,
                non_eq => return non_eq,
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl PartialOrd for OrdCNF {
    fn partial_cmp(&self, other: &OrdCNF) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for OrdCNF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let rendered: Vec<String> = self
            .terms
            .iter()
            .map(|&(e, c)| match e {
                0 => c.to_string(),
                1 => format!("w*{c}"),
                _ => format!("w^{e}*{c}"),
            })
            .collect();
        write!(f, "{}", rendered.join("+"))
    }
}

impl FromStr for OrdCNF {
    type Err = OrdError;

    /// Strict parser for the display form, e.g. "w^2*3+w*1+4" or "0".
    fn from_str(s: &str) -> Result<OrdCNF, OrdError> {
        let s = s.trim();
        if s == "0" {
            return Ok(OrdCNF::zero());
        }
        let mut terms = Vec::new();
        for part in s.split('+') {
            let part = part.trim();
            if let Some(rest) = part.strip_prefix('w') {
                let (exponent, coeff_part) = if let Some(r) = rest.strip_prefix('^') {
                    let star = r.find('*').ok_or_else(|| OrdError::Parse {
                        msg: format!("term '{part}' is missing '*coefficient'"),
                    })?;
                    let e: u32 = r[..star].parse().map_err(|_| OrdError::Parse {
                        msg: format!("bad exponent in '{part}'"),
                    })?;
                    if e < 2 {
                        return Err(OrdError::Parse {
                            msg: format!("exponent in '{part}' must be at least 2; write w*c or c"),
                        });
                    }
                    (e, &r[star + 1..])
                } else if let Some(r) = rest.strip_prefix('*') {
                    (1, r)
                } else {
                    return Err(OrdError::Parse {
                        msg: format!("term '{part}' must be w*c or w^e*c"),
                    });
                };
                let c: u64 = coeff_part.trim().parse().map_err(|_| OrdError::Parse {
                    msg: format!("bad coefficient in '{part}'"),
                })?;
                terms.push((exponent, c));
            } else {
                let c: u64 = part.parse().map_err(|_| OrdError::Parse {
                    msg: format!("term '{part}' is neither a natural nor w^e*c"),
                })?;
                terms.push((0, c));
            }
        }
        OrdCNF::from_terms(terms)
    }
}

/// Supremum of finitely many ordinals: their maximum (0 for none).
pub fn sup(xs: &[OrdCNF]) -> OrdCNF {
    xs.iter().max().cloned().unwrap_or_else(OrdCNF::zero)
}

/// Strict supremum: the least ordinal strictly above all of `xs`, i.e.
/// the supremum of their successors.
pub fn ssup(xs: &[OrdCNF]) -> OrdCNF {
    xs.iter().max().map(OrdCNF::succ).unwrap_or_else(OrdCNF::zero)
}

/// The tuple shape quantified over in completeness questions: a concrete
/// finite index set, or the symbolic first infinite ordinal.
#[derive(Debug, Clone)]
pub enum KArg {
    Finite(HfSet),
    Omega,
}

/// Whether every K-tuple of ordinals below `a` has supremum below `a`.
///
/// For finite K the supremum of a tuple is its maximum (or 0 for the
/// empty tuple), so the condition holds exactly when `a > 0`, whatever
/// the finite K. For the symbolic omega, every limit below w^w has an
/// increasing omega-sequence reaching it, so only 0 (vacuously) and
/// successors qualify.
pub fn is_k_complete(a: &OrdCNF, k: &KArg) -> bool {
    match k {
        KArg::Finite(_) => !a.is_zero(),
        KArg::Omega => a.is_zero() || !a.is_limit(),
    }
}

/// Certify `a` as a regular limit: every family of fewer than `a`
/// ordinals below `a` has supremum below `a`. Finite sups are maxima,
/// so w qualifies; nothing larger can be certified from the finite
/// evidence this kernel can produce, and non-limits fail outright.
pub fn certify_regular(a: &OrdCNF) -> Result<bool, OrdError> {
    if *a == OrdCNF::omega() {
        return Ok(true);
    }
    if !a.is_limit() {
        return Ok(false);
    }
    Err(OrdError::RegularityRefused(a.to_string()))
}

/// A finite relational structure claimed to be a well-order.
#[derive(Debug, Clone)]
pub struct WellOrder {
    pub carrier: HfSet,
    pub rel: BTreeSet<(HfSet, HfSet)>,
}

/// Validate the three well-order axioms and compute the order type with
/// the unique order isomorphism onto it (values are von Neumann
/// numerals). Reports which axiom fails.
pub fn order_type(w: &WellOrder) -> Result<(OrdCNF, BTreeMap<HfSet, HfSet>), OrdError> {
    let elems = w.carrier.elements();
    let store = w.carrier.store().clone();
    for (a, b) in &w.rel {
        if !w.carrier.contains(a) || !w.carrier.contains(b) {
            return Err(OrdError::WellOrder {
                axis: "carrier",
                detail: format!("pair ({a}, {b}) mentions elements outside the carrier"),
            });
        }
    }
    // Well-foundedness: on a finite carrier this is acyclicity of the
    // strict relation (a cycle is a nonempty subset with no minimal
    // element; irreflexive pairs are one-cycles).
    let preds = |x: &HfSet| -> BTreeSet<HfSet> {
        w.rel
            .iter()
            .filter(|(_, b)| b == x)
            .map(|(a, _)| a.clone())
            .collect()
    };
    let mut remaining: BTreeSet<HfSet> = elems.iter().cloned().collect();
    while !remaining.is_empty() {
        let minimal = remaining
            .iter()
            .find(|x| preds(x).intersection(&remaining).next().is_none())
            .cloned();
        match minimal {
            Some(x) => {
                remaining.remove(&x);
            }
            None => {
                return Err(OrdError::WellOrder {
                    axis: "well-foundedness",
                    detail: "the relation has a cycle".into(),
                })
            }
        }
    }
    for (a, b) in &w.rel {
        for (b2, c) in &w.rel {
            if b == b2 && !w.rel.contains(&(a.clone(), c.clone())) {
                return Err(OrdError::WellOrder {
                    axis: "transitivity",
                    detail: format!("({a}, {b}) and ({b}, {c}) but not ({a}, {c})"),
                });
            }
        }
    }
    for a in &elems {
        for b in &elems {
            if a != b && preds(a) == preds(b) {
                return Err(OrdError::WellOrder {
                    axis: "extensionality",
                    detail: format!("{a} and {b} have the same strict predecessors"),
                });
            }
        }
    }
    // A finite well-founded transitive extensional relation is linear;
    // the isomorphism sends each element to its predecessor count.
    let mut iso = BTreeMap::new();
    for a in &elems {
        let position = preds(a).len() as u64;
        iso.insert(a.clone(), store.numeral(position)?);
    }
    Ok((OrdCNF::from_nat(elems.len() as u64), iso))
}

/// The Hartogs number of a finite set, computed literally: collect the
/// order types of all well-orderable subsets (every subset of size m
/// carries exactly the type m) and return the least ordinal above an
/// initial segment of types.
pub fn hartogs(k: &HfSet) -> Result<OrdCNF, OrdError> {
    let n = k.len();
    if n > BRUTE_LIMIT {
        return Err(OrdError::TooLarge {
            got: n,
            limit: BRUTE_LIMIT,
        });
    }
    let mut types: BTreeSet<u64> = BTreeSet::new();
    for mask in 0u64..(1 << n) {
        types.insert(mask.count_ones() as u64);
    }
    debug_assert!(types.iter().copied().eq(0..=n as u64));
    Ok(OrdCNF::from_nat(n as u64 + 1))
}

/// The Lindenbaum number of a finite set, computed literally: collect
/// the order types of all well-ordered partial partitions (families of
/// disjoint inhabited subsets; the type of one with m blocks is m).
pub fn lindenbaum(k: &HfSet) -> Result<OrdCNF, OrdError> {
    let elems = k.elements();
    let n = elems.len();
    if n > BRUTE_LIMIT {
        return Err(OrdError::TooLarge {
            got: n,
            limit: BRUTE_LIMIT,
        });
    }
    let mut types: BTreeSet<u64> = BTreeSet::new();
    // Enumerate partial partitions by deciding, left to right, which
    // block (or none) each element joins; blocks are identified by the
    // smallest element they could have started at.
    fn walk(ix: usize, n: usize, blocks: &mut Vec<Vec<usize>>, types: &mut BTreeSet<u64>) {
        if ix == n {
            types.insert(blocks.len() as u64);
            return;
        }
        walk(ix + 1, n, blocks, types);
        for b in 0..blocks.len() {
            blocks[b].push(ix);
            walk(ix + 1, n, blocks, types);
            blocks[b].pop();
        }
        blocks.push(vec![ix]);
        walk(ix + 1, n, blocks, types);
        blocks.pop();
    }
    walk(0, n, &mut Vec::new(), &mut types);
    let max = types.iter().copied().max().unwrap_or(0);
    debug_assert!(types.iter().copied().eq(0..=max));
    Ok(OrdCNF::from_nat(max + 1))
}

/// Whether an injection from `a` into `b` exists (backtracking search).
pub fn preceq(a: &HfSet, b: &HfSet) -> Result<bool, OrdError> {
    let xs = a.elements();
    let ys = b.elements();
    if xs.len().max(ys.len()) > BRUTE_LIMIT {
        return Err(OrdError::TooLarge {
            got: xs.len().max(ys.len()),
            limit: BRUTE_LIMIT,
        });
    }
    fn assign(remaining: usize, used: &mut [bool]) -> bool {
        if remaining == 0 {
            return true;
        }
        for j in 0..used.len() {
            if !used[j] {
                used[j] = true;
                if assign(remaining - 1, used) {
                    used[j] = false;
                    return true;
                }
                used[j] = false;
            }
        }
        false
    }
    Ok(assign(xs.len(), &mut vec![false; ys.len()]))
}

/// Whether a partial surjection from `b` onto `a` exists: dynamic
/// programming over the subset of `a` already covered while scanning the
/// elements of `b` one at a time.
pub fn preceq_star(a: &HfSet, b: &HfSet) -> Result<bool, OrdError> {
    let xs = a.elements();
    let ny = b.len();
    if xs.len() > BRUTE_LIMIT || ny > BRUTE_LIMIT {
        return Err(OrdError::TooLarge {
            got: xs.len().max(ny),
            limit: BRUTE_LIMIT,
        });
    }
    let full: u32 = if xs.is_empty() { 0 } else { (1 << xs.len()) - 1 };
    let mut reachable: BTreeSet<u32> = BTreeSet::new();
    reachable.insert(0);
    for _ in 0..ny {
        let mut next = reachable.clone();
        for mask in &reachable {
            for bit in 0..xs.len() {
                next.insert(mask | (1 << bit));
            }
        }
        reachable = next;
    }
    Ok(reachable.contains(&full))
}

/// The cumulative stage V_n: the n-fold powerset of the empty set.
/// Refuses stages above [`MAX_STAGE`]; V_5 already has 65536 elements.
pub fn v_stage(store: &Store, n: u32) -> Result<HfSet, OrdError> {
    if n > MAX_STAGE {
        return Err(OrdError::StageTooDeep(n));
    }
    let mut stage = store.empty();
    for _ in 0..n {
        stage = stage.powerset()?;
    }
    Ok(stage)
}

/// The symbolic ordinal of a von Neumann numeral, if it is one.
pub fn ord_of_numeral(x: &HfSet) -> Option<OrdCNF> {
    to_nat(x).map(OrdCNF::from_nat)
}

/// The von Neumann numeral of a finite symbolic ordinal.
pub fn numeral_of_ord(store: &Store, a: &OrdCNF) -> Result<Option<HfSet>, OrdError> {
    match a.to_nat() {
        Some(n) => Ok(Some(store.numeral(n)?)),
        None => Ok(None),
    }
}
