//! Canonical hereditarily finite sets with hash-consing.
//!
//! A [`Store`] interns every set it ever builds, so within one store
//! extensional equality coincides with id equality and every set exists
//! exactly once. Element sequences are kept in canonical order (rank-major,
//! then lexicographic on the canonically ordered element sequences), which
//! makes serialization canonical as well: two sets are equal iff their
//! serializations are byte-identical, even across stores.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, RwLock, RwLockReadGuard};

use thiserror::Error;

/// Index of an interned node within its store.
pub(crate) type SetId = u32;

/// Errors from kernel operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HfError {
    /// The store refused to intern another node.
    #[error("node budget exceeded: store limit is {limit} interned nodes")]
    NodeBudget { limit: usize },
    /// Set syntax error, with a byte offset into the input.
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// One interned set.
struct Node {
    /// Element ids in strictly increasing canonical order.
    elems: Box<[SetId]>,
    /// `0` for the empty set, else one more than the largest element rank.
    rank: u32,
    /// Structural hash, identical across stores for equal sets.
    fingerprint: u64,
}

struct StoreInner {
    nodes: Vec<Node>,
    intern: HashMap<Box<[SetId]>, SetId>,
}

struct StoreImpl {
    inner: RwLock<StoreInner>,
    max_nodes: usize,
    /// Ids of the von Neumann numerals built so far, in order.
    numerals: Mutex<Vec<SetId>>,
}

/// A hash-consing store of hereditarily finite sets.
///
/// Cloning a `Store` clones a handle to the same store. All algebraic
/// operations require their operands to live in one store and panic
/// otherwise; comparison, hashing, and serialization work across stores.
///
/// # Invariants
///
/// - Node 0 is the empty set.
/// - Every node's element list is strictly increasing in canonical order,
///   so interning is extensional: equal sets get equal ids.
/// - Nodes are append-only; ids stay valid for the life of the store.
#[derive(Clone)]
pub struct Store(Arc<StoreImpl>);

/// Default cap on interned nodes per store.
const DEFAULT_MAX_NODES: usize = 4_000_000;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv_mix(mut hash: u64, word: u64) -> u64 {
    for byte in word.to_le_bytes() {
        hash ^= u64::from(byte);
        hash = hash.wrapping_mul(FNV_PRIME);
    }
    hash
}

impl StoreInner {
    fn node(&self, id: SetId) -> &Node {
        &self.nodes[id as usize]
    }

    /// Canonical order: rank-major, then lexicographic on element sequences.
    fn compare(&self, a: SetId, b: SetId) -> Ordering {
        if a == b {
            return Ordering::Equal;
        }
        let (na, nb) = (self.node(a), self.node(b));
        na.rank.cmp(&nb.rank).then_with(|| {
            for (&x, &y) in na.elems.iter().zip(nb.elems.iter()) {
                match self.compare(x, y) {
                    Ordering::Equal => {}
                    other => return other,
                }
            }
            na.elems.len().cmp(&nb.elems.len())
        })
    }

    /// Intern an element list that is already strictly increasing.
    fn intern_sorted(&mut self, elems: Box<[SetId]>, max_nodes: usize) -> Result<SetId, HfError> {
        if let Some(&id) = self.intern.get(&elems) {
            return Ok(id);
        }
        if self.nodes.len() >= max_nodes {
            return Err(HfError::NodeBudget { limit: max_nodes });
        }
        let rank = elems
            .iter()
            .map(|&e| self.node(e).rank + 1)
            .max()
            .unwrap_or(0);
        let mut fp = fnv_mix(FNV_OFFSET, u64::from(rank));
        fp = fnv_mix(fp, elems.len() as u64);
        for &e in elems.iter() {
            fp = fnv_mix(fp, self.node(e).fingerprint);
        }
        let id = self.nodes.len() as SetId;
        self.nodes.push(Node {
            elems: elems.clone(),
            rank,
            fingerprint: fp,
        });
        self.intern.insert(elems, id);
        Ok(id)
    }

    /// Canonicalize (sort, dedup) and intern an arbitrary element list.
    fn intern_ids(&mut self, mut ids: Vec<SetId>, max_nodes: usize) -> Result<SetId, HfError> {
        let sorted = ids.windows(2).all(|w| self.compare(w[0], w[1]) == Ordering::Less);
        if !sorted {
            ids.sort_by(|&a, &b| self.compare(a, b));
            ids.dedup();
        }
        self.intern_sorted(ids.into_boxed_slice(), max_nodes)
    }
}

impl Store {
    /// Create a store with the default node budget.
    pub fn new() -> Store {
        Store::with_node_limit(DEFAULT_MAX_NODES)
    }

    /// Create a store that refuses to intern more than `max_nodes` sets.
    pub fn with_node_limit(max_nodes: usize) -> Store {
        assert!(max_nodes > 0, "store needs room for the empty set");
        let mut inner = StoreInner {
            nodes: Vec::new(),
            intern: HashMap::new(),
        };
        inner
            .intern_sorted(Box::new([]), max_nodes)
            .expect("interning the empty set cannot exceed the budget");
        Store(Arc::new(StoreImpl {
            inner: RwLock::new(inner),
            max_nodes,
            numerals: Mutex::new(vec![0]),
        }))
    }

    /// Number of sets interned so far.
    pub fn node_count(&self) -> usize {
        self.read().nodes.len()
    }

    /// The store's node budget.
    pub fn node_limit(&self) -> usize {
        self.0.max_nodes
    }

    /// The empty set.
    pub fn empty(&self) -> HfSet {
        HfSet {
            store: self.clone(),
            id: 0,
        }
    }

    /// The set whose elements are `elems` (duplicates collapse).
    pub fn set(&self, elems: &[HfSet]) -> Result<HfSet, HfError> {
        let ids = elems.iter().map(|e| self.claim(e)).collect();
        self.intern(ids)
    }

    /// The singleton `{x}`.
    pub fn singleton(&self, x: &HfSet) -> Result<HfSet, HfError> {
        self.set(std::slice::from_ref(x))
    }

    /// The unordered pair `{x, y}`.
    pub fn pair_set(&self, x: &HfSet, y: &HfSet) -> Result<HfSet, HfError> {
        self.set(&[x.clone(), y.clone()])
    }

    fn read(&self) -> RwLockReadGuard<'_, StoreInner> {
        self.0.inner.read().expect("store lock poisoned")
    }

    fn intern(&self, ids: Vec<SetId>) -> Result<HfSet, HfError> {
        let mut inner = self.0.inner.write().expect("store lock poisoned");
        let id = inner.intern_ids(ids, self.0.max_nodes)?;
        Ok(HfSet {
            store: self.clone(),
            id,
        })
    }

    fn same_store(&self, other: &Store) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    /// Panic unless `x` lives in this store; return its id.
    fn claim(&self, x: &HfSet) -> SetId {
        assert!(
            self.same_store(&x.store),
            "set algebra requires operands from one store; build the set here first"
        );
        x.id
    }

    /// The von Neumann numeral for `n`.
    pub fn numeral(&self, n: u64) -> Result<HfSet, HfError> {
        let mut cache = self.0.numerals.lock().expect("numeral cache poisoned");
        while (cache.len() as u64) <= n {
            let prefix: Vec<SetId> = cache.clone();
            let mut inner = self.0.inner.write().expect("store lock poisoned");
            // Numeral ids happen to be canonically sorted already: each
            // numeral has higher rank than all of its predecessors.
            let id = inner.intern_sorted(prefix.into_boxed_slice(), self.0.max_nodes)?;
            cache.push(id);
        }
        Ok(HfSet {
            store: self.clone(),
            id: cache[n as usize],
        })
    }

    /// Decode a von Neumann numeral; `None` if `x` is not one.
    pub fn to_nat(&self, x: &HfSet) -> Option<u64> {
        let id = self.claim(x);
        {
            let cache = self.0.numerals.lock().expect("numeral cache poisoned");
            if let Some(n) = cache.iter().position(|&c| c == id) {
                return Some(n as u64);
            }
            // A numeral's cardinality equals its rank; reject cheaply.
            let inner = self.read();
            let node = inner.node(id);
            if node.elems.len() as u64 != u64::from(node.rank)
                || (node.rank as usize) < cache.len()
            {
                return None;
            }
        }
        let n = u64::from(x.rank());
        match self.numeral(n) {
            Ok(num) if num.id == id => Some(n),
            _ => None,
        }
    }

    /// Parse the canonical `{a,b,...}` syntax (whitespace tolerated).
    pub fn parse(&self, input: &str) -> Result<HfSet, HfError> {
        let bytes = input.as_bytes();
        let mut pos = 0;
        let set = self.parse_set(bytes, &mut pos)?;
        skip_ws(bytes, &mut pos);
        if pos != bytes.len() {
            return Err(HfError::Parse {
                pos,
                msg: "trailing input after set".into(),
            });
        }
        Ok(set)
    }

    fn parse_set(&self, bytes: &[u8], pos: &mut usize) -> Result<HfSet, HfError> {
        skip_ws(bytes, pos);
        if bytes.get(*pos) != Some(&b'{') {
            return Err(HfError::Parse {
                pos: *pos,
                msg: "expected '{'".into(),
            });
        }
        *pos += 1;
        let mut elems = Vec::new();
        skip_ws(bytes, pos);
        if bytes.get(*pos) == Some(&b'}') {
            *pos += 1;
            return self.intern(elems.iter().map(|e: &HfSet| e.id).collect());
        }
        loop {
            elems.push(self.parse_set(bytes, pos)?);
            skip_ws(bytes, pos);
            match bytes.get(*pos) {
                Some(&b',') => {
                    *pos += 1;
                }
                Some(&b'}') => {
                    *pos += 1;
                    return self.intern(elems.iter().map(|e| e.id).collect());
                }
                _ => {
                    return Err(HfError::Parse {
                        pos: *pos,
                        msg: "expected ',' or '}'".into(),
                    })
                }
            }
        }
    }
}

impl Default for Store {
    fn default() -> Store {
        Store::new()
    }
}

fn skip_ws(bytes: &[u8], pos: &mut usize) {
    while bytes.get(*pos).is_some_and(|b| b.is_ascii_whitespace()) {
        *pos += 1;
    }
}

/// A handle to one interned hereditarily finite set.
///
/// Handles are cheap to clone. Equality, ordering, and hashing are
/// extensional and agree across stores; the ordering is the canonical one
/// (rank-major, then lexicographic on element sequences), so sorted output
/// is deterministic everywhere.
#[derive(Clone)]
pub struct HfSet {
    store: Store,
    id: SetId,
}

impl HfSet {
    /// The store this set lives in.
    pub fn store(&self) -> &Store {
        &self.store
    }

    pub(crate) fn raw_id(&self) -> u32 {
        self.id
    }

    /// `0` for the empty set, else one more than the largest element rank.
    pub fn rank(&self) -> u32 {
        self.store.read().node(self.id).rank
    }

    /// Number of elements.
    pub fn len(&self) -> usize {
        self.store.read().node(self.id).elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Elements in canonical order.
    pub fn elements(&self) -> Vec<HfSet> {
        let inner = self.store.read();
        inner
            .node(self.id)
            .elems
            .iter()
            .map(|&id| HfSet {
                store: self.store.clone(),
                id,
            })
            .collect()
    }

    /// Membership test by binary search in canonical order.
    pub fn contains(&self, x: &HfSet) -> bool {
        if self.store.same_store(&x.store) {
            let inner = self.store.read();
            inner
                .node(self.id)
                .elems
                .binary_search_by(|&e| inner.compare(e, x.id))
                .is_ok()
        } else {
            self.elements().iter().any(|e| e == x)
        }
    }

    /// Subset test.
    pub fn is_subset(&self, other: &HfSet) -> bool {
        self.elements().iter().all(|e| other.contains(e))
    }

    pub fn union(&self, other: &HfSet) -> Result<HfSet, HfError> {
        let mut ids = self.elem_ids();
        ids.extend(other.store_elem_ids(&self.store));
        self.store.intern(ids)
    }

    pub fn intersection(&self, other: &HfSet) -> Result<HfSet, HfError> {
        self.separate(|e| other.contains(e))
    }

    pub fn difference(&self, other: &HfSet) -> Result<HfSet, HfError> {
        self.separate(|e| !other.contains(e))
    }

    /// `self ∪ {x}`.
    pub fn insert(&self, x: &HfSet) -> Result<HfSet, HfError> {
        let mut ids = self.elem_ids();
        ids.push(self.store.claim(x));
        self.store.intern(ids)
    }

    /// Union set: the set of elements of elements.
    pub fn union_of(&self) -> Result<HfSet, HfError> {
        let inner = self.store.read();
        let mut ids = Vec::new();
        for &e in inner.node(self.id).elems.iter() {
            ids.extend_from_slice(&inner.node(e).elems);
        }
        drop(inner);
        self.store.intern(ids)
    }

    /// Separation: the subset of elements satisfying `keep`.
    pub fn separate(&self, mut keep: impl FnMut(&HfSet) -> bool) -> Result<HfSet, HfError> {
        let ids = self
            .elements()
            .into_iter()
            .filter(|e| keep(e))
            .map(|e| e.id)
            .collect();
        self.store.intern(ids)
    }

    /// Replacement: the set of images of elements under `f`.
    pub fn replace(
        &self,
        mut f: impl FnMut(&HfSet) -> Result<HfSet, HfError>,
    ) -> Result<HfSet, HfError> {
        let mut ids = Vec::with_capacity(self.len());
        for e in self.elements() {
            ids.push(self.store.claim(&f(&e)?));
        }
        self.store.intern(ids)
    }

    /// The set of all subsets.
    pub fn powerset(&self) -> Result<HfSet, HfError> {
        let base = self.elem_ids();
        if base.len() >= usize::BITS as usize
            || 1_usize << base.len() > self.store.0.max_nodes
        {
            return Err(HfError::NodeBudget {
                limit: self.store.0.max_nodes,
            });
        }
        let mut subsets = Vec::with_capacity(1 << base.len());
        for mask in 0..(1_usize << base.len()) {
            // Subsequences of a canonically sorted list stay sorted.
            let elems: Vec<SetId> = base
                .iter()
                .enumerate()
                .filter(|&(i, _)| mask & (1 << i) != 0)
                .map(|(_, &id)| id)
                .collect();
            let mut inner = self.store.0.inner.write().expect("store lock poisoned");
            subsets.push(inner.intern_sorted(elems.into_boxed_slice(), self.store.0.max_nodes)?);
        }
        self.store.intern(subsets)
    }

    /// Descendant set: the least transitive set containing `self` as an
    /// element (so the result contains `self`, its elements, their
    /// elements, and so on).
    pub fn descendant_set(&self) -> Result<HfSet, HfError> {
        let inner = self.store.read();
        let mut seen = vec![self.id];
        let mut queue = vec![self.id];
        while let Some(next) = queue.pop() {
            for &e in inner.node(next).elems.iter() {
                if !seen.contains(&e) {
                    seen.push(e);
                    queue.push(e);
                }
            }
        }
        drop(inner);
        self.store.intern(seen)
    }

    /// Canonical serialization; equal across stores iff the sets are equal.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let inner = self.store.read();
        serialize_into(&inner, self.id, &mut out);
        out
    }

    /// Decimal-and-braces rendering: von Neumann numerals print as decimals,
    /// other sets as braces over rendered elements, cut off with `..` once
    /// `cap` output characters are reached. Not canonical text (`parse` does
    /// not read decimals), but it stays small on numerals, whose structural
    /// expansion grows exponentially with the value.
    pub fn render(&self, cap: usize) -> String {
        let mut out = String::new();
        self.render_into(&mut out, cap);
        out
    }

    fn render_into(&self, out: &mut String, cap: usize) {
        if out.len() >= cap {
            if !out.ends_with("..") {
                out.push_str("..");
            }
            return;
        }
        match self.store.to_nat(self) {
            Some(n) if n > 0 => out.push_str(&n.to_string()),
            _ => {
                out.push('{');
                for (i, e) in self.elements().iter().enumerate() {
                    if out.len() >= cap {
                        out.push_str(if i > 0 { ",.." } else { ".." });
                        break;
                    }
                    if i > 0 {
                        out.push(',');
                    }
                    e.render_into(out, cap);
                }
                out.push('}');
            }
        }
    }

    fn elem_ids(&self) -> Vec<SetId> {
        self.store.read().node(self.id).elems.to_vec()
    }

    /// Element ids valid in `target`, rebuilding if `self` lives elsewhere.
    fn store_elem_ids(&self, target: &Store) -> Vec<SetId> {
        assert!(
            target.same_store(&self.store),
            "set algebra requires operands from one store; build the set here first"
        );
        self.elem_ids()
    }
}

fn serialize_into(inner: &StoreInner, id: SetId, out: &mut String) {
    out.push('{');
    for (i, &e) in inner.node(id).elems.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        serialize_into(inner, e, out);
    }
    out.push('}');
}

/// Structural comparison across two stores (or one).
fn compare_cross(a_inner: &StoreInner, a: SetId, b_inner: &StoreInner, b: SetId) -> Ordering {
    let (na, nb) = (a_inner.node(a), b_inner.node(b));
    na.rank.cmp(&nb.rank).then_with(|| {
        for (&x, &y) in na.elems.iter().zip(nb.elems.iter()) {
            match compare_cross(a_inner, x, b_inner, y) {
                Ordering::Equal => {}
                other => return other,
            }
        }
        na.elems.len().cmp(&nb.elems.len())
    })
}

impl PartialEq for HfSet {
    fn eq(&self, other: &HfSet) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for HfSet {}

impl PartialOrd for HfSet {
    fn partial_cmp(&self, other: &HfSet) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HfSet {
    fn cmp(&self, other: &HfSet) -> Ordering {
        if self.store.same_store(&other.store) {
            if self.id == other.id {
                return Ordering::Equal;
            }
            return self.store.read().compare(self.id, other.id);
        }
        // Two distinct stores: take both locks in a fixed (address) order so
        // concurrent cross-store comparisons cannot deadlock.
        let (first, second) = if Arc::as_ptr(&self.store.0) < Arc::as_ptr(&other.store.0) {
            (&self.store, &other.store)
        } else {
            (&other.store, &self.store)
        };
        let g1 = first.read();
        let g2 = second.read();
        let (ga, gb) = if first.same_store(&self.store) {
            (&g1, &g2)
        } else {
            (&g2, &g1)
        };
        compare_cross(ga, self.id, gb, other.id)
    }
}

impl std::hash::Hash for HfSet {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        // The fingerprint is a pure function of structure, so equal sets
        // hash identically even across stores.
        state.write_u64(self.store.read().node(self.id).fingerprint);
    }
}

// Both use the bounded rendering: panic messages and error details routinely
// format numerals, whose full brace form is exponentially large.
impl fmt::Display for HfSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(512))
    }
}

impl fmt::Debug for HfSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(512))
    }
}
