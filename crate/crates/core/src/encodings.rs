//! Numerals, pairs, tuples, function graphs, and the tagged constructor
//! layer on top of them.
//!
//! Conventions:
//!
//! - numerals are von Neumann (`0 = {}`, `n+1 = n ∪ {n}`);
//! - the ordered pair `<x,y>` is Kuratowski: `{{x},{x,y}}`;
//! - an n-tuple for n = 0, 1, 3, 4, ... is the function graph
//!   `{<k,x_k>}` over the numerals `0..n` (so `<> = {}` and
//!   `<x> = {<0,x>}`), while a bare 2-component `<x,y>` is the pair;
//! - a K-tuple (family) is the function graph over its key set.
//!
//! Each constructor group listed in [`Group`] gets an injective encoding
//! whose members are pairwise disjoint and never collide with the group's
//! atoms. [`classify`] is total: sets that fit no constructor of the group
//! decode as [`DecodedThing::Opaque`].

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::hfset::{HfError, HfSet, Store};

/// Errors from the tagged constructor layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("{tag:?} takes {expected} arguments, got {got}")]
    WrongArity { tag: Tag, expected: usize, got: usize },
    #[error("invalid arguments for {tag:?}: {msg}")]
    Invalid { tag: Tag, msg: String },
    #[error(transparent)]
    Hf(#[from] HfError),
}

/// The von Neumann numeral for `n`.
pub fn von_neumann(store: &Store, n: u64) -> Result<HfSet, HfError> {
    store.numeral(n)
}

/// Decode a von Neumann numeral; `None` if `x` is not one.
pub fn to_nat(x: &HfSet) -> Option<u64> {
    x.store().to_nat(x)
}

/// Kuratowski pair `{{x},{x,y}}`.
pub fn pair(x: &HfSet, y: &HfSet) -> Result<HfSet, HfError> {
    let store = x.store();
    let sx = store.singleton(x)?;
    let xy = store.pair_set(x, y)?;
    store.pair_set(&sx, &xy)
}

/// Decode a Kuratowski pair. `{{x}}` decodes as `(x, x)`.
pub fn unpair(p: &HfSet) -> Option<(HfSet, HfSet)> {
    let elems = p.elements();
    match elems.as_slice() {
        [s] => {
            let inner = s.elements();
            match inner.as_slice() {
                [x] => Some((x.clone(), x.clone())),
                _ => None,
            }
        }
        [a, b] => try_pair_parts(a, b).or_else(|| try_pair_parts(b, a)),
        _ => None,
    }
}

/// Match `half = {x}` and `other = {x, y}`.
fn try_pair_parts(half: &HfSet, other: &HfSet) -> Option<(HfSet, HfSet)> {
    let inner = half.elements();
    let [x] = inner.as_slice() else { return None };
    let pieces = other.elements();
    match pieces.as_slice() {
        [a, b] if a == x => Some((x.clone(), b.clone())),
        [a, b] if b == x => Some((x.clone(), a.clone())),
        _ => None,
    }
}

/// The n-tuple `<x_0, ..., x_{n-1}>` as a graph over numerals.
pub fn tuple(store: &Store, xs: &[HfSet]) -> Result<HfSet, HfError> {
    let mut entries = Vec::with_capacity(xs.len());
    for (k, x) in xs.iter().enumerate() {
        entries.push(pair(&store.numeral(k as u64)?, x)?);
    }
    store.set(&entries)
}

/// Decode a numeral-indexed tuple of any length.
pub fn untuple(x: &HfSet) -> Option<Vec<HfSet>> {
    let graph = unfunc(x)?;
    let mut out = vec![None; graph.len()];
    for (key, value) in graph {
        let k = to_nat(&key)? as usize;
        if k >= out.len() || out[k].is_some() {
            return None;
        }
        out[k] = Some(value);
    }
    out.into_iter().collect()
}

/// The function graph `{<k, v>}` of `map`.
pub fn func(store: &Store, map: &BTreeMap<HfSet, HfSet>) -> Result<HfSet, HfError> {
    let mut entries = Vec::with_capacity(map.len());
    for (k, v) in map {
        entries.push(pair(k, v)?);
    }
    store.set(&entries)
}

/// Decode a set of pairs with pairwise distinct keys.
pub fn unfunc(x: &HfSet) -> Option<BTreeMap<HfSet, HfSet>> {
    let mut map = BTreeMap::new();
    for e in x.elements() {
        let (k, v) = unpair(&e)?;
        if map.insert(k, v).is_some() {
            // Two graph entries share a key: not a function.
            return None;
        }
    }
    Some(map)
}

/// The domain of a function graph, as a set.
pub fn func_domain(store: &Store, map: &BTreeMap<HfSet, HfSet>) -> Result<HfSet, HfError> {
    let keys: Vec<HfSet> = map.keys().cloned().collect();
    store.set(&keys)
}

/// Constructors covered by the tagged layer, grouped by encoding scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tag {
    // Natural numbers.
    Zero,
    Succ,
    // Reduced broad numbers (pair-based).
    Begin,
    Make,
    // Broad numbers.
    Start,
    Build,
    // Derivations for broad rubrics.
    Basic,
    Trigger,
    // Pair-coded derivations (structure shared with broad numbers).
    BasicP,
    TriggerP,
    // The image of broad numbers inside reduced broad numbers.
    StartP,
    Bu2,
    // Binary sums.
    Inl,
    Inr,
    // Tarski universe codes.
    TarskiEmbed,
    TarskiZero,
    TarskiTwo,
    TarskiEq,
    TarskiSigma,
    TarskiWtype,
}

/// Encoding groups. Injectivity and disjointness hold within one group;
/// different groups may reuse the same sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Group {
    Zermelo,
    Make,
    Build,
    Derivation,
    Pseudo,
    Reduced,
    Sum,
    Tarski,
}

impl Tag {
    pub fn group(self) -> Group {
        match self {
            Tag::Zero | Tag::Succ => Group::Zermelo,
            Tag::Begin | Tag::Make => Group::Make,
            Tag::Start | Tag::Build => Group::Build,
            Tag::Basic | Tag::Trigger => Group::Derivation,
            Tag::BasicP | Tag::TriggerP => Group::Pseudo,
            Tag::StartP | Tag::Bu2 => Group::Reduced,
            Tag::Inl | Tag::Inr => Group::Sum,
            Tag::TarskiEmbed
            | Tag::TarskiZero
            | Tag::TarskiTwo
            | Tag::TarskiEq
            | Tag::TarskiSigma
            | Tag::TarskiWtype => Group::Tarski,
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Tag::Zero | Tag::Begin | Tag::Start | Tag::StartP | Tag::TarskiZero | Tag::TarskiTwo => 0,
            Tag::Succ | Tag::Inl | Tag::Inr | Tag::TarskiEmbed => 1,
            Tag::Make | Tag::TarskiSigma | Tag::TarskiWtype => 2,
            Tag::Build | Tag::Basic | Tag::BasicP | Tag::TarskiEq => 3,
            Tag::Trigger | Tag::TriggerP | Tag::Bu2 => 4,
        }
    }
}

impl Group {
    pub fn tags(self) -> &'static [Tag] {
        match self {
            Group::Zermelo => &[Tag::Zero, Tag::Succ],
            Group::Make => &[Tag::Begin, Tag::Make],
            Group::Build => &[Tag::Start, Tag::Build],
            Group::Derivation => &[Tag::Basic, Tag::Trigger],
            Group::Pseudo => &[Tag::BasicP, Tag::TriggerP],
            Group::Reduced => &[Tag::StartP, Tag::Bu2],
            Group::Sum => &[Tag::Inl, Tag::Inr],
            Group::Tarski => &[
                Tag::TarskiEmbed,
                Tag::TarskiZero,
                Tag::TarskiTwo,
                Tag::TarskiEq,
                Tag::TarskiSigma,
                Tag::TarskiWtype,
            ],
        }
    }

    pub fn all() -> &'static [Group] {
        &[
            Group::Zermelo,
            Group::Make,
            Group::Build,
            Group::Derivation,
            Group::Pseudo,
            Group::Reduced,
            Group::Sum,
            Group::Tarski,
        ]
    }
}

/// Result of [`classify`]: either a recognized constructor application or
/// an opaque set that fits none of the group's constructors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecodedThing {
    Tagged { tag: Tag, args: Vec<HfSet> },
    Opaque,
}

impl DecodedThing {
    fn tagged(tag: Tag, args: Vec<HfSet>) -> DecodedThing {
        DecodedThing::Tagged { tag, args }
    }
}

impl fmt::Display for DecodedThing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecodedThing::Tagged { tag, args } => {
                write!(f, "{tag:?}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
            DecodedThing::Opaque => write!(f, "Opaque"),
        }
    }
}

fn check_arity(tag: Tag, args: &[HfSet]) -> Result<(), EncodeError> {
    if args.len() != tag.arity() {
        return Err(EncodeError::WrongArity {
            tag,
            expected: tag.arity(),
            got: args.len(),
        });
    }
    Ok(())
}

/// Apply a constructor to arguments.
///
/// All constructors are permissive except [`Tag::Bu2`], which checks that
/// its signature argument is a function graph, that the chosen symbol is
/// in its domain, and that the child tuple has exactly the symbol's arity
/// as its domain; without those checks the encoding would not be
/// injectively decodable.
pub fn encode(store: &Store, tag: Tag, args: &[HfSet]) -> Result<HfSet, EncodeError> {
    check_arity(tag, args)?;
    let out = match tag {
        Tag::Zero | Tag::Begin | Tag::Start => store.empty(),
        Tag::Succ => store.singleton(&args[0])?,
        Tag::Make => pair(&args[0], &args[1])?,
        Tag::Build => build(&args[0], &args[1], &args[2])?,
        Tag::Basic => {
            let payload = tuple(store, args)?;
            pair(&store.numeral(0)?, &payload)?
        }
        Tag::Trigger => {
            let payload = tuple(store, args)?;
            pair(&store.numeral(1)?, &payload)?
        }
        Tag::BasicP => {
            // Build(Build(Start, i, g), p, <>)
            let start = store.empty();
            let inner = build(&start, &args[0], &args[1])?;
            build(&inner, &args[2], &store.empty())?
        }
        Tag::TriggerP => {
            // Build(Build(Build(m, *, <>), i, g), p, <>)
            let star = store.empty();
            let stem = build(&args[0], &star, &store.empty())?;
            let inner = build(&stem, &args[1], &args[2])?;
            build(&inner, &args[3], &store.empty())?
        }
        Tag::StartP => {
            // Make(Begin, <>) = {{0}}
            pair(&store.empty(), &store.empty())?
        }
        Tag::Bu2 => encode_bu2(store, &args[0], &args[1], &args[2], &args[3])?,
        Tag::Inl => pair(&store.numeral(0)?, &args[0])?,
        Tag::Inr => pair(&store.numeral(1)?, &args[0])?,
        Tag::TarskiEmbed => {
            let payload = tuple(store, args)?;
            pair(&store.numeral(0)?, &payload)?
        }
        Tag::TarskiZero => pair(&store.numeral(1)?, &store.empty())?,
        Tag::TarskiTwo => pair(&store.numeral(2)?, &store.empty())?,
        Tag::TarskiEq => {
            let payload = tuple(store, args)?;
            pair(&store.numeral(3)?, &payload)?
        }
        Tag::TarskiSigma => {
            let payload = pair(&args[0], &args[1])?;
            pair(&store.numeral(4)?, &payload)?
        }
        Tag::TarskiWtype => {
            let payload = pair(&args[0], &args[1])?;
            pair(&store.numeral(5)?, &payload)?
        }
    };
    Ok(out)
}

/// `Build(x, y, z) = Make(x, Make(y, z))`.
pub(crate) fn build(x: &HfSet, y: &HfSet, z: &HfSet) -> Result<HfSet, HfError> {
    let inner = pair(y, z)?;
    pair(x, &inner)
}

/// Decode `Make(x, Make(y, z))`.
pub(crate) fn unbuild(w: &HfSet) -> Option<(HfSet, HfSet, HfSet)> {
    let (x, inner) = unpair(w)?;
    let (y, z) = unpair(&inner)?;
    Some((x, y, z))
}

/// `Bu2(w, S, i, f)`: the image of `Build(w, i, f)` inside the
/// pair-based encoding, carrying the whole signature `S` so that it can
/// be recovered from the shape alone.
///
/// With `S = (K_j)_{j in I}` and `J = I + sum_j K_j`, this is
/// `Make(Make(w, <>), [b_j]_{j in J})` where `b_{inl i} = Begin`,
/// `b_{inl i'} = StartP` for `i' != i`, `b_{inr <i,k>} = f(k)`, and
/// `b_{inr <i',k>} = Begin` for `i' != i`.
fn encode_bu2(
    store: &Store,
    w: &HfSet,
    sig: &HfSet,
    i: &HfSet,
    f: &HfSet,
) -> Result<HfSet, EncodeError> {
    let invalid = |msg: &str| EncodeError::Invalid {
        tag: Tag::Bu2,
        msg: msg.to_string(),
    };
    let sig_map = unfunc(sig).ok_or_else(|| invalid("signature must be a function graph"))?;
    let arity = sig_map
        .get(i)
        .ok_or_else(|| invalid("symbol is not in the signature's domain"))?;
    let f_map = unfunc(f).ok_or_else(|| invalid("child tuple must be a function graph"))?;
    let f_domain = func_domain(store, &f_map)?;
    if f_domain != *arity {
        return Err(invalid("child tuple domain must equal the symbol's arity"));
    }

    let begin = store.empty();
    let start_p = encode(store, Tag::StartP, &[])?;
    let mut b = BTreeMap::new();
    for (j, k_set) in &sig_map {
        let marker = if j == i { &begin } else { &start_p };
        b.insert(encode(store, Tag::Inl, &[j.clone()])?, marker.clone());
        for k in k_set.elements() {
            let key = encode(store, Tag::Inr, &[pair(j, &k)?])?;
            let value = if j == i {
                f_map
                    .get(&k)
                    .cloned()
                    .expect("domain check above guarantees every position is mapped")
            } else {
                begin.clone()
            };
            b.insert(key, value);
        }
    }
    let head = pair(w, &store.empty())?;
    Ok(pair(&head, &func(store, &b)?)?)
}

/// Decode a [`Tag::Bu2`] image back into `(w, S, i, f)`.
fn decode_bu2(store: &Store, x: &HfSet) -> Option<Vec<HfSet>> {
    let (head, body) = unpair(x)?;
    let (w, e) = unpair(&head)?;
    if !e.is_empty() {
        return None;
    }
    let begin = store.empty();
    let start_p = encode(store, Tag::StartP, &[]).ok()?;
    let b = unfunc(&body)?;

    let mut symbols: BTreeMap<HfSet, Vec<HfSet>> = BTreeMap::new();
    let mut chosen = None;
    let mut positions: Vec<(HfSet, HfSet, HfSet)> = Vec::new();
    for (key, value) in &b {
        let (side, payload) = unpair(key)?;
        match to_nat(&side)? {
            0 => {
                if *value == begin {
                    // The marked symbol: exactly one key may carry Begin.
                    if chosen.replace(payload.clone()).is_some() {
                        return None;
                    }
                } else if *value != start_p {
                    return None;
                }
                symbols.entry(payload).or_default();
            }
            1 => {
                let (j, k) = unpair(&payload)?;
                positions.push((j, k, value.clone()));
            }
            _ => return None,
        }
    }
    let i = chosen?;
    let mut f = BTreeMap::new();
    for (j, k, value) in positions {
        // Position keys may not mention symbols absent from the inl part.
        let slot = symbols.get_mut(&j)?;
        slot.push(k.clone());
        if j == i {
            f.insert(k, value);
        } else if value != begin {
            return None;
        }
    }
    let mut sig = BTreeMap::new();
    for (j, ks) in symbols {
        sig.insert(j, store.set(&ks).ok()?);
    }
    Some(vec![
        w,
        func(store, &sig).ok()?,
        i,
        func(store, &f).ok()?,
    ])
}

/// Decode `x` against one constructor group. Total: anything that fits no
/// constructor of the group is [`DecodedThing::Opaque`].
pub fn classify(store: &Store, group: Group, x: &HfSet) -> DecodedThing {
    match group {
        Group::Zermelo => {
            if x.is_empty() {
                return DecodedThing::tagged(Tag::Zero, vec![]);
            }
            let elems = x.elements();
            match elems.as_slice() {
                [inner] => DecodedThing::tagged(Tag::Succ, vec![inner.clone()]),
                _ => DecodedThing::Opaque,
            }
        }
        Group::Make => {
            if x.is_empty() {
                return DecodedThing::tagged(Tag::Begin, vec![]);
            }
            match unpair(x) {
                Some((a, b)) => DecodedThing::tagged(Tag::Make, vec![a, b]),
                None => DecodedThing::Opaque,
            }
        }
        Group::Build => {
            if x.is_empty() {
                return DecodedThing::tagged(Tag::Start, vec![]);
            }
            match unbuild(x) {
                Some((a, b, c)) => DecodedThing::tagged(Tag::Build, vec![a, b, c]),
                None => DecodedThing::Opaque,
            }
        }
        Group::Derivation => {
            let Some((side, payload)) = unpair(x) else {
                return DecodedThing::Opaque;
            };
            match (to_nat(&side), untuple(&payload)) {
                (Some(0), Some(args)) if args.len() == 3 => {
                    DecodedThing::tagged(Tag::Basic, args)
                }
                (Some(1), Some(args)) if args.len() == 4 => {
                    DecodedThing::tagged(Tag::Trigger, args)
                }
                _ => DecodedThing::Opaque,
            }
        }
        Group::Pseudo => {
            // Both shapes end in Build(_, p, <>); they differ in whether the
            // innermost left part is Start (empty) or a Build stem.
            let Some((inner, p, e)) = unbuild(x) else {
                return DecodedThing::Opaque;
            };
            if !e.is_empty() {
                return DecodedThing::Opaque;
            }
            let Some((head, i, g)) = unbuild(&inner) else {
                return DecodedThing::Opaque;
            };
            if head.is_empty() {
                return DecodedThing::tagged(Tag::BasicP, vec![i, g, p]);
            }
            match unbuild(&head) {
                Some((m, star, empt)) if star.is_empty() && empt.is_empty() => {
                    DecodedThing::tagged(Tag::TriggerP, vec![m, i, g, p])
                }
                _ => DecodedThing::Opaque,
            }
        }
        Group::Reduced => {
            let start_p = encode(store, Tag::StartP, &[])
                .expect("StartP needs only three nodes");
            if *x == start_p {
                return DecodedThing::tagged(Tag::StartP, vec![]);
            }
            match decode_bu2(store, x) {
                Some(args) => DecodedThing::tagged(Tag::Bu2, args),
                None => DecodedThing::Opaque,
            }
        }
        Group::Sum => {
            let Some((side, payload)) = unpair(x) else {
                return DecodedThing::Opaque;
            };
            match to_nat(&side) {
                Some(0) => DecodedThing::tagged(Tag::Inl, vec![payload]),
                Some(1) => DecodedThing::tagged(Tag::Inr, vec![payload]),
                _ => DecodedThing::Opaque,
            }
        }
        Group::Tarski => {
            let Some((side, payload)) = unpair(x) else {
                return DecodedThing::Opaque;
            };
            match to_nat(&side) {
                Some(0) => match untuple(&payload) {
                    Some(args) if args.len() == 1 => {
                        DecodedThing::tagged(Tag::TarskiEmbed, args)
                    }
                    _ => DecodedThing::Opaque,
                },
                Some(1) if payload.is_empty() => DecodedThing::tagged(Tag::TarskiZero, vec![]),
                Some(2) if payload.is_empty() => DecodedThing::tagged(Tag::TarskiTwo, vec![]),
                Some(3) => match untuple(&payload) {
                    Some(args) if args.len() == 3 => DecodedThing::tagged(Tag::TarskiEq, args),
                    _ => DecodedThing::Opaque,
                },
                Some(4) => match unpair(&payload) {
                    Some((m, g)) => DecodedThing::tagged(Tag::TarskiSigma, vec![m, g]),
                    _ => DecodedThing::Opaque,
                },
                Some(5) => match unpair(&payload) {
                    Some((m, g)) => DecodedThing::tagged(Tag::TarskiWtype, vec![m, g]),
                    _ => DecodedThing::Opaque,
                },
                _ => DecodedThing::Opaque,
            }
        }
    }
}
