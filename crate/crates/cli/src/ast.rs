//! Syntax trees for definition documents and command-line literals.
//!
//! Nodes carry no source positions; parse errors report line and column,
//! and everything after parsing works on plain values. All nodes compare
//! structurally, which is what the round-trip guarantee is stated over.

/// A hereditarily finite value written out literally.
///
/// `Tuple` is the function-graph form `[k -> v, ...]`; `Build`, `Make`
/// and `Bu2` take their child graph as an arbitrary literal so printed
/// output can be fed back in unchanged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValueLit {
    Nat(u64),
    Set(Vec<ValueLit>),
    Tuple(Vec<(ValueLit, ValueLit)>),
    Start,
    Begin,
    StartP,
    Build(Box<ValueLit>, Box<ValueLit>, Box<ValueLit>),
    Make(Box<ValueLit>, Box<ValueLit>),
    Bu2(Box<ValueLit>, Box<ValueLit>, Box<ValueLit>, Box<ValueLit>),
}

/// Arithmetic over rule inputs and one family index variable.
///
/// `Var` names are either `m<k>` (the rule input at key `k`) or the
/// family's declared index variable; which are legal where is checked at
/// desugar time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Nat(u64),
    Var(String),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
}

/// The result family of one rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyDef {
    /// `family p from LO : VALUE` with `p` ranging over naturals >= LO.
    Indexed {
        var: String,
        from: Expr,
        value: Expr,
    },
    /// `list { INDEX: VALUE; ... }` with explicit indices.
    Listed(Vec<(ValueLit, Expr)>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleDef {
    pub index: ValueLit,
    pub arity: ValueLit,
    pub family: FamilyDef,
}

/// Rule block shared by rubric definitions and inline trigger rubrics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RubricBody {
    /// `class <= N`: restrict generated values to naturals at most `N`.
    pub class_cap: Option<u64>,
    pub rules: Vec<RuleDef>,
}

/// A rubric position: a name to resolve, or an inline rule block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RubricRef {
    Name(String),
    Inline(RubricBody),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignatureDef {
    pub name: String,
    pub entries: Vec<(ValueLit, ValueLit)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RubricDef {
    pub name: String,
    pub body: RubricBody,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BroadRubricDef {
    pub name: String,
    pub basic: RubricRef,
    pub triggers: Vec<(ValueLit, RubricRef)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BroadSigDef {
    pub name: String,
    /// Broad-number literal to signature name.
    pub entries: Vec<(ValueLit, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamOfSetsDef {
    pub name: String,
    /// Element literal to arity-set literal.
    pub entries: Vec<(ValueLit, ValueLit)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Def {
    Signature(SignatureDef),
    Rubric(RubricDef),
    BroadRubric(BroadRubricDef),
    BroadSig(BroadSigDef),
    FamOfSets(FamOfSetsDef),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Document {
    pub defs: Vec<Def>,
}

impl Def {
    pub fn name(&self) -> &str {
        match self {
            Def::Signature(d) => &d.name,
            Def::Rubric(d) => &d.name,
            Def::BroadRubric(d) => &d.name,
            Def::BroadSig(d) => &d.name,
            Def::FamOfSets(d) => &d.name,
        }
    }
}

/// A term literal `(SYMBOL [k -> child, ...])`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermLit {
    pub symbol: ValueLit,
    pub children: Vec<(ValueLit, TermLit)>,
}

/// A derivation literal.
///
/// `Plain` is the tuple form `(i [k -> d, ...] p)` consumed by plain
/// rubrics; `Basic` and `Trigger` are the tagged forms for broad rubrics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DerivLit {
    Plain {
        index: ValueLit,
        children: Vec<(ValueLit, DerivLit)>,
        p: ValueLit,
    },
    Basic {
        index: ValueLit,
        children: Vec<(ValueLit, DerivLit)>,
        p: ValueLit,
    },
    Trigger {
        m: Box<DerivLit>,
        index: ValueLit,
        children: Vec<(ValueLit, DerivLit)>,
        p: ValueLit,
    },
}
