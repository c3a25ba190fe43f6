//! Action theories: syntax tree, grounding, validation and canonical printing.
//!
//! A theory file is read by [`parse_theory`] into a [`Theory`] that may still
//! contain typed variables and built-in comparisons. [`ground_theory`] expands
//! it over the declared finite domains into an [`ActionTheory`], the form every
//! other module consumes.

mod ground;
mod parse;
mod print;
mod validate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::fixed::Fixed;
pub use crate::lex::Pos;

pub use ground::ground_theory;
pub use parse::parse_theory;
pub use validate::{scoping_violations, validate_source, validate_theory, Severity, ValidationReport, Violation};

/// Argument of an atom: a typed variable before grounding, a constant after.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Int(i64),
    Sym(String),
}

impl Term {
    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(name) | Term::Sym(name) => f.write_str(name),
            Term::Int(value) => write!(f, "{value}"),
        }
    }
}

/// A fluent or action atom such as `on(1)` or `close`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub name: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(name: impl Into<String>, args: Vec<Term>) -> Self {
        Atom { name: name.into(), args }
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Atom::new(name, Vec::new())
    }

    pub fn is_ground(&self) -> bool {
        !self.args.iter().any(Term::is_var)
    }

    pub fn collect_vars(&self, into: &mut BTreeSet<String>) {
        for arg in &self.args {
            if let Term::Var(v) = arg {
                into.insert(v.clone());
            }
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, arg) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{arg}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// A fluent literal `f` or `-f`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub atom: Atom,
    pub positive: bool,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal { atom, positive: true }
    }

    pub fn neg(atom: Atom) -> Self {
        Literal { atom, positive: false }
    }

    pub fn complement(&self) -> Self {
        Literal { atom: self.atom.clone(), positive: !self.positive }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("-")?;
        }
        write!(f, "{}", self.atom)
    }
}

/// A conjunction of literals, kept as an ordered set. Empty means true.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConjunctiveFormula(BTreeSet<Literal>);

impl ConjunctiveFormula {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Literal> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, literal: &Literal) -> bool {
        self.0.contains(literal)
    }

    pub fn insert(&mut self, literal: Literal) -> bool {
        self.0.insert(literal)
    }

    pub fn literals(&self) -> &BTreeSet<Literal> {
        &self.0
    }

    /// True when no atom occurs with both signs.
    pub fn is_consistent(&self) -> bool {
        self.0.iter().all(|l| l.positive || !self.0.contains(&l.complement()))
    }

    /// True when every literal is in `set`.
    pub fn holds_in(&self, set: &BTreeSet<Literal>) -> bool {
        self.0.is_subset(set)
    }
}

impl FromIterator<Literal> for ConjunctiveFormula {
    fn from_iter<I: IntoIterator<Item = Literal>>(iter: I) -> Self {
        ConjunctiveFormula(iter.into_iter().collect())
    }
}

impl fmt::Display for ConjunctiveFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("{}");
        }
        for (i, literal) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{literal}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
        })
    }
}

/// Comparison operand: a term plus an optional integer offset (`X + 1`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Expr {
    pub term: Term,
    pub offset: i64,
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.term)?;
        match self.offset {
            0 => Ok(()),
            o if o > 0 => write!(f, " + {o}"),
            o => write!(f, " - {}", -o),
        }
    }
}

/// Built-in comparison, evaluated away during grounding.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Comparison {
    pub lhs: Expr,
    pub op: CmpOp,
    pub rhs: Expr,
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.op, self.rhs)
    }
}

/// Law condition before grounding: literals plus comparisons.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Condition {
    pub literals: Vec<Literal>,
    pub comparisons: Vec<Comparison>,
}

impl Condition {
    pub fn is_empty(&self) -> bool {
        self.literals.is_empty() && self.comparisons.is_empty()
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("{}");
        }
        let items = self
            .literals
            .iter()
            .map(ToString::to_string)
            .chain(self.comparisons.iter().map(ToString::to_string));
        for (i, item) in items.enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(&item)?;
        }
        Ok(())
    }
}

/// `domain floor = 1..3.`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainDecl {
    pub name: String,
    pub values: Vec<Term>,
    pub pos: Pos,
}

/// `fluent on(floor).` or `action up(floor).`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    pub name: String,
    pub arg_types: Vec<String>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceCausalLaw {
    pub action: Atom,
    pub effects: Vec<Literal>,
    pub reward: Fixed,
    pub condition: Condition,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceExecutabilityLaw {
    pub action: Atom,
    pub condition: Condition,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceStaticLaw {
    pub head: Literal,
    pub condition: Condition,
    pub pos: Pos,
}

/// A theory as written, possibly containing variables.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Theory {
    pub domains: Vec<DomainDecl>,
    pub fluents: Vec<Signature>,
    pub actions: Vec<Signature>,
    /// Alternatives of `initially`, in order of appearance.
    pub initially: Vec<(Vec<Literal>, Pos)>,
    pub causal_laws: Vec<SourceCausalLaw>,
    pub executability_laws: Vec<SourceExecutabilityLaw>,
    pub static_laws: Vec<SourceStaticLaw>,
    pub goal: Option<(Vec<Literal>, Pos)>,
    pub horizon: Option<u32>,
    pub discount: Option<f64>,
}

/// `a causes φ : r if ψ`
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CausalLaw {
    pub action: Atom,
    pub effects: ConjunctiveFormula,
    pub reward: Fixed,
    pub condition: ConjunctiveFormula,
}

/// `executable a if ψ`
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExecutabilityLaw {
    pub action: Atom,
    pub condition: ConjunctiveFormula,
}

/// `l if ψ`
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StaticLaw {
    pub head: Literal,
    pub condition: ConjunctiveFormula,
}

impl fmt::Display for CausalLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} causes {} : {} if {}.", self.action, self.effects, self.reward, self.condition)
    }
}

impl fmt::Display for ExecutabilityLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "executable {} if {}.", self.action, self.condition)
    }
}

impl fmt::Display for StaticLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "static {} if {}.", self.head, self.condition)
    }
}

/// A ground action theory `⟨S0, D, γ⟩` with its horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionTheory {
    pub domains: BTreeMap<String, Vec<Term>>,
    pub fluent_decls: BTreeMap<String, Vec<String>>,
    pub action_decls: BTreeMap<String, Vec<String>>,
    pub initial_states: Vec<ConjunctiveFormula>,
    pub causal_laws: BTreeSet<CausalLaw>,
    pub executability_laws: BTreeSet<ExecutabilityLaw>,
    pub static_laws: BTreeSet<StaticLaw>,
    pub goal: ConjunctiveFormula,
    pub gamma: f64,
    pub horizon: u32,
    atoms: Vec<Atom>,
    actions: Vec<Atom>,
}

impl ActionTheory {
    /// Every ground fluent atom, sorted.
    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Every ground action, sorted.
    pub fn actions(&self) -> &[Atom] {
        &self.actions
    }

    pub fn with_horizon(mut self, horizon: u32) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    fn instances(decls: &BTreeMap<String, Vec<String>>, domains: &BTreeMap<String, Vec<Term>>) -> Vec<Atom> {
        let mut out = Vec::new();
        for (name, types) in decls {
            let mut partial: Vec<Vec<Term>> = vec![Vec::new()];
            for ty in types {
                let values = domains.get(ty).map(Vec::as_slice).unwrap_or(&[]);
                partial = partial
                    .into_iter()
                    .flat_map(|prefix| {
                        values.iter().map(move |v| {
                            let mut next = prefix.clone();
                            next.push(v.clone());
                            next
                        })
                    })
                    .collect();
            }
            out.extend(partial.into_iter().map(|args| Atom::new(name.clone(), args)));
        }
        out.sort();
        out
    }

    pub(crate) fn refresh_universe(&mut self) {
        self.atoms = Self::instances(&self.fluent_decls, &self.domains);
        self.actions = Self::instances(&self.action_decls, &self.domains);
    }

    /// Every action mentioned by a causal law, sorted and deduplicated.
    pub fn caused_actions(&self) -> BTreeSet<&Atom> {
        self.causal_laws.iter().map(|law| &law.action).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TheoryError {
    #[error("{pos}: syntax error: {message}")]
    Syntax { pos: Pos, message: String },
    #[error("{pos}: duplicate declaration of {kind} `{name}`")]
    Duplicate { pos: Pos, kind: &'static str, name: String },
    #[error("{pos}: unknown type `{name}`")]
    UnknownType { pos: Pos, name: String },
    #[error("{pos}: unknown {kind} `{name}`")]
    UnknownSymbol { pos: Pos, kind: &'static str, name: String },
    #[error("{pos}: `{name}` takes {expected} argument(s), found {found}")]
    Arity { pos: Pos, name: String, expected: usize, found: usize },
    #[error("{pos}: constant `{value}` is not in domain `{domain}`")]
    OutOfDomain { pos: Pos, value: String, domain: String },
    #[error("{pos}: variable `{var}` is used both as `{first}` and as `{second}`")]
    TypeConflict { pos: Pos, var: String, first: String, second: String },
    #[error("{pos}: variable `{var}` appears only in comparisons")]
    UnboundedVariable { pos: Pos, var: String },
    #[error("{pos}: domain `{name}` is empty")]
    EmptyDomain { pos: Pos, name: String },
    #[error("{pos}: {what} must not contain variables")]
    NonGround { pos: Pos, what: &'static str },
    #[error("{pos}: arithmetic on non-integer term `{term}`")]
    NonIntegerArithmetic { pos: Pos, term: String },
    #[error("missing `{0}` directive")]
    MissingDirective(&'static str),
}
