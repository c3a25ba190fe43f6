//! Ground normal logic programs: rules, the schematic Q layer and a text form.

mod parse;

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::fixed::Fixed;
use crate::theory::{self, Literal};

pub use parse::{parse_program, ProgramParseError};

/// Constant term. Negative fluent literals are reified as `neg(f)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Int(i64),
    Sym(String),
    Num(Fixed),
    Fn(String, Vec<Term>),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Int(i) => write!(f, "{i}"),
            Term::Sym(s) => f.write_str(s),
            Term::Num(x) => write!(f, "{x}"),
            Term::Fn(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl Term {
    pub fn from_theory_atom(atom: &theory::Atom) -> Term {
        if atom.args.is_empty() {
            return Term::Sym(atom.name.clone());
        }
        let args = atom
            .args
            .iter()
            .map(|t| match t {
                theory::Term::Int(i) => Term::Int(*i),
                theory::Term::Sym(s) => Term::Sym(s.clone()),
                theory::Term::Var(v) => Term::Sym(v.clone()),
            })
            .collect();
        Term::Fn(atom.name.clone(), args)
    }

    pub fn from_literal(literal: &Literal) -> Term {
        let atom = Term::from_theory_atom(&literal.atom);
        if literal.positive {
            atom
        } else {
            Term::Fn("neg".into(), vec![atom])
        }
    }

    /// Inverse of [`Term::from_literal`].
    pub fn to_literal(&self) -> Option<Literal> {
        fn atom(t: &Term) -> Option<theory::Atom> {
            match t {
                Term::Sym(s) => Some(theory::Atom::constant(s.clone())),
                Term::Fn(name, args) if name != "neg" => {
                    let args = args
                        .iter()
                        .map(|a| match a {
                            Term::Int(i) => Some(theory::Term::Int(*i)),
                            Term::Sym(s) => Some(theory::Term::Sym(s.clone())),
                            _ => None,
                        })
                        .collect::<Option<Vec<_>>>()?;
                    Some(theory::Atom::new(name.clone(), args))
                }
                _ => None,
            }
        }
        match self {
            Term::Fn(name, args) if name == "neg" && args.len() == 1 => Some(Literal::neg(atom(&args[0])?)),
            other => Some(Literal::pos(atom(other)?)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundAtom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl GroundAtom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        GroundAtom { predicate: predicate.into(), args }
    }

    pub fn holds(literal: &Literal, t: u32) -> Self {
        GroundAtom::new("holds", vec![Term::from_literal(literal), Term::Int(t as i64)])
    }

    /// Time index of time-stamped predicates.
    pub fn time(&self) -> Option<u32> {
        match (self.predicate.as_str(), self.args.last()) {
            ("holds" | "occ" | "abocc" | "exec" | "reward" | "q", Some(Term::Int(t))) => u32::try_from(*t).ok(),
            _ => None,
        }
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// Which translation rule produced a program rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Category {
    Action,
    Literal,
    NegLiteral,
    Contrary,
    ContraryNeg,
    InitialFact,
    InitialPos,
    InitialNeg,
    Exec,
    Effect,
    Reward,
    QValue,
    Inertia,
    Consistency,
    Generate,
    Abnormal,
    Goal,
    Atom,
    Factor,
    Static,
    ExecEnforce,
    GoalRequired,
    StrictInitial,
}

impl Category {
    pub const ALL: [Category; 23] = [
        Category::Action,
        Category::Literal,
        Category::NegLiteral,
        Category::Contrary,
        Category::ContraryNeg,
        Category::InitialFact,
        Category::InitialPos,
        Category::InitialNeg,
        Category::Exec,
        Category::Effect,
        Category::Reward,
        Category::QValue,
        Category::Inertia,
        Category::Consistency,
        Category::Generate,
        Category::Abnormal,
        Category::Goal,
        Category::Atom,
        Category::Factor,
        Category::Static,
        Category::ExecEnforce,
        Category::GoalRequired,
        Category::StrictInitial,
    ];

    /// Part of the base translation, as opposed to the optional extras.
    pub fn is_core(self) -> bool {
        Category::ALL.iter().position(|&c| c == self).is_some_and(|i| i <= 16)
    }

    pub fn label(self) -> &'static str {
        match self {
            Category::Action => "action",
            Category::Literal => "literal",
            Category::NegLiteral => "neg-literal",
            Category::Contrary => "contrary",
            Category::ContraryNeg => "contrary-neg",
            Category::InitialFact => "initial-fact",
            Category::InitialPos => "initial-pos",
            Category::InitialNeg => "initial-neg",
            Category::Exec => "exec",
            Category::Effect => "effect",
            Category::Reward => "reward",
            Category::QValue => "q-value",
            Category::Inertia => "inertia",
            Category::Consistency => "consistency",
            Category::Generate => "generate",
            Category::Abnormal => "abnormal",
            Category::Goal => "goal",
            Category::Atom => "atom",
            Category::Factor => "factor",
            Category::Static => "static",
            Category::ExecEnforce => "exec-enforce",
            Category::GoalRequired => "goal-required",
            Category::StrictInitial => "strict-initial",
        }
    }

    pub fn from_label(label: &str) -> Option<Category> {
        Category::ALL.into_iter().find(|c| c.label() == label)
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Provenance {
    pub category: Category,
    pub source: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    /// `None` for constraints.
    pub head: Option<GroundAtom>,
    pub pos: Vec<GroundAtom>,
    pub neg: Vec<GroundAtom>,
    pub provenance: Option<Provenance>,
}

impl Rule {
    pub fn fact(head: GroundAtom) -> Self {
        Rule { head: Some(head), pos: vec![], neg: vec![], provenance: None }
    }

    pub fn new(head: Option<GroundAtom>, pos: Vec<GroundAtom>, neg: Vec<GroundAtom>) -> Self {
        Rule { head, pos, neg, provenance: None }
    }

    pub fn tagged(mut self, category: Category, source: Option<String>) -> Self {
        self.provenance = Some(Provenance { category, source });
        self
    }

    pub fn is_fact(&self) -> bool {
        self.head.is_some() && self.pos.is_empty() && self.neg.is_empty()
    }

    pub fn is_constraint(&self) -> bool {
        self.head.is_none()
    }

    pub fn category(&self) -> Option<Category> {
        self.provenance.as_ref().map(|p| p.category)
    }

    pub fn atoms(&self) -> impl Iterator<Item = &GroundAtom> {
        self.head.iter().chain(&self.pos).chain(&self.neg)
    }

    pub fn time(&self) -> u32 {
        self.atoms().filter_map(GroundAtom::time).max().unwrap_or(0)
    }
}

fn write_body(f: &mut fmt::Formatter<'_>, pos: &[GroundAtom], neg: &[GroundAtom]) -> fmt::Result {
    let mut first = true;
    for a in pos {
        if !first {
            f.write_str(", ")?;
        }
        first = false;
        write!(f, "{a}")?;
    }
    for a in neg {
        if !first {
            f.write_str(", ")?;
        }
        first = false;
        write!(f, "not {a}")?;
    }
    Ok(())
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(h) = &self.head {
            write!(f, "{h}")?;
        }
        if !self.pos.is_empty() || !self.neg.is_empty() {
            f.write_str(if self.head.is_some() { " :- " } else { ":- " })?;
            write_body(f, &self.pos, &self.neg)?;
        } else if self.head.is_none() {
            f.write_str(":-")?;
        }
        f.write_str(".")
    }
}

/// A ground instance of the Q recursion:
/// `q(V + reward * gamma^time, action, time + 1)` holds when some
/// `q(V, _, time)` holds and every atom of `body` is true.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QRule {
    pub action: Term,
    pub reward: Fixed,
    pub time: u32,
    pub body: Vec<GroundAtom>,
    pub provenance: Option<Provenance>,
}

impl fmt::Display for QRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#q({},{},{}) :- ", self.action, self.reward, self.time)?;
        write_body(f, &self.body, &[])?;
        f.write_str(".")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalProgram {
    pub rules: Vec<Rule>,
    pub q_rules: Vec<QRule>,
    pub horizon: u32,
    pub gamma: f64,
}

fn sort_key(rule: &Rule) -> (bool, u32, String, String) {
    let predicate = rule.head.as_ref().map(|h| h.predicate.clone()).unwrap_or_default();
    (!rule.is_fact(), rule.time(), predicate, rule.to_string())
}

pub(crate) fn format_real(x: f64) -> String {
    let text = format!("{x}");
    if text.contains(['.', 'e', 'N', 'i']) {
        text
    } else {
        format!("{text}.0")
    }
}

impl NormalProgram {
    /// Drops duplicate rules and sorts: facts first, then by time step, head
    /// predicate and text.
    pub fn canonicalize(&mut self) {
        let mut seen = BTreeSet::new();
        self.rules.retain(|r| seen.insert((r.head.clone(), r.pos.clone(), r.neg.clone())));
        self.rules.sort_by_cached_key(sort_key);
        let mut seen = BTreeSet::new();
        self.q_rules.retain(|r| seen.insert((r.action.clone(), r.reward, r.time, r.body.clone())));
        self.q_rules.sort_by_cached_key(|r| (r.time, r.to_string()));
    }

    /// Every atom mentioned by a rule, sorted.
    pub fn atoms(&self) -> BTreeSet<GroundAtom> {
        self.rules.iter().flat_map(|r| r.atoms().cloned()).collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "#horizon {}.", self.horizon);
        let _ = writeln!(out, "#discount {}.", format_real(self.gamma));
        let provenance = |p: &Option<Provenance>| match p {
            Some(Provenance { category, source: Some(s) }) => format!(" % [{category}] {s}"),
            Some(Provenance { category, source: None }) => format!(" % [{category}]"),
            None => String::new(),
        };
        for r in &self.rules {
            let _ = writeln!(out, "{r}{}", provenance(&r.provenance));
        }
        for q in &self.q_rules {
            let _ = writeln!(out, "{q}{}", provenance(&q.provenance));
        }
        out
    }
}

#[cfg(test)]
mod tests;
