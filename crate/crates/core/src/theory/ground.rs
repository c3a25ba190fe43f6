use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use super::{
    ActionTheory, Atom, CausalLaw, CmpOp, Comparison, Condition, ConjunctiveFormula, ExecutabilityLaw, Expr,
    Literal, Pos, StaticLaw, Term, Theory, TheoryError,
};

type Binding = BTreeMap<String, Term>;

/// Replaces every law by all of its type-respecting instances.
///
/// Comparisons are evaluated per instance and removed; instances whose
/// comparisons are false are dropped.
pub fn ground_theory(theory: &Theory) -> Result<ActionTheory, TheoryError> {
    let scope = Scope::new(theory)?;

    let mut causal_laws = BTreeSet::new();
    for law in &theory.causal_laws {
        let mut typer = scope.typer(law.pos);
        typer.action(&law.action)?;
        typer.literals(&law.effects)?;
        typer.condition(&law.condition)?;
        for binding in typer.bindings(&law.condition.comparisons)? {
            causal_laws.insert(CausalLaw {
                action: subst_atom(&law.action, &binding),
                effects: law.effects.iter().map(|l| subst_literal(l, &binding)).collect(),
                reward: law.reward,
                condition: law.condition.literals.iter().map(|l| subst_literal(l, &binding)).collect(),
            });
        }
    }

    let mut executability_laws = BTreeSet::new();
    for law in &theory.executability_laws {
        let mut typer = scope.typer(law.pos);
        typer.action(&law.action)?;
        typer.condition(&law.condition)?;
        for binding in typer.bindings(&law.condition.comparisons)? {
            executability_laws.insert(ExecutabilityLaw {
                action: subst_atom(&law.action, &binding),
                condition: law.condition.literals.iter().map(|l| subst_literal(l, &binding)).collect(),
            });
        }
    }

    let mut static_laws = BTreeSet::new();
    for law in &theory.static_laws {
        let mut typer = scope.typer(law.pos);
        typer.literals(std::slice::from_ref(&law.head))?;
        typer.condition(&law.condition)?;
        for binding in typer.bindings(&law.condition.comparisons)? {
            static_laws.insert(StaticLaw {
                head: subst_literal(&law.head, &binding),
                condition: law.condition.literals.iter().map(|l| subst_literal(l, &binding)).collect(),
            });
        }
    }

    let mut initial_states = Vec::new();
    for (literals, pos) in &theory.initially {
        let formula = scope.ground_formula(literals, *pos, "initial state")?;
        if !initial_states.contains(&formula) {
            initial_states.push(formula);
        }
    }

    let goal = match &theory.goal {
        Some((literals, pos)) => scope.ground_formula(literals, *pos, "goal")?,
        None => ConjunctiveFormula::new(),
    };

    let mut ground = ActionTheory {
        domains: scope.domains.clone(),
        fluent_decls: scope.fluents.iter().map(|(k, v)| (k.clone(), v.clone())).collect(),
        action_decls: scope.actions.iter().map(|(k, v)| (k.clone(), v.clone())).collect(),
        initial_states,
        causal_laws,
        executability_laws,
        static_laws,
        goal,
        gamma: theory.discount.ok_or(TheoryError::MissingDirective("discount"))?,
        horizon: theory.horizon.ok_or(TheoryError::MissingDirective("horizon"))?,
        atoms: Vec::new(),
        actions: Vec::new(),
    };
    ground.refresh_universe();
    Ok(ground)
}

struct Scope {
    domains: BTreeMap<String, Vec<Term>>,
    domain_pos: BTreeMap<String, Pos>,
    fluents: BTreeMap<String, Vec<String>>,
    actions: BTreeMap<String, Vec<String>>,
}

impl Scope {
    fn new(theory: &Theory) -> Result<Self, TheoryError> {
        let mut domains = BTreeMap::new();
        let mut domain_pos = BTreeMap::new();
        for decl in &theory.domains {
            let mut values = decl.values.clone();
            values.sort();
            values.dedup();
            domains.insert(decl.name.clone(), values);
            domain_pos.insert(decl.name.clone(), decl.pos);
        }
        let collect = |sigs: &[super::Signature]| -> Result<BTreeMap<String, Vec<String>>, TheoryError> {
            let mut out = BTreeMap::new();
            for sig in sigs {
                for ty in &sig.arg_types {
                    if !domains.contains_key(ty) {
                        return Err(TheoryError::UnknownType { pos: sig.pos, name: ty.clone() });
                    }
                }
                out.insert(sig.name.clone(), sig.arg_types.clone());
            }
            Ok(out)
        };
        let fluents = collect(&theory.fluents)?;
        let actions = collect(&theory.actions)?;
        Ok(Scope { domains, domain_pos, fluents, actions })
    }

    fn typer(&self, pos: Pos) -> Typer<'_> {
        Typer { scope: self, pos, types: BTreeMap::new() }
    }

    fn ground_formula(&self, literals: &[Literal], pos: Pos, what: &'static str) -> Result<ConjunctiveFormula, TheoryError> {
        let mut typer = self.typer(pos);
        typer.literals(literals)?;
        if !typer.types.is_empty() {
            return Err(TheoryError::NonGround { pos, what });
        }
        Ok(literals.iter().cloned().collect())
    }
}

/// Infers variable types for one law from the argument positions they occupy.
struct Typer<'a> {
    scope: &'a Scope,
    pos: Pos,
    types: BTreeMap<String, String>,
}

impl Typer<'_> {
    fn atom(&mut self, atom: &Atom, kind: &'static str) -> Result<(), TheoryError> {
        let decls = if kind == "action" { &self.scope.actions } else { &self.scope.fluents };
        let arg_types = decls.get(&atom.name).ok_or_else(|| TheoryError::UnknownSymbol {
            pos: self.pos,
            kind,
            name: atom.name.clone(),
        })?;
        if arg_types.len() != atom.args.len() {
            return Err(TheoryError::Arity {
                pos: self.pos,
                name: atom.name.clone(),
                expected: arg_types.len(),
                found: atom.args.len(),
            });
        }
        for (arg, ty) in atom.args.iter().zip(arg_types) {
            match arg {
                Term::Var(v) => match self.types.get(v) {
                    Some(existing) if existing != ty => {
                        return Err(TheoryError::TypeConflict {
                            pos: self.pos,
                            var: v.clone(),
                            first: existing.clone(),
                            second: ty.clone(),
                        })
                    }
                    Some(_) => {}
                    None => {
                        self.types.insert(v.clone(), ty.clone());
                    }
                },
                constant => {
                    if !self.scope.domains[ty].contains(constant) {
                        return Err(TheoryError::OutOfDomain {
                            pos: self.pos,
                            value: constant.to_string(),
                            domain: ty.clone(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    fn action(&mut self, atom: &Atom) -> Result<(), TheoryError> {
        self.atom(atom, "action")
    }

    fn literals(&mut self, literals: &[Literal]) -> Result<(), TheoryError> {
        literals.iter().try_for_each(|l| self.atom(&l.atom, "fluent"))
    }

    fn condition(&mut self, condition: &Condition) -> Result<(), TheoryError> {
        self.literals(&condition.literals)
    }

    /// All substitutions of the typed variables that satisfy `comparisons`.
    fn bindings(&self, comparisons: &[Comparison]) -> Result<Vec<Binding>, TheoryError> {
        for cmp in comparisons {
            for expr in [&cmp.lhs, &cmp.rhs] {
                if let Term::Var(v) = &expr.term {
                    if !self.types.contains_key(v) {
                        return Err(TheoryError::UnboundedVariable { pos: self.pos, var: v.clone() });
                    }
                }
            }
        }
        let mut bindings = vec![Binding::new()];
        for (var, ty) in &self.types {
            let values = &self.scope.domains[ty];
            if values.is_empty() {
                return Err(TheoryError::EmptyDomain {
                    pos: self.scope.domain_pos.get(ty).copied().unwrap_or(self.pos),
                    name: ty.clone(),
                });
            }
            bindings = bindings
                .into_iter()
                .flat_map(|b| {
                    values.iter().map(move |value| {
                        let mut next = b.clone();
                        next.insert(var.clone(), value.clone());
                        next
                    })
                })
                .collect();
        }
        let mut kept = Vec::with_capacity(bindings.len());
        for binding in bindings {
            let mut all = true;
            for cmp in comparisons {
                if !self.compare(cmp, &binding)? {
                    all = false;
                    break;
                }
            }
            if all {
                kept.push(binding);
            }
        }
        Ok(kept)
    }

    fn eval(&self, expr: &Expr, binding: &Binding) -> Result<Term, TheoryError> {
        let value = match &expr.term {
            Term::Var(v) => binding[v].clone(),
            constant => constant.clone(),
        };
        if expr.offset == 0 {
            return Ok(value);
        }
        match value {
            Term::Int(i) => Ok(Term::Int(i + expr.offset)),
            other => Err(TheoryError::NonIntegerArithmetic { pos: self.pos, term: other.to_string() }),
        }
    }

    fn compare(&self, cmp: &Comparison, binding: &Binding) -> Result<bool, TheoryError> {
        let lhs = self.eval(&cmp.lhs, binding)?;
        let rhs = self.eval(&cmp.rhs, binding)?;
        let ord = lhs.cmp(&rhs);
        Ok(match cmp.op {
            CmpOp::Lt => ord == Ordering::Less,
            CmpOp::Le => ord != Ordering::Greater,
            CmpOp::Gt => ord == Ordering::Greater,
            CmpOp::Ge => ord != Ordering::Less,
            CmpOp::Eq => ord == Ordering::Equal,
            CmpOp::Ne => ord != Ordering::Equal,
        })
    }
}

fn subst_term(term: &Term, binding: &Binding) -> Term {
    match term {
        Term::Var(v) => binding[v].clone(),
        constant => constant.clone(),
    }
}

fn subst_atom(atom: &Atom, binding: &Binding) -> Atom {
    Atom { name: atom.name.clone(), args: atom.args.iter().map(|t| subst_term(t, binding)).collect() }
}

fn subst_literal(literal: &Literal, binding: &Binding) -> Literal {
    Literal { atom: subst_atom(&literal.atom, binding), positive: literal.positive }
}
