//! Translation of ground action theories into normal logic programs whose
//! answer sets are the episodes of the theory.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::fixed::Fixed;
use crate::program::{Category, GroundAtom, NormalProgram, QRule, Rule, Term};
use crate::semantics::{Engine, SemanticsError, WorldState};
use crate::theory::{ActionTheory, Atom, ConjunctiveFormula, Literal};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TranslateOptions {
    /// Adds `:- occ(A,T), not exec(A,T).`
    pub enforce_exec: bool,
    /// Puts the law condition into the body of reward rules.
    pub reward_condition: bool,
    /// Emits one rule per static law and time step.
    pub static_laws: bool,
    /// Emits the goal rule for the last time step only.
    pub goal_at_horizon: bool,
    /// Gives atoms that no initial description mentions a choice at time 0.
    pub complete_unmentioned: bool,
    /// Adds `:- not goal.` when the goal is nonempty.
    pub require_goal: bool,
    /// Rejects time-0 completions that are not initial states.
    pub strict_initial: bool,
}

impl Default for TranslateOptions {
    fn default() -> Self {
        TranslateOptions {
            enforce_exec: true,
            reward_condition: true,
            static_laws: true,
            goal_at_horizon: true,
            complete_unmentioned: true,
            require_goal: false,
            strict_initial: false,
        }
    }
}

impl TranslateOptions {
    /// The base rules alone, with every addition switched off.
    pub fn core_only() -> Self {
        TranslateOptions {
            enforce_exec: false,
            reward_condition: false,
            static_laws: false,
            goal_at_horizon: false,
            complete_unmentioned: false,
            require_goal: false,
            strict_initial: false,
        }
    }
}

fn sym(a: &Atom) -> Term {
    Term::from_theory_atom(a)
}

fn at(predicate: &str, subject: Term, t: u32) -> GroundAtom {
    GroundAtom::new(predicate, vec![subject, Term::Int(t as i64)])
}

fn holds_all(formula: &ConjunctiveFormula, t: u32) -> Vec<GroundAtom> {
    formula.iter().map(|l| GroundAtom::holds(l, t)).collect()
}

fn gamma_term(gamma: f64) -> Term {
    let text = crate::program::format_real(gamma);
    let fixed = text.parse::<Fixed>().unwrap_or_else(|_| Fixed::from_micros((gamma * 1e6).round() as i64));
    Term::Num(fixed)
}

/// The literals shared by all initial descriptions, and the atoms on which
/// they disagree.
pub fn initial_split(theory: &ActionTheory) -> (BTreeSet<Literal>, BTreeSet<Atom>) {
    let mut union: BTreeSet<Literal> = BTreeSet::new();
    let mut common: Option<BTreeSet<Literal>> = None;
    for f in &theory.initial_states {
        union.extend(f.iter().cloned());
        common = Some(match common {
            None => f.literals().clone(),
            Some(c) => c.intersection(f.literals()).cloned().collect(),
        });
    }
    let common = common.unwrap_or_default();
    let contested = union.difference(&common).map(|l| l.atom.clone()).collect();
    (common, contested)
}

/// Complete, closed states that contain every shared initial literal but are
/// not initial states. These are the extra time-0 states the choice rules
/// admit.
pub fn initial_discrepancies(theory: &ActionTheory) -> Result<Vec<WorldState>, SemanticsError> {
    let engine = Engine::new(theory);
    let (common, _) = initial_split(theory);
    let initial: BTreeSet<WorldState> = engine.initial_world_states()?.into_iter().collect();
    Ok(engine
        .enumerate_states()?
        .into_iter()
        .filter(|s| common.is_subset(s.literals()) && !initial.contains(s))
        .collect())
}

pub fn translate(theory: &ActionTheory, options: &TranslateOptions) -> Result<NormalProgram, SemanticsError> {
    let n = theory.horizon;
    let mut rules: Vec<Rule> = Vec::new();
    let mut q_rules: Vec<QRule> = Vec::new();
    let actions = theory.actions();
    let atoms = theory.atoms();

    for a in actions {
        rules.push(Rule::fact(GroundAtom::new("action", vec![sym(a)])).tagged(Category::Action, None));
    }
    for f in atoms {
        let pos = Literal::pos(f.clone());
        let (p, q) = (Term::from_literal(&pos), Term::from_literal(&pos.complement()));
        let atom_fact = GroundAtom::new("atom", vec![p.clone()]);
        rules.push(Rule::fact(atom_fact.clone()).tagged(Category::Atom, None));
        let derived = [
            (GroundAtom::new("literal", vec![p.clone()]), Category::Literal),
            (GroundAtom::new("literal", vec![q.clone()]), Category::NegLiteral),
            (GroundAtom::new("contrary", vec![p.clone(), q.clone()]), Category::Contrary),
            (GroundAtom::new("contrary", vec![q, p]), Category::ContraryNeg),
        ];
        for (head, category) in derived {
            rules.push(Rule::new(Some(head), vec![atom_fact.clone()], vec![]).tagged(category, None));
        }
    }
    rules.push(Rule::fact(GroundAtom::new("factor", vec![gamma_term(theory.gamma)])).tagged(Category::Factor, None));

    let (common, contested) = initial_split(theory);
    let mentioned: BTreeSet<&Atom> = common.iter().map(|l| &l.atom).chain(&contested).collect();
    for l in &common {
        rules.push(Rule::fact(GroundAtom::holds(l, 0)).tagged(Category::InitialFact, Some("initially".into())));
    }
    let mut choices: BTreeSet<Atom> = contested.clone();
    if options.complete_unmentioned {
        choices.extend(atoms.iter().filter(|f| !mentioned.contains(f)).cloned());
    }
    for f in &choices {
        let l = Literal::pos(f.clone());
        let (hp, hn) = (GroundAtom::holds(&l, 0), GroundAtom::holds(&l.complement(), 0));
        rules.push(Rule::new(Some(hp.clone()), vec![], vec![hn.clone()]).tagged(Category::InitialPos, Some("initially".into())));
        rules.push(Rule::new(Some(hn), vec![], vec![hp]).tagged(Category::InitialNeg, Some("initially".into())));
    }
    if options.strict_initial {
        for state in initial_discrepancies(theory)? {
            let body = state.literals().iter().map(|l| GroundAtom::holds(l, 0)).collect();
            rules.push(Rule::new(None, body, vec![]).tagged(Category::StrictInitial, Some(state.to_string())));
        }
    }

    if options.static_laws {
        for law in &theory.static_laws {
            for t in 0..=n {
                let head = GroundAtom::holds(&law.head, t);
                rules.push(
                    Rule::new(Some(head), holds_all(&law.condition, t), vec![])
                        .tagged(Category::Static, Some(law.to_string())),
                );
            }
        }
    }

    for t in 0..n {
        for law in &theory.executability_laws {
            rules.push(
                Rule::new(Some(at("exec", sym(&law.action), t)), holds_all(&law.condition, t), vec![])
                    .tagged(Category::Exec, Some(law.to_string())),
            );
        }
        for law in &theory.causal_laws {
            let a = sym(&law.action);
            let trigger = vec![at("occ", a.clone(), t), at("exec", a.clone(), t)];
            let mut body = trigger.clone();
            body.extend(holds_all(&law.condition, t));
            for l in law.effects.iter() {
                rules.push(
                    Rule::new(Some(GroundAtom::holds(l, t + 1)), body.clone(), vec![])
                        .tagged(Category::Effect, Some(law.to_string())),
                );
            }
            let reward = GroundAtom::new("reward", vec![Term::Num(law.reward), a.clone(), Term::Int(t as i64 + 1)]);
            let reward_body = if options.reward_condition { body.clone() } else { trigger };
            rules.push(
                Rule::new(Some(reward.clone()), reward_body, vec![]).tagged(Category::Reward, Some(law.to_string())),
            );
            let mut q_body = vec![reward];
            q_body.extend(body);
            q_body.extend(holds_all(&law.effects, t + 1));
            q_rules.push(QRule {
                action: a,
                reward: law.reward,
                time: t,
                body: q_body,
                provenance: Some(crate::program::Provenance {
                    category: Category::QValue,
                    source: Some(law.to_string()),
                }),
            });
        }
        for f in atoms {
            for l in [Literal::pos(f.clone()), Literal::neg(f.clone())] {
                let (lt, lc) = (Term::from_literal(&l), Term::from_literal(&l.complement()));
                rules.push(
                    Rule::new(
                        Some(GroundAtom::holds(&l, t + 1)),
                        vec![GroundAtom::holds(&l, t), GroundAtom::new("contrary", vec![lt, lc])],
                        vec![GroundAtom::holds(&l.complement(), t + 1)],
                    )
                    .tagged(Category::Inertia, None),
                );
            }
        }
        for a in actions {
            let action = GroundAtom::new("action", vec![sym(a)]);
            rules.push(
                Rule::new(Some(at("occ", sym(a), t)), vec![action.clone()], vec![at("abocc", sym(a), t)])
                    .tagged(Category::Generate, None),
            );
            for b in actions.iter().filter(|b| *b != a) {
                rules.push(
                    Rule::new(
                        Some(at("abocc", sym(a), t)),
                        vec![action.clone(), GroundAtom::new("action", vec![sym(b)]), at("occ", sym(b), t)],
                        vec![],
                    )
                    .tagged(Category::Abnormal, None),
                );
            }
            if options.enforce_exec {
                rules.push(
                    Rule::new(None, vec![at("occ", sym(a), t)], vec![at("exec", sym(a), t)])
                        .tagged(Category::ExecEnforce, None),
                );
            }
        }
    }
    for a in actions {
        let seed = GroundAtom::new("q", vec![Term::Num(Fixed::ZERO), sym(a), Term::Int(0)]);
        rules.push(Rule::fact(seed).tagged(Category::QValue, None));
    }

    for t in 0..=n {
        for f in atoms {
            let l = Literal::pos(f.clone());
            rules.push(
                Rule::new(None, vec![GroundAtom::holds(&l, t), GroundAtom::holds(&l.complement(), t)], vec![])
                    .tagged(Category::Consistency, None),
            );
        }
    }

    if !theory.goal.is_empty() {
        let times: Vec<u32> = if options.goal_at_horizon { vec![n] } else { (0..=n).collect() };
        for t in times {
            rules.push(
                Rule::new(Some(GroundAtom::new("goal", vec![])), holds_all(&theory.goal, t), vec![])
                    .tagged(Category::Goal, Some(format!("goal {}.", theory.goal))),
            );
        }
        if options.require_goal {
            rules.push(Rule::new(None, vec![], vec![GroundAtom::new("goal", vec![])]).tagged(Category::GoalRequired, None));
        }
    }

    let mut program = NormalProgram { rules, q_rules, horizon: n, gamma: theory.gamma };
    program.canonicalize();
    Ok(program)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CategoryCount {
    pub category: String,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuleOrigin {
    pub rule: String,
    pub category: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TranslationReport {
    pub counts: Vec<CategoryCount>,
    pub rules: Vec<RuleOrigin>,
}

impl TranslationReport {
    pub fn count(&self, category: Category) -> usize {
        let label = category.label();
        self.counts.iter().find(|c| c.category == label).map_or(0, |c| c.count)
    }
}

/// Counts per category (every category listed, zeros included) and the
/// origin of every rule. Q rules count towards their category together with
/// the seed facts.
pub fn translation_report(program: &NormalProgram) -> TranslationReport {
    let mut counts: BTreeMap<Category, usize> = Category::ALL.iter().map(|&c| (c, 0)).collect();
    let mut rules = Vec::new();
    for r in &program.rules {
        if let Some(p) = &r.provenance {
            *counts.entry(p.category).or_default() += 1;
            rules.push(RuleOrigin { rule: r.to_string(), category: p.category.label().to_string(), source: p.source.clone() });
        }
    }
    for q in &program.q_rules {
        if let Some(p) = &q.provenance {
            *counts.entry(p.category).or_default() += 1;
            rules.push(RuleOrigin { rule: q.to_string(), category: p.category.label().to_string(), source: p.source.clone() });
        }
    }
    let counts = Category::ALL
        .iter()
        .map(|c| CategoryCount { category: c.label().to_string(), count: counts[c] })
        .collect();
    TranslationReport { counts, rules }
}

#[cfg(test)]
mod tests;
