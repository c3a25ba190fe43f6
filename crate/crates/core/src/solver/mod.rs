//! Answer sets of ground normal programs.
//!
//! Two independent routes: a branch-and-bound search that checks every leaf
//! against the reduct, and a SAT route through the completion (with loop
//! formulas when the program is not tight). A brute-force checker over all
//! interpretations backs both on tiny programs.

mod cnf;
mod dpll;
mod qlayer;
mod sat;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::program::{GroundAtom, NormalProgram, Rule};

pub use cnf::{clark_completion, emit_dimacs, loop_formulas, tightness_check, CnfFormula, Encoder, LoopCheck, Tightness};
pub use dpll::{models, Dpll};
pub use qlayer::{evaluate_q_layer, extract_episode, AnswerSet, AnswerSetRecord, ExtractError, QAtom, QLayer, Trace};
pub use sat::{sat_answer_sets, SatOutcome, SatPath};

pub type Interpretation = BTreeSet<GroundAtom>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverLimits {
    /// Search nodes visited by the branch-and-bound route.
    pub max_nodes: usize,
    /// Atoms accepted by the brute-force checker.
    pub max_brute_atoms: usize,
    /// Models enumerated by the SAT route.
    pub max_models: usize,
}

impl Default for SolverLimits {
    fn default() -> Self {
        SolverLimits { max_nodes: 1_000_000, max_brute_atoms: 22, max_models: 100_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("search exceeded the cap of {cap} nodes")]
    NodeCap { cap: usize },
    #[error("{atoms} atoms exceed the brute-force cap of {cap}")]
    AtomCap { atoms: usize, cap: usize },
    #[error("model enumeration exceeded the cap of {cap} models")]
    ModelCap { cap: usize },
    #[error("internal check failed: {0}")]
    Internal(String),
}

impl SolveError {
    pub fn is_cap(&self) -> bool {
        !matches!(self, SolveError::Internal(_))
    }
}

/// Rules with negative bodies removed, dropping those whose negative body
/// meets `candidate`. Constraints are kept (without their negative part).
pub fn reduct(program: &NormalProgram, candidate: &Interpretation) -> Vec<Rule> {
    program
        .rules
        .iter()
        .filter(|r| r.neg.iter().all(|b| !candidate.contains(b)))
        .map(|r| Rule { head: r.head.clone(), pos: r.pos.clone(), neg: vec![], provenance: r.provenance.clone() })
        .collect()
}

/// Least model of the positive part of `rules`; constraints are ignored.
pub fn least_model(rules: &[Rule]) -> Interpretation {
    let mut model = Interpretation::new();
    loop {
        let mut changed = false;
        for r in rules {
            if let Some(h) = &r.head {
                if !model.contains(h) && r.pos.iter().all(|b| model.contains(b)) {
                    model.insert(h.clone());
                    changed = true;
                }
            }
        }
        if !changed {
            return model;
        }
    }
}

fn violates_constraint(program: &NormalProgram, s: &Interpretation) -> bool {
    program
        .rules
        .iter()
        .filter(|r| r.is_constraint())
        .any(|r| r.pos.iter().all(|b| s.contains(b)) && r.neg.iter().all(|b| !s.contains(b)))
}

/// `candidate` is the least model of its reduct and satisfies every constraint.
pub fn is_answer_set(program: &NormalProgram, candidate: &Interpretation) -> bool {
    least_model(&reduct(program, candidate)) == *candidate && !violates_constraint(program, candidate)
}

#[derive(Debug, Clone)]
pub(crate) struct IRule {
    pub head: Option<usize>,
    pub pos: Vec<usize>,
    pub neg: Vec<usize>,
}

/// A program with atoms numbered in sorted order.
#[derive(Debug, Clone)]
pub(crate) struct Indexed {
    pub atoms: Vec<GroundAtom>,
    pub rules: Vec<IRule>,
    pos_occ: Vec<Vec<usize>>,
}

impl Indexed {
    pub fn new(program: &NormalProgram) -> Self {
        let atoms: Vec<GroundAtom> = program.atoms().into_iter().collect();
        let index: BTreeMap<GroundAtom, usize> = atoms.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        let id = |a: &GroundAtom| index[a];
        let rules: Vec<IRule> = program
            .rules
            .iter()
            .map(|r| IRule {
                head: r.head.as_ref().map(id),
                pos: r.pos.iter().map(id).collect(),
                neg: r.neg.iter().map(id).collect(),
            })
            .collect();
        let mut pos_occ = vec![Vec::new(); atoms.len()];
        for (i, r) in rules.iter().enumerate() {
            for &b in &r.pos {
                pos_occ[b].push(i);
            }
        }
        Indexed { atoms, rules, pos_occ }
    }

    /// Least model of the enabled non-constraint rules, ignoring negative bodies.
    pub fn least_model(&self, enabled: impl Fn(&IRule) -> bool) -> Vec<bool> {
        let mut model = vec![false; self.atoms.len()];
        let on: Vec<bool> = self.rules.iter().map(|r| r.head.is_some() && enabled(r)).collect();
        let mut missing: Vec<usize> = self.rules.iter().map(|r| r.pos.len()).collect();
        let mut queue: Vec<usize> = (0..self.rules.len()).filter(|&i| on[i] && missing[i] == 0).collect();
        while let Some(i) = queue.pop() {
            let h = self.rules[i].head.expect("enabled rules have heads");
            if model[h] {
                continue;
            }
            model[h] = true;
            for &j in &self.pos_occ[h] {
                missing[j] -= 1;
                if on[j] && missing[j] == 0 {
                    queue.push(j);
                }
            }
        }
        model
    }

    pub fn is_answer_set(&self, model: &[bool]) -> bool {
        let least = self.least_model(|r| r.neg.iter().all(|&b| !model[b]));
        least == model
            && !self.rules.iter().any(|r| {
                r.head.is_none() && r.pos.iter().all(|&b| model[b]) && r.neg.iter().all(|&b| !model[b])
            })
    }

    pub fn interpretation(&self, model: &[bool]) -> Interpretation {
        model.iter().enumerate().filter(|(_, &v)| v).map(|(i, _)| self.atoms[i].clone()).collect()
    }
}

struct Search<'a> {
    ix: &'a Indexed,
    order: Vec<usize>,
    branchable: Vec<bool>,
    nodes: usize,
    cap: usize,
    out: Vec<Interpretation>,
}

impl Search<'_> {
    fn run(&mut self, assign: &mut [Option<bool>]) -> Result<(), SolveError> {
        self.nodes += 1;
        if self.nodes > self.cap {
            return Err(SolveError::NodeCap { cap: self.cap });
        }
        let ix = self.ix;
        let (lower, upper) = loop {
            let lower = ix.least_model(|r| r.neg.iter().all(|&b| assign[b] == Some(false)));
            let upper = ix.least_model(|r| r.neg.iter().all(|&b| assign[b] != Some(true)));
            let mut changed = false;
            for &b in &self.order {
                match assign[b] {
                    Some(true) if !upper[b] => return Ok(()),
                    Some(false) if lower[b] => return Ok(()),
                    None if lower[b] => {
                        assign[b] = Some(true);
                        changed = true;
                    }
                    None if !upper[b] => {
                        assign[b] = Some(false);
                        changed = true;
                    }
                    _ => {}
                }
            }
            let doomed = ix.rules.iter().any(|r| {
                r.head.is_none() && r.pos.iter().all(|&b| lower[b]) && r.neg.iter().all(|&b| !upper[b])
            });
            if doomed {
                return Ok(());
            }
            if !changed {
                break (lower, upper);
            }
        };
        match self.order.iter().copied().find(|&b| assign[b].is_none()) {
            None => {
                if lower != upper || !ix.is_answer_set(&lower) {
                    return Err(SolveError::Internal("leaf of the search is not an answer set".into()));
                }
                self.out.push(ix.interpretation(&lower));
                Ok(())
            }
            Some(b) => {
                debug_assert!(self.branchable[b]);
                for value in [false, true] {
                    let mut next = assign.to_vec();
                    next[b] = Some(value);
                    self.run(&mut next)?;
                }
                Ok(())
            }
        }
    }
}

/// Answer sets by branch-and-bound over the atoms that occur negated.
///
/// Each node computes the least models of the rules that are surely and
/// possibly applicable, fixes every negated atom they decide, and prunes on
/// contradiction or on a constraint that must fire. Leaves are checked
/// against the reduct. The result is sorted.
pub fn naive_answer_sets(program: &NormalProgram, limits: &SolverLimits) -> Result<Vec<Interpretation>, SolveError> {
    let ix = Indexed::new(program);
    let mut branchable = vec![false; ix.atoms.len()];
    for r in &ix.rules {
        for &b in &r.neg {
            branchable[b] = true;
        }
    }
    let mut order: Vec<usize> = (0..ix.atoms.len()).filter(|&i| branchable[i]).collect();
    order.sort_by_key(|&i| (ix.atoms[i].time().unwrap_or(0), i));
    let mut search = Search { ix: &ix, order, branchable, nodes: 0, cap: limits.max_nodes, out: Vec::new() };
    search.run(&mut vec![None; ix.atoms.len()])?;
    let mut out = search.out;
    out.sort();
    out.dedup();
    Ok(out)
}

/// Every interpretation checked against the definition. Tiny programs only.
pub fn brute_force_answer_sets(program: &NormalProgram, limits: &SolverLimits) -> Result<Vec<Interpretation>, SolveError> {
    let atoms: Vec<GroundAtom> = program.atoms().into_iter().collect();
    if atoms.len() > limits.max_brute_atoms {
        return Err(SolveError::AtomCap { atoms: atoms.len(), cap: limits.max_brute_atoms });
    }
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << atoms.len()) {
        let candidate: Interpretation =
            atoms.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, a)| a.clone()).collect();
        if is_answer_set(program, &candidate) {
            out.push(candidate);
        }
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests;
