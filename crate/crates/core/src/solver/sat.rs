use std::fmt;

use serde::Serialize;

use super::cnf::{tightness_check, Encoder, LoopCheck};
use super::dpll::Dpll;
use super::{Interpretation, SolveError, SolverLimits};
use crate::program::{GroundAtom, NormalProgram};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SatPath {
    /// Completion alone; sound because the program is tight.
    Completion,
    /// Completion plus loop formulas added on demand.
    CompletionWithLoops,
}

impl fmt::Display for SatPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SatPath::Completion => "completion",
            SatPath::CompletionWithLoops => "completion+loops",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatOutcome {
    pub answer_sets: Vec<Interpretation>,
    pub path: SatPath,
    pub loop_clauses: usize,
    pub restarts: usize,
    /// Positive cycle found by the tightness check, empty when tight.
    pub cycle: Vec<GroundAtom>,
}

/// Answer sets through the completion. Tight programs take the completion
/// models as they are; otherwise each model is tested for stability and an
/// unstable one adds a loop formula and restarts the search. Every accepted
/// model is re-checked against the reduct.
pub fn sat_answer_sets(program: &NormalProgram, limits: &SolverLimits) -> Result<SatOutcome, SolveError> {
    let tightness = tightness_check(program);
    let mut enc = Encoder::new(program);
    let atom_vars = enc.cnf().atom_vars;
    let mut found: Vec<Interpretation> = Vec::new();
    let accept = |enc: &Encoder, model: &[bool], found: &mut Vec<Interpretation>| -> Result<(), SolveError> {
        let atoms = &model[..atom_vars];
        if !enc.ix.is_answer_set(atoms) {
            return Err(SolveError::Internal("accepted model fails the reduct test".into()));
        }
        if found.len() == limits.max_models {
            return Err(SolveError::ModelCap { cap: limits.max_models });
        }
        found.push(enc.ix.interpretation(atoms));
        Ok(())
    };

    let (mut loop_clauses, mut restarts) = (0, 0);
    if tightness.tight {
        let mut solver = Dpll::new(enc.cnf());
        while let Some(m) = solver.next_model() {
            accept(&enc, &m, &mut found)?;
        }
    } else {
        'restart: loop {
            let mut solver = Dpll::new(enc.cnf());
            while let Some(m) = solver.next_model() {
                match enc.loop_formula(&m) {
                    LoopCheck::Stable => {
                        accept(&enc, &m, &mut found)?;
                        let block = (0..atom_vars).map(|i| if m[i] { -(i as i32 + 1) } else { i as i32 + 1 }).collect();
                        enc.add_clause(block);
                    }
                    LoopCheck::Loop { clauses, .. } => {
                        loop_clauses += clauses.len();
                        restarts += 1;
                        continue 'restart;
                    }
                }
            }
            break;
        }
    }
    found.sort();
    let path = if tightness.tight { SatPath::Completion } else { SatPath::CompletionWithLoops };
    Ok(SatOutcome { answer_sets: found, path, loop_clauses, restarts, cycle: tightness.cycle })
}
