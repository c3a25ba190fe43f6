use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use super::Interpretation;
use crate::fixed::Fixed;
use crate::program::{GroundAtom, NormalProgram, Term};
use crate::q::OnlineQ;
use crate::semantics::{Engine, Episode};
use crate::theory::{Atom, Literal};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("{count} occ atoms at time {time}, expected exactly one")]
    MalformedTrace { time: u32, count: usize },
    #[error("several rewards for the action at time {time}")]
    AmbiguousReward { time: u32 },
    #[error("time {time}: {reason}")]
    InvalidState { time: u32, reason: String },
    #[error("step {step}: {reason}")]
    NotAnEpisode { step: u32, reason: String },
}

/// `q(value, action, time)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct QAtom {
    pub value: Fixed,
    pub action: Term,
    pub time: u32,
}

impl QAtom {
    pub fn to_atom(&self) -> GroundAtom {
        GroundAtom::new("q", vec![Term::Num(self.value), self.action.clone(), Term::Int(self.time as i64)])
    }
}

impl fmt::Display for QAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_atom())
    }
}

/// Values of the Q recursion along one answer set.
#[derive(Debug, Clone, PartialEq)]
pub struct QLayer {
    pub seeds: Vec<QAtom>,
    /// `q(V_{t+1}, a_t, t+1)` for each step, in fixed point.
    pub steps: Vec<QAtom>,
    /// The same fold in floating point.
    pub float_values: Vec<f64>,
    pub notes: Vec<String>,
}

impl QLayer {
    pub fn final_value(&self) -> Fixed {
        self.steps.last().map_or(Fixed::ZERO, |q| q.value)
    }

    pub fn final_float(&self) -> f64 {
        self.float_values.last().copied().unwrap_or(0.0)
    }
}

fn at_time<'a>(atoms: &'a Interpretation, predicate: &'a str, time: u32) -> impl Iterator<Item = &'a GroundAtom> {
    atoms.iter().filter(move |a| a.predicate == predicate && a.time() == Some(time))
}

fn occurred(atoms: &Interpretation, t: u32) -> Result<Term, ExtractError> {
    let occ: Vec<&GroundAtom> = at_time(atoms, "occ", t).collect();
    match occ.as_slice() {
        [one] => Ok(one.args[0].clone()),
        _ => Err(ExtractError::MalformedTrace { time: t, count: occ.len() }),
    }
}

/// Folds `V_{t+1} = V_t + r_{t+1} gamma^t` over the steps of an answer set.
///
/// A step's reward comes from the Q rules whose bodies hold; a step where
/// none holds contributes 0 and leaves a note. Fixed-point values round each
/// product to the nearest micro-unit.
pub fn evaluate_q_layer(program: &NormalProgram, atoms: &Interpretation) -> Result<QLayer, ExtractError> {
    let seeds = atoms
        .iter()
        .filter(|a| a.predicate == "q" && a.time() == Some(0))
        .filter_map(|a| match a.args.as_slice() {
            [Term::Num(v), action, _] => Some(QAtom { value: *v, action: action.clone(), time: 0 }),
            _ => None,
        })
        .collect();
    let mut layer = QLayer { seeds, steps: Vec::new(), float_values: Vec::new(), notes: Vec::new() };
    let mut value = Fixed::ZERO;
    let mut online = OnlineQ::new(program.gamma);
    let mut power = 1.0f64;
    for t in 0..program.horizon {
        let action = occurred(atoms, t)?;
        let rewards: BTreeSet<Fixed> = program
            .q_rules
            .iter()
            .filter(|q| q.time == t && q.action == action && q.body.iter().all(|b| atoms.contains(b)))
            .map(|q| q.reward)
            .collect();
        let reward = match rewards.len() {
            0 => {
                layer.notes.push(format!("no reward for occ({action},{t}); counted as 0"));
                Fixed::ZERO
            }
            1 => *rewards.iter().next().expect("one reward"),
            _ => return Err(ExtractError::AmbiguousReward { time: t }),
        };
        let step = (reward.micros() as f64 * power).round() as i64;
        value = Fixed::from_micros(value.micros() + step);
        layer.float_values.push(online.push(reward.to_f64()).expect("no horizon set"));
        layer.steps.push(QAtom { value, action, time: t + 1 });
        power *= program.gamma;
    }
    Ok(layer)
}

/// The `occ`/`reward` sequence of an answer set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Trace {
    pub actions: Vec<Term>,
    pub rewards: Vec<Option<Fixed>>,
}

impl Trace {
    pub fn reward_values(&self) -> Vec<Fixed> {
        self.rewards.iter().map(|r| r.unwrap_or(Fixed::ZERO)).collect()
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (t, (a, r)) in self.actions.iter().zip(&self.rewards).enumerate() {
            parts.push(format!("occ({a},{t})"));
            if let Some(r) = r {
                parts.push(format!("reward({r},{a},{})", t + 1));
            }
        }
        f.write_str(&parts.join(", "))
    }
}

fn theory_atom(term: &Term) -> Option<Atom> {
    term.to_literal().filter(|l| l.positive).map(|l| l.atom)
}

/// Reads the trace and the states of an answer set and checks that they form
/// an episode of the theory behind `engine`.
pub fn extract_episode(atoms: &Interpretation, engine: &Engine<'_>) -> Result<(Trace, Episode), ExtractError> {
    let n = engine.theory().horizon;
    let mut trace = Trace { actions: Vec::new(), rewards: Vec::new() };
    for t in 0..n {
        let action = occurred(atoms, t)?;
        let rewards: BTreeSet<Fixed> = at_time(atoms, "reward", t + 1)
            .filter(|a| a.args.get(1) == Some(&action))
            .filter_map(|a| match a.args[0] {
                Term::Num(r) => Some(r),
                _ => None,
            })
            .collect();
        if rewards.len() > 1 {
            return Err(ExtractError::AmbiguousReward { time: t + 1 });
        }
        trace.actions.push(action);
        trace.rewards.push(rewards.into_iter().next());
    }

    let mut states = Vec::new();
    for t in 0..=n {
        let literals: BTreeSet<Literal> = at_time(atoms, "holds", t).filter_map(|a| a.args[0].to_literal()).collect();
        let state = engine
            .state(literals)
            .map_err(|e| ExtractError::InvalidState { time: t, reason: e.to_string() })?;
        states.push(state);
    }

    let mut actions = Vec::new();
    for (t, term) in trace.actions.iter().enumerate() {
        let step = t as u32;
        let action =
            theory_atom(term).ok_or_else(|| ExtractError::NotAnEpisode { step, reason: format!("`{term}` is not an action") })?;
        let next = engine
            .transition(&states[t], &action)
            .map_err(|e| ExtractError::NotAnEpisode { step, reason: e.to_string() })?;
        if next.to != states[t + 1] {
            return Err(ExtractError::NotAnEpisode {
                step,
                reason: format!("`{action}` leads to {}, the answer set has {}", next.to, states[t + 1]),
            });
        }
        if next.reward != trace.reward_values()[t] {
            return Err(ExtractError::NotAnEpisode {
                step,
                reason: format!("`{action}` pays {}, the answer set has {}", next.reward, trace.reward_values()[t]),
            });
        }
        actions.push(action);
    }
    let episode = Episode { states, actions, rewards: trace.reward_values() };
    Ok((trace, episode))
}

/// An answer set with its trace and Q layer.
#[derive(Debug, Clone, PartialEq)]
pub struct AnswerSet {
    pub atoms: Interpretation,
    pub trace: Trace,
    pub q: QLayer,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnswerSetRecord {
    pub atoms: Vec<String>,
    pub trace: String,
    pub q_values: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl AnswerSet {
    pub fn new(program: &NormalProgram, atoms: Interpretation) -> Result<Self, ExtractError> {
        let q = evaluate_q_layer(program, &atoms)?;
        let mut trace = Trace { actions: Vec::new(), rewards: Vec::new() };
        for (t, step) in q.steps.iter().enumerate() {
            let reward = at_time(&atoms, "reward", t as u32 + 1)
                .filter(|a| a.args.get(1) == Some(&step.action))
                .find_map(|a| match a.args[0] {
                    Term::Num(r) => Some(r),
                    _ => None,
                });
            trace.actions.push(step.action.clone());
            trace.rewards.push(reward);
        }
        Ok(AnswerSet { atoms, trace, q })
    }

    /// Program atoms together with the derived Q atoms, sorted.
    pub fn atoms_with_q(&self) -> Interpretation {
        let mut all = self.atoms.clone();
        all.extend(self.q.steps.iter().map(QAtom::to_atom));
        all
    }

    pub fn record(&self) -> AnswerSetRecord {
        AnswerSetRecord {
            atoms: self.atoms_with_q().iter().map(ToString::to_string).collect(),
            trace: self.trace.to_string(),
            q_values: self.q.seeds.iter().chain(&self.q.steps).map(ToString::to_string).collect(),
            notes: self.q.notes.clone(),
        }
    }
}
