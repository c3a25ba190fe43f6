use std::collections::{BTreeMap, BTreeSet};

use super::{QError, QKey, QTable};
use crate::semantics::{Engine, Transition, WorldState};
use crate::theory::Atom;

pub type SuccessorIndex = BTreeMap<(WorldState, Atom), (WorldState, f64)>;

pub fn successor_index(transitions: &[Transition]) -> SuccessorIndex {
    transitions
        .iter()
        .map(|t| ((t.from.clone(), t.action.clone()), (t.to.clone(), t.reward.to_f64())))
        .collect()
}

fn best_at(table: &QTable, state: &WorldState, depth: usize) -> Option<f64> {
    let lo = QKey { state: state.clone(), action: Atom::constant(""), depth: 0 };
    table
        .entries
        .range(lo..)
        .take_while(|(k, _)| &k.state == state)
        .filter(|(k, _)| k.depth == depth)
        .map(|(_, &v)| v)
        .reduce(f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct UpdateOutcome {
    pub table: QTable,
    pub max_change: f64,
}

/// One Bellman pass `Q(s_t, a_t) = r + gamma * max_a Q(s_{t+1}, a)` over every
/// key of depth at least 1, reading successor values from the input table.
pub fn q_update_once(table: &QTable, transitions: &[Transition]) -> Result<UpdateOutcome, QError> {
    let index = successor_index(transitions);
    let mut updated = table.clone();
    let mut max_change = 0.0f64;
    if transitions.is_empty() {
        return Ok(UpdateOutcome { table: updated, max_change });
    }
    for (key, value) in updated.entries.iter_mut() {
        if key.depth == 0 {
            continue;
        }
        let (next, reward) = index.get(&(key.state.clone(), key.action.clone())).ok_or_else(|| {
            QError::MissingTransition { state: key.state.to_string(), action: key.action.to_string() }
        })?;
        let future = if key.depth + 1 >= table.horizon {
            0.0
        } else {
            best_at(table, next, key.depth + 1)
                .ok_or_else(|| QError::MissingSuccessor { state: next.to_string(), depth: key.depth + 1 })?
        };
        let fresh = reward + table.gamma * future;
        max_change = max_change.max((fresh - *value).abs());
        *value = fresh;
    }
    Ok(UpdateOutcome { table: updated, max_change })
}

/// Tabular Q-learning with learning rate 1 over the enumerated MDP, swept
/// until no entry changes.
///
/// Only states reachable at each depth take part, and only pairs whose
/// successor can still complete a full-length run get an entry.
pub fn classic_oracle(engine: &Engine<'_>, require_goal: bool) -> Result<QTable, QError> {
    let theory = engine.theory();
    let n = theory.horizon as usize;
    let gamma = theory.gamma;

    let mut layer: BTreeSet<WorldState> = engine.initial_world_states()?.into_iter().collect();
    let mut edges: Vec<Vec<(WorldState, Atom, WorldState, f64)>> = Vec::with_capacity(n);
    for _ in 0..n {
        let mut next_layer = BTreeSet::new();
        let mut here = Vec::new();
        for state in &layer {
            for action in engine.executable_actions(state) {
                if let Some(step) = engine.successor(state, &action)? {
                    next_layer.insert(step.to.clone());
                    here.push((state.clone(), action, step.to, step.reward.to_f64()));
                }
            }
        }
        edges.push(here);
        layer = next_layer;
    }
    let terminal_ok = |s: &WorldState| !require_goal || s.satisfies(&theory.goal);

    let mut table = QTable::new(gamma, n);
    loop {
        let mut changed = false;
        for (depth, layer_edges) in edges.iter().enumerate() {
            for (state, action, next, reward) in layer_edges {
                let future = if depth + 1 == n {
                    terminal_ok(next).then_some(0.0)
                } else {
                    best_at(&table, next, depth + 1)
                };
                if let Some(future) = future {
                    let value = reward + gamma * future;
                    let key = QKey { state: state.clone(), action: action.clone(), depth };
                    if table.entries.get(&key) != Some(&value) {
                        table.entries.insert(key, value);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return Ok(table);
        }
    }
}
