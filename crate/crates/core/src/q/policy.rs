use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::QTable;
use crate::semantics::WorldState;
use crate::theory::Atom;

/// Values closer than this count as tied.
pub const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Policy {
    pub choice: BTreeMap<WorldState, Atom>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PolicyEntry {
    pub state: Vec<String>,
    pub action: String,
}

impl Policy {
    pub fn len(&self) -> usize {
        self.choice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.choice.is_empty()
    }

    pub fn get(&self, state: &WorldState) -> Option<&Atom> {
        self.choice.get(state)
    }

    /// Entries ordered by canonical state text.
    pub fn to_entries(&self) -> Vec<PolicyEntry> {
        let mut out: Vec<(String, PolicyEntry)> = self
            .choice
            .iter()
            .map(|(s, a)| (s.to_string(), PolicyEntry { state: s.to_strings(), action: a.to_string() }))
            .collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out.into_iter().map(|(_, e)| e).collect()
    }
}

/// Per state, the texts of every action within [`TIE_TOLERANCE`] of the best
/// depth-collapsed value.
pub fn argmax_sets(table: &QTable) -> BTreeMap<WorldState, BTreeSet<String>> {
    let mut by_state: BTreeMap<WorldState, Vec<(String, f64)>> = BTreeMap::new();
    for ((state, action), value) in table.collapsed() {
        by_state.entry(state).or_default().push((action.to_string(), value));
    }
    by_state
        .into_iter()
        .map(|(state, values)| {
            let best = values.iter().map(|(_, v)| *v).fold(f64::NEG_INFINITY, f64::max);
            let set = values.into_iter().filter(|(_, v)| best - v <= TIE_TOLERANCE).map(|(a, _)| a).collect();
            (state, set)
        })
        .collect()
}

/// Greedy policy; ties go to the lexicographically smallest action text.
pub fn extract_policy(table: &QTable) -> Policy {
    let mut texts: BTreeMap<String, Atom> = BTreeMap::new();
    for key in table.entries.keys() {
        texts.entry(key.action.to_string()).or_insert_with(|| key.action.clone());
    }
    let choice = argmax_sets(table)
        .into_iter()
        .filter_map(|(state, set)| {
            let first = set.into_iter().next()?;
            Some((state, texts[&first].clone()))
        })
        .collect();
    Policy { choice }
}
