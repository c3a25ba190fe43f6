//! Q-value estimates computed from episode sets.
//!
//! Tails are re-anchored at the step they start from:
//! `Q(s_t, a_t) = sum_{i=t}^{n-1} gamma^(i-t) r_{i+1}`. Keys carry the depth
//! `t` because the value of a pair depends on how many steps remain.

mod online;
mod oracle;
mod policy;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::semantics::{Episode, WorldState};
use crate::theory::Atom;

pub use online::{q_reconstruct, Compensated, OnlineQ};
pub use oracle::{classic_oracle, q_update_once, successor_index, UpdateOutcome};
pub use policy::{argmax_sets, extract_policy, Policy, PolicyEntry, TIE_TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    QLearning,
    Sarsa,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "qlearning" | "q-learning" => Ok(Mode::QLearning),
            "sarsa" => Ok(Mode::Sarsa),
            other => Err(format!("unknown mode `{other}` (expected qlearning or sarsa)")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::QLearning => "qlearning",
            Mode::Sarsa => "sarsa",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QError {
    #[error("no episodes to estimate from")]
    Empty,
    #[error("episodes have different horizons ({expected} and {found})")]
    MixedHorizons { expected: usize, found: usize },
    #[error("reward received after the episode ended at step {horizon}")]
    RewardAfterEnd { horizon: usize },
    #[error("step {t} is outside an episode of {len} rewards")]
    StepOutOfRange { t: usize, len: usize },
    #[error("discount {0} is not in (0, 1)")]
    BadDiscount(f64),
    #[error("no transition recorded for `{action}` in {state}")]
    MissingTransition { state: String, action: String },
    #[error("no successor entries at depth {depth} for {state}")]
    MissingSuccessor { state: String, depth: usize },
    #[error(transparent)]
    Semantics(#[from] crate::semantics::SemanticsError),
}

/// `gamma^0 ... gamma^n`, each obtained from the previous by one multiplication.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscountSchedule {
    gamma: f64,
    powers: Vec<f64>,
}

impl DiscountSchedule {
    pub fn new(gamma: f64, n: usize) -> Self {
        let mut powers = Vec::with_capacity(n + 1);
        powers.push(1.0);
        for t in 0..n {
            powers.push(powers[t] * gamma);
        }
        DiscountSchedule { gamma, powers }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn power(&self, t: usize) -> f64 {
        self.powers[t]
    }

    pub fn powers(&self) -> &[f64] {
        &self.powers
    }
}

/// `sum_{t} gamma^t r_{t+1}`: the value of an episode from its initial pair.
pub fn discounted_return(rewards: &[f64], gamma: f64) -> f64 {
    tail(rewards, gamma, 0)
}

/// Re-anchored tail `sum_{i=t}^{n-1} gamma^(i-t) r_{i+1}`; 0 when `t = n`.
pub fn tail(rewards: &[f64], gamma: f64, t: usize) -> f64 {
    let schedule = DiscountSchedule::new(gamma, rewards.len());
    let mut sum = Compensated::default();
    for (k, r) in rewards[t..].iter().enumerate() {
        sum.add(schedule.power(k) * r);
    }
    sum.value()
}

/// Start-anchored tail `sum_{i=t}^{n-1} gamma^i r_{i+1}`, as the definition
/// is printed before re-anchoring.
pub fn anchored_tail(rewards: &[f64], gamma: f64, t: usize) -> f64 {
    let schedule = DiscountSchedule::new(gamma, rewards.len());
    let mut sum = Compensated::default();
    for (i, r) in rewards.iter().enumerate().skip(t) {
        sum.add(schedule.power(i) * r);
    }
    sum.value()
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QKey {
    pub state: WorldState,
    pub action: Atom,
    pub depth: usize,
}

/// Depth-indexed table of estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    pub gamma: f64,
    pub horizon: usize,
    pub entries: BTreeMap<QKey, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QEntry {
    pub state: Vec<String>,
    pub action: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    pub value: f64,
}

impl QTable {
    pub fn new(gamma: f64, horizon: usize) -> Self {
        QTable { gamma, horizon, entries: BTreeMap::new() }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, state: &WorldState, action: &Atom, depth: usize) -> Option<f64> {
        self.entries.get(&QKey { state: state.clone(), action: action.clone(), depth }).copied()
    }

    /// Keeps the larger of the stored and the offered value.
    pub fn offer(&mut self, key: QKey, value: f64) {
        self.entries.entry(key).and_modify(|v| *v = v.max(value)).or_insert(value);
    }

    /// One value per `(state, action)`: the maximum over depths.
    pub fn collapsed(&self) -> BTreeMap<(WorldState, Atom), f64> {
        let mut out: BTreeMap<(WorldState, Atom), f64> = BTreeMap::new();
        for (key, &value) in &self.entries {
            out.entry((key.state.clone(), key.action.clone()))
                .and_modify(|v| *v = v.max(value))
                .or_insert(value);
        }
        out
    }

    /// Largest absolute difference, or `None` when the key sets differ.
    pub fn max_abs_diff(&self, other: &QTable) -> Option<f64> {
        if self.entries.len() != other.entries.len() {
            return None;
        }
        let mut worst = 0.0f64;
        for (key, a) in &self.entries {
            let b = other.entries.get(key)?;
            worst = worst.max((a - b).abs());
        }
        Some(worst)
    }

    /// Depth-indexed entries ordered by state text, then action, then depth.
    pub fn to_entries(&self) -> Vec<QEntry> {
        let mut out: Vec<(String, QEntry)> = self
            .entries
            .iter()
            .map(|(k, &value)| {
                let entry = QEntry {
                    state: k.state.to_strings(),
                    action: k.action.to_string(),
                    depth: Some(k.depth),
                    value,
                };
                (k.state.to_string(), entry)
            })
            .collect();
        out.sort_by(|a, b| (&a.0, &a.1.action, a.1.depth).cmp(&(&b.0, &b.1.action, b.1.depth)));
        out.into_iter().map(|(_, e)| e).collect()
    }

    pub fn to_collapsed_entries(&self) -> Vec<QEntry> {
        let mut out: Vec<(String, QEntry)> = self
            .collapsed()
            .into_iter()
            .map(|((state, action), value)| {
                let entry = QEntry { state: state.to_strings(), action: action.to_string(), depth: None, value };
                (state.to_string(), entry)
            })
            .collect();
        out.sort_by(|a, b| (&a.0, &a.1.action).cmp(&(&b.0, &b.1.action)));
        out.into_iter().map(|(_, e)| e).collect()
    }
}

/// Per-episode SARSA values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SarsaEpisode {
    pub index: usize,
    pub initial_state: Vec<String>,
    pub initial_action: Option<String>,
    /// `values[t]` is the re-anchored tail at step `t`.
    pub values: Vec<f64>,
    pub q0: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SarsaTable {
    pub gamma: f64,
    pub horizon: usize,
    pub episodes: Vec<SarsaEpisode>,
    keys: Vec<Vec<QKey>>,
}

impl SarsaTable {
    /// Max over episodes per key. Offered for convenience; SARSA itself
    /// assigns values per episode.
    pub fn max_aggregate(&self) -> QTable {
        let mut table = QTable::new(self.gamma, self.horizon);
        for (keys, episode) in self.keys.iter().zip(&self.episodes) {
            for (key, &value) in keys.iter().zip(&episode.values) {
                table.offer(key.clone(), value);
            }
        }
        table
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Estimate {
    QLearning(QTable),
    Sarsa(SarsaTable),
}

fn check_episodes(episodes: &[Episode], gamma: f64) -> Result<usize, QError> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(QError::BadDiscount(gamma));
    }
    let first = episodes.first().ok_or(QError::Empty)?.horizon();
    for e in episodes {
        if e.horizon() != first {
            return Err(QError::MixedHorizons { expected: first, found: e.horizon() });
        }
    }
    Ok(first)
}

fn keys_of(e: &Episode) -> Vec<QKey> {
    (0..e.horizon())
        .map(|t| QKey { state: e.states[t].clone(), action: e.actions[t].clone(), depth: t })
        .collect()
}

/// Q-learning estimate: the best re-anchored tail over all episodes that
/// pass through `(s, a)` at depth `t`.
pub fn q_learning_table(episodes: &[Episode], gamma: f64) -> Result<QTable, QError> {
    let n = check_episodes(episodes, gamma)?;
    let mut table = QTable::new(gamma, n);
    for e in episodes {
        let rewards = e.reward_values();
        for (t, key) in keys_of(e).into_iter().enumerate() {
            table.offer(key, tail(&rewards, gamma, t));
        }
    }
    Ok(table)
}

/// Like [`q_learning_table`] with start-anchored sums.
pub fn q_learning_table_anchored(episodes: &[Episode], gamma: f64) -> Result<QTable, QError> {
    let n = check_episodes(episodes, gamma)?;
    let mut table = QTable::new(gamma, n);
    for e in episodes {
        let rewards = e.reward_values();
        for (t, key) in keys_of(e).into_iter().enumerate() {
            table.offer(key, anchored_tail(&rewards, gamma, t));
        }
    }
    Ok(table)
}

pub fn sarsa_table(episodes: &[Episode], gamma: f64) -> Result<SarsaTable, QError> {
    let n = check_episodes(episodes, gamma)?;
    let mut out = Vec::with_capacity(episodes.len());
    let mut keys = Vec::with_capacity(episodes.len());
    for (index, e) in episodes.iter().enumerate() {
        let rewards = e.reward_values();
        let values: Vec<f64> = (0..n).map(|t| tail(&rewards, gamma, t)).collect();
        out.push(SarsaEpisode {
            index,
            initial_state: e.initial_state().to_strings(),
            initial_action: e.actions.first().map(ToString::to_string),
            q0: tail(&rewards, gamma, 0),
            values,
        });
        keys.push(keys_of(e));
    }
    Ok(SarsaTable { gamma, horizon: n, episodes: out, keys })
}

pub fn q_direct(episodes: &[Episode], gamma: f64, mode: Mode) -> Result<Estimate, QError> {
    match mode {
        Mode::QLearning => q_learning_table(episodes, gamma).map(Estimate::QLearning),
        Mode::Sarsa => sarsa_table(episodes, gamma).map(Estimate::Sarsa),
    }
}

#[cfg(test)]
mod tests;
