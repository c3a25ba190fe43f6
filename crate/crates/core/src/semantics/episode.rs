use serde::{Deserialize, Serialize};

use super::WorldState;
use crate::fixed::Fixed;
use crate::theory::Atom;

/// `s_0, a_0, r_1, s_1, ..., a_{n-1}, r_n, s_n`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Episode {
    pub states: Vec<WorldState>,
    pub actions: Vec<Atom>,
    pub rewards: Vec<Fixed>,
}

impl Episode {
    pub fn horizon(&self) -> usize {
        self.actions.len()
    }

    pub fn initial_state(&self) -> &WorldState {
        &self.states[0]
    }

    pub fn reward_values(&self) -> Vec<f64> {
        self.rewards.iter().map(|r| r.to_f64()).collect()
    }

    pub fn record(&self, q0: Option<f64>) -> EpisodeRecord {
        EpisodeRecord {
            states: self.states.iter().map(WorldState::to_strings).collect(),
            actions: self.actions.iter().map(ToString::to_string).collect(),
            rewards: self.reward_values(),
            q0,
        }
    }
}

/// One line of the episode listing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub states: Vec<Vec<String>>,
    pub actions: Vec<String>,
    pub rewards: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q0: Option<f64>,
}

/// One JSON object per line. With `gamma`, each line also carries the
/// discounted return of the episode from its initial pair.
pub fn episodes_to_jsonl(episodes: &[Episode], gamma: Option<f64>) -> String {
    let mut out = String::new();
    for e in episodes {
        let q0 = gamma.map(|g| crate::q::discounted_return(&e.reward_values(), g));
        out.push_str(&serde_json::to_string(&e.record(q0)).expect("episode records serialize"));
        out.push('\n');
    }
    out
}
