//! Direct semantics of ground action theories.
//!
//! States are complete, consistent sets of literals closed under the static
//! laws. A transition applies the direct effects of every causal law whose
//! condition holds, keeps everything else by inertia and closes the result.
//! Episodes are the length-`horizon` paths through this transition system
//! starting from the completed initial states.

mod episode;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::fixed::Fixed;
use crate::theory::{ActionTheory, Atom, CausalLaw, ConjunctiveFormula, Literal};

pub use episode::{episodes_to_jsonl, Episode, EpisodeRecord};

/// A complete, consistent and closed set of literals in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WorldState(BTreeSet<Literal>);

impl WorldState {
    pub fn literals(&self) -> &BTreeSet<Literal> {
        &self.0
    }

    pub fn contains(&self, literal: &Literal) -> bool {
        self.0.contains(literal)
    }

    pub fn satisfies(&self, formula: &ConjunctiveFormula) -> bool {
        formula.holds_in(&self.0)
    }

    /// Literal texts in canonical order.
    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(ToString::to_string).collect()
    }

    #[cfg(test)]
    pub(crate) fn from_set_unchecked(set: BTreeSet<Literal>) -> Self {
        WorldState(set)
    }
}

impl fmt::Display for WorldState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.to_strings().join(", "))
    }
}

/// One step `s, a, r, s'` of the transition system.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub from: WorldState,
    pub action: Atom,
    pub to: WorldState,
    pub reward: Fixed,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("action `{action}` is not executable in {state}")]
    NotExecutable { action: Atom, state: WorldState },
    #[error("action `{action}` has fired effects demanding both `{literal}` and its complement")]
    ConflictingEffects { action: Atom, literal: Literal },
    #[error("executing `{action}` closes to an inconsistent set containing `{literal}` and its complement")]
    InconsistentSuccessor { action: Atom, literal: Literal },
    #[error("action `{action}` fires laws with different rewards: {rewards}")]
    MultipleRewards { action: Atom, rewards: String },
    #[error("{atoms} ground atoms exceed the state enumeration cap of {cap}")]
    StateCapExceeded { atoms: usize, cap: usize },
    #[error("episode enumeration exceeded the cap of {cap} nodes")]
    NodeCapExceeded { cap: usize },
    #[error("initial description #{index} has no complete, consistent, closed completion")]
    NoCompletion { index: usize },
    #[error("not a state: {0}")]
    InvalidState(String),
}

impl SemanticsError {
    /// Whether the error means "the successor is not a state" rather than a
    /// malformed theory or an exhausted resource.
    pub fn is_undefined_transition(&self) -> bool {
        matches!(self, SemanticsError::ConflictingEffects { .. } | SemanticsError::InconsistentSuccessor { .. })
    }

    pub fn is_cap(&self) -> bool {
        matches!(self, SemanticsError::StateCapExceeded { .. } | SemanticsError::NodeCapExceeded { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest number of free atoms enumerated by brute force.
    pub max_state_atoms: usize,
    /// Largest number of search nodes visited while enumerating episodes.
    pub max_nodes: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_state_atoms: 20, max_nodes: 1_000_000 }
    }
}

/// Least superset of `literals` satisfying every static law of `theory`.
///
/// The result may be inconsistent; callers decide what that means.
pub fn closure(theory: &ActionTheory, literals: &BTreeSet<Literal>) -> BTreeSet<Literal> {
    let mut set = literals.clone();
    loop {
        let mut changed = false;
        for law in &theory.static_laws {
            if !set.contains(&law.head) && law.condition.holds_in(&set) {
                set.insert(law.head.clone());
                changed = true;
            }
        }
        if !changed {
            return set;
        }
    }
}

/// Evaluator for one ground theory, with per-action law indexes.
pub struct Engine<'a> {
    theory: &'a ActionTheory,
    causal: BTreeMap<&'a Atom, Vec<&'a CausalLaw>>,
    executable: BTreeMap<&'a Atom, Vec<&'a ConjunctiveFormula>>,
    limits: Limits,
}

impl<'a> Engine<'a> {
    pub fn new(theory: &'a ActionTheory) -> Self {
        Self::with_limits(theory, Limits::default())
    }

    pub fn with_limits(theory: &'a ActionTheory, limits: Limits) -> Self {
        let mut causal: BTreeMap<&Atom, Vec<&CausalLaw>> = BTreeMap::new();
        for law in &theory.causal_laws {
            causal.entry(&law.action).or_default().push(law);
        }
        let mut executable: BTreeMap<&Atom, Vec<&ConjunctiveFormula>> = BTreeMap::new();
        for law in &theory.executability_laws {
            executable.entry(&law.action).or_default().push(&law.condition);
        }
        Engine { theory, causal, executable, limits }
    }

    pub fn theory(&self) -> &'a ActionTheory {
        self.theory
    }

    pub fn limits(&self) -> Limits {
        self.limits
    }

    pub fn closure(&self, literals: &BTreeSet<Literal>) -> BTreeSet<Literal> {
        closure(self.theory, literals)
    }

    fn is_closed(&self, set: &BTreeSet<Literal>) -> bool {
        self.theory.static_laws.iter().all(|law| set.contains(&law.head) || !law.condition.holds_in(set))
    }

    /// Checks the state invariants and wraps `literals` as a [`WorldState`].
    pub fn state(&self, literals: BTreeSet<Literal>) -> Result<WorldState, SemanticsError> {
        for atom in self.theory.atoms() {
            let pos = literals.contains(&Literal::pos(atom.clone()));
            let neg = literals.contains(&Literal::neg(atom.clone()));
            match (pos, neg) {
                (true, true) => return Err(SemanticsError::InvalidState(format!("both `{atom}` and `-{atom}`"))),
                (false, false) => return Err(SemanticsError::InvalidState(format!("`{atom}` is undetermined"))),
                _ => {}
            }
        }
        if literals.len() != self.theory.atoms().len() {
            return Err(SemanticsError::InvalidState("literal over an undeclared atom".into()));
        }
        if !self.is_closed(&literals) {
            return Err(SemanticsError::InvalidState("not closed under the static laws".into()));
        }
        Ok(WorldState(literals))
    }

    /// Every complete assignment of `free` on top of `fixed` that is closed.
    fn completions(&self, fixed: &BTreeSet<Literal>, free: &[&Atom]) -> Result<Vec<WorldState>, SemanticsError> {
        if free.len() > self.limits.max_state_atoms {
            return Err(SemanticsError::StateCapExceeded { atoms: free.len(), cap: self.limits.max_state_atoms });
        }
        let mut out = Vec::new();
        for mask in 0u64..(1u64 << free.len()) {
            let mut set = fixed.clone();
            for (bit, atom) in free.iter().enumerate() {
                let positive = mask & (1 << bit) != 0;
                set.insert(Literal { atom: (*atom).clone(), positive });
            }
            if self.is_closed(&set) {
                out.push(WorldState(set));
            }
        }
        out.sort();
        Ok(out)
    }

    /// All states of the theory, by brute force over the ground atoms.
    pub fn enumerate_states(&self) -> Result<Vec<WorldState>, SemanticsError> {
        let free: Vec<&Atom> = self.theory.atoms().iter().collect();
        self.completions(&BTreeSet::new(), &free)
    }

    /// Every state extending some declared initial description.
    pub fn initial_world_states(&self) -> Result<Vec<WorldState>, SemanticsError> {
        let mut all = BTreeSet::new();
        for (index, formula) in self.theory.initial_states.iter().enumerate() {
            if !formula.is_consistent() {
                return Err(SemanticsError::NoCompletion { index: index + 1 });
            }
            let free: Vec<&Atom> = self
                .theory
                .atoms()
                .iter()
                .filter(|a| {
                    !formula.contains(&Literal::pos((*a).clone())) && !formula.contains(&Literal::neg((*a).clone()))
                })
                .collect();
            let states = self.completions(formula.literals(), &free)?;
            if states.is_empty() {
                return Err(SemanticsError::NoCompletion { index: index + 1 });
            }
            all.extend(states);
        }
        Ok(all.into_iter().collect())
    }

    pub fn is_executable(&self, state: &WorldState, action: &Atom) -> bool {
        self.executable
            .get(action)
            .is_some_and(|conditions| conditions.iter().any(|c| state.satisfies(c)))
    }

    /// Actions with some executability law whose condition holds, sorted.
    pub fn executable_actions(&self, state: &WorldState) -> Vec<Atom> {
        self.executable
            .iter()
            .filter(|(_, conditions)| conditions.iter().any(|c| state.satisfies(c)))
            .map(|(action, _)| (*action).clone())
            .collect()
    }

    /// Executes `action` in `state`.
    pub fn transition(&self, state: &WorldState, action: &Atom) -> Result<Transition, SemanticsError> {
        if !self.is_executable(state, action) {
            return Err(SemanticsError::NotExecutable { action: action.clone(), state: state.clone() });
        }
        let fired: Vec<&CausalLaw> = self
            .causal
            .get(action)
            .map(|laws| laws.iter().copied().filter(|law| state.satisfies(&law.condition)).collect())
            .unwrap_or_default();

        let mut effects = BTreeSet::new();
        for law in &fired {
            for literal in law.effects.iter() {
                effects.insert(literal.clone());
            }
        }
        if let Some(literal) = effects.iter().find(|l| effects.contains(&l.complement())) {
            return Err(SemanticsError::ConflictingEffects { action: action.clone(), literal: literal.clone() });
        }
        let rewards: BTreeSet<Fixed> = fired.iter().map(|law| law.reward).collect();
        if rewards.len() > 1 {
            let text = rewards.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ");
            return Err(SemanticsError::MultipleRewards { action: action.clone(), rewards: text });
        }
        let reward = rewards.into_iter().next().unwrap_or(Fixed::ZERO);

        let mut direct: BTreeSet<Literal> =
            state.literals().iter().filter(|l| !effects.contains(&l.complement())).cloned().collect();
        direct.extend(effects);
        let next = self.closure(&direct);
        if let Some(literal) = next.iter().find(|l| l.positive && next.contains(&l.complement())) {
            return Err(SemanticsError::InconsistentSuccessor { action: action.clone(), literal: literal.clone() });
        }
        Ok(Transition { from: state.clone(), action: action.clone(), to: WorldState(next), reward })
    }

    /// Like [`transition`](Self::transition), but an undefined successor is `None`.
    pub fn successor(&self, state: &WorldState, action: &Atom) -> Result<Option<Transition>, SemanticsError> {
        match self.transition(state, action) {
            Ok(t) => Ok(Some(t)),
            Err(e) if e.is_undefined_transition() => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// All episodes of exactly `horizon` steps, in canonical order.
    ///
    /// Prefixes that reach a state with no executable action (or whose only
    /// continuations are undefined) are not episodes. With `require_goal`,
    /// episodes whose last state misses the goal are dropped as well.
    pub fn enumerate_episodes(&self, require_goal: bool) -> Result<Vec<Episode>, SemanticsError> {
        let mut out = BTreeSet::new();
        let mut nodes = 0usize;
        for initial in self.initial_world_states()? {
            let mut path = Episode { states: vec![initial], actions: Vec::new(), rewards: Vec::new() };
            self.extend(&mut path, require_goal, &mut nodes, &mut out)?;
        }
        Ok(out.into_iter().collect())
    }

    fn extend(
        &self,
        path: &mut Episode,
        require_goal: bool,
        nodes: &mut usize,
        out: &mut BTreeSet<Episode>,
    ) -> Result<(), SemanticsError> {
        *nodes += 1;
        if *nodes > self.limits.max_nodes {
            return Err(SemanticsError::NodeCapExceeded { cap: self.limits.max_nodes });
        }
        let current = path.states.last().expect("episode has an initial state").clone();
        if path.actions.len() == self.theory.horizon as usize {
            if !require_goal || current.satisfies(&self.theory.goal) {
                out.insert(path.clone());
            }
            return Ok(());
        }
        for action in self.executable_actions(&current) {
            if let Some(step) = self.successor(&current, &action)? {
                path.states.push(step.to);
                path.actions.push(step.action);
                path.rewards.push(step.reward);
                self.extend(path, require_goal, nodes, out)?;
                path.states.pop();
                path.actions.pop();
                path.rewards.pop();
            }
        }
        Ok(())
    }

    /// Every distinct step used by `episodes`.
    pub fn episode_transitions(episodes: &[Episode]) -> Vec<Transition> {
        let mut set = BTreeSet::new();
        for e in episodes {
            for t in 0..e.actions.len() {
                set.insert(Transition {
                    from: e.states[t].clone(),
                    action: e.actions[t].clone(),
                    to: e.states[t + 1].clone(),
                    reward: e.rewards[t],
                });
            }
        }
        set.into_iter().collect()
    }
}
