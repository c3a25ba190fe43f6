use std::collections::BTreeSet;

use proptest::prelude::*;

use super::*;
use crate::fixed::Fixed;
use crate::fixtures;
use crate::semantics::Engine;
use crate::theory::{Literal, Term};

fn state(tag: i64) -> WorldState {
    let atom = Atom::new("s", vec![Term::Int(tag)]);
    WorldState::from_set_unchecked([Literal::pos(atom)].into_iter().collect())
}

fn episode(states: &[i64], actions: &[&str], rewards: &[&str]) -> Episode {
    Episode {
        states: states.iter().map(|&s| state(s)).collect(),
        actions: actions.iter().map(|a| Atom::constant(*a)).collect(),
        rewards: rewards.iter().map(|r| r.parse::<Fixed>().unwrap()).collect(),
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9
}

#[test]
fn single_episode_value() {
    let e = episode(&[0, 1, 2], &["a", "b"], &["1", "2"]);
    let table = q_learning_table(&[e], 0.5).unwrap();
    assert!(close(table.get(&state(0), &Atom::constant("a"), 0).unwrap(), 2.0));
    assert!(close(table.get(&state(1), &Atom::constant("b"), 1).unwrap(), 2.0));
    assert_eq!(table.len(), 2);
}

#[test]
fn tail_at_horizon_is_zero() {
    assert_eq!(tail(&[1.0, 2.0, 3.0], 0.9, 3), 0.0);
}

#[test]
fn shared_pair_takes_the_max() {
    let a = episode(&[0, 1], &["a"], &["2"]);
    let b = episode(&[0, 2], &["a"], &["3"]);
    let table = q_learning_table(&[a, b], 0.9).unwrap();
    assert_eq!(table.get(&state(0), &Atom::constant("a"), 0), Some(3.0));
}

#[test]
fn input_errors() {
    assert_eq!(q_learning_table(&[], 0.5), Err(QError::Empty));
    let a = episode(&[0, 1], &["a"], &["2"]);
    let b = episode(&[0, 1, 2], &["a", "a"], &["2", "1"]);
    assert_eq!(q_learning_table(&[a.clone(), b], 0.5), Err(QError::MixedHorizons { expected: 1, found: 2 }));
    assert_eq!(q_learning_table(&[a], 1.0), Err(QError::BadDiscount(1.0)));
}

#[test]
fn sarsa_keeps_every_episode() {
    let a = episode(&[0, 1, 2], &["a", "b"], &["1", "2"]);
    let b = episode(&[0, 1, 3], &["a", "c"], &["1", "4"]);
    let table = sarsa_table(&[a, b], 0.5).unwrap();
    assert_eq!(table.episodes.len(), 2);
    assert!(close(table.episodes[0].q0, 2.0));
    assert!(close(table.episodes[1].q0, 3.0));
    assert!(close(table.episodes[1].values[1], 4.0));
    let agg = table.max_aggregate();
    assert!(close(agg.get(&state(0), &Atom::constant("a"), 0).unwrap(), 3.0));
}

#[test]
fn anchored_sums_differ_after_the_first_step() {
    let e = episode(&[0, 1, 2], &["a", "b"], &["1", "2"]);
    let t = q_learning_table_anchored(&[e], 0.5).unwrap();
    assert!(close(t.get(&state(0), &Atom::constant("a"), 0).unwrap(), 2.0));
    assert!(close(t.get(&state(1), &Atom::constant("b"), 1).unwrap(), 1.0));
}

#[test]
fn discount_schedule() {
    let s = DiscountSchedule::new(0.9, 3);
    assert_eq!(s.powers(), &[1.0, 0.9, 0.9 * 0.9, 0.9 * 0.9 * 0.9]);
}

#[test]
fn online_fold() {
    let q = OnlineQ::new(0.5);
    assert_eq!(q.value(), 0.0);
    let mut q = OnlineQ::with_horizon(0.5, 2);
    q.push(1.0).unwrap();
    assert_eq!(q.push(2.0).unwrap(), 2.0);
    assert_eq!(q.push(3.0), Err(QError::RewardAfterEnd { horizon: 2 }));
    let mut q = OnlineQ::new(0.9);
    assert_eq!(q.push(5.0).unwrap(), 5.0);
}

#[test]
fn reconstruction_examples() {
    assert!(close(q_reconstruct(2.0, &[1.0, 2.0], 0.5, 1).unwrap(), 2.0));
    assert!(close(q_reconstruct(2.0, &[1.0, 2.0], 0.5, 2).unwrap(), 0.0));
    for r in [-3.0, 0.0, 7.25] {
        assert!(close(q_reconstruct(r, &[r], 0.9, 1).unwrap(), 0.0));
    }
    assert_eq!(q_reconstruct(2.0, &[1.0], 0.5, 2), Err(QError::StepOutOfRange { t: 2, len: 1 }));
}

fn fixture_tables(source: &str) -> (QTable, Vec<crate::semantics::Transition>, QTable) {
    let theory = fixtures::load(source).unwrap();
    let engine = Engine::new(&theory);
    let episodes = engine.enumerate_episodes(false).unwrap();
    let direct = q_learning_table(&episodes, theory.gamma).unwrap();
    let oracle = classic_oracle(&engine, false).unwrap();
    (direct, Engine::episode_transitions(&episodes), oracle)
}

#[test]
fn direct_table_is_a_bellman_fixpoint() {
    for (name, source) in fixtures::ALL {
        let (direct, transitions, _) = fixture_tables(source);
        let outcome = q_update_once(&direct, &transitions).unwrap();
        assert!(outcome.max_change <= 1e-9, "{name}: {}", outcome.max_change);
    }
}

#[test]
fn update_at_last_step_is_the_reward() {
    let e = episode(&[0, 1, 2], &["a", "b"], &["1", "2"]);
    let mut table = q_learning_table(std::slice::from_ref(&e), 0.5).unwrap();
    let key = QKey { state: state(1), action: Atom::constant("b"), depth: 1 };
    table.entries.insert(key.clone(), 100.0);
    let transitions = Engine::episode_transitions(&[e]);
    let outcome = q_update_once(&table, &transitions).unwrap();
    assert_eq!(outcome.table.entries[&key], 2.0);
    assert_eq!(outcome.max_change, 98.0);

    let unchanged = q_update_once(&table, &[]).unwrap();
    assert_eq!(unchanged.table, table);
    assert_eq!(unchanged.max_change, 0.0);
}

#[test]
fn oracle_agrees_with_direct_table() {
    for (name, source) in fixtures::ALL {
        let (direct, _, oracle) = fixture_tables(source);
        let diff = direct.max_abs_diff(&oracle);
        assert!(diff.is_some_and(|d| d <= 1e-9), "{name}: {diff:?}");
    }
}

#[test]
fn oracle_with_horizon_one_is_the_immediate_reward() {
    let theory = fixtures::load(fixtures::GRIDWORLD).unwrap().with_horizon(1);
    let engine = Engine::new(&theory);
    let oracle = classic_oracle(&engine, false).unwrap();
    let values: BTreeSet<String> = oracle.entries.values().map(|v| v.to_string()).collect();
    assert_eq!(values, ["-1".to_string()].into_iter().collect());
    assert_eq!(oracle.len(), 2);
}

#[test]
fn elevator_values() {
    let (direct, _, _) = fixture_tables(fixtures::ELEVATOR);
    let theory = fixtures::load(fixtures::ELEVATOR).unwrap();
    let engine = Engine::new(&theory);
    let called = engine.initial_world_states().unwrap().into_iter().find(|s| s.to_string().contains(" on(2)")).unwrap();
    let up = Atom::new("up", vec![Term::Int(2)]);
    assert!(close(direct.get(&called, &up, 0).unwrap(), 1.9));
    assert!(close(direct.get(&called, &Atom::constant("close"), 0).unwrap(), 0.9));
    assert_eq!(extract_policy(&direct).get(&called), Some(&up));
}

fn table_of(values: &[(&str, f64)]) -> QTable {
    let mut t = QTable::new(0.9, 1);
    for (a, v) in values {
        t.entries.insert(QKey { state: state(0), action: Atom::constant(*a), depth: 0 }, *v);
    }
    t
}

#[test]
fn policy_examples() {
    assert_eq!(extract_policy(&table_of(&[("close", -4.0)])).get(&state(0)), Some(&Atom::constant("close")));
    let mut t = table_of(&[("close", 1.0)]);
    let up = Atom::new("up", vec![Term::Int(2)]);
    t.entries.insert(QKey { state: state(0), action: up.clone(), depth: 0 }, 3.0);
    assert_eq!(extract_policy(&t).get(&state(0)), Some(&up));
    t.entries.insert(QKey { state: state(0), action: Atom::constant("close"), depth: 0 }, 3.0);
    assert_eq!(extract_policy(&t).get(&state(0)), Some(&Atom::constant("close")));
    assert_eq!(argmax_sets(&t)[&state(0)].len(), 2);
}

#[test]
fn scaling_rewards_scales_values() {
    let theory = fixtures::load(fixtures::GRIDWORLD).unwrap();
    let episodes = Engine::new(&theory).enumerate_episodes(false).unwrap();
    let base = q_learning_table(&episodes, theory.gamma).unwrap();
    for c in [2i64, 3, 7] {
        let scaled: Vec<Episode> = episodes
            .iter()
            .map(|e| Episode { rewards: e.rewards.iter().map(|r| r.checked_mul_int(c).unwrap()).collect(), ..e.clone() })
            .collect();
        let table = q_learning_table(&scaled, theory.gamma).unwrap();
        for (key, v) in &base.entries {
            assert!((table.entries[key] - c as f64 * v).abs() <= 1e-9);
        }
        assert_eq!(argmax_sets(&table), argmax_sets(&base));
    }
}

#[test]
fn values_grow_with_the_horizon_when_rewards_are_nonnegative() {
    let mut previous: Option<QTable> = None;
    for n in 1..=3 {
        let theory = fixtures::load(fixtures::ELEVATOR).unwrap().with_horizon(n);
        let episodes = Engine::new(&theory).enumerate_episodes(false).unwrap();
        let table = q_learning_table(&episodes, theory.gamma).unwrap();
        if let Some(prev) = &previous {
            for (key, v) in &prev.entries {
                if key.depth == 0 {
                    assert!(table.entries[key] + 1e-12 >= *v);
                }
            }
        }
        previous = Some(table);
    }
}

proptest! {
    #[test]
    fn reconstruction_matches_the_tail(
        micros in prop::collection::vec(-10_000_000i64..=10_000_000, 1..=6),
        g in prop::sample::select(vec![0.1, 0.5, 0.9]),
    ) {
        let rewards: Vec<f64> = micros.iter().map(|&m| Fixed::from_micros(m).to_f64()).collect();
        let mut online = OnlineQ::with_horizon(g, rewards.len());
        for &r in &rewards {
            online.push(r).unwrap();
        }
        let q0 = online.value();
        prop_assert!((q0 - tail(&rewards, g, 0)).abs() <= 1e-9);
        for t in 1..=rewards.len() {
            let got = q_reconstruct(q0, &rewards, g, t).unwrap();
            prop_assert!((got - tail(&rewards, g, t)).abs() <= 1e-9, "t={} got={} want={}", t, got, tail(&rewards, g, t));
        }
    }
}
