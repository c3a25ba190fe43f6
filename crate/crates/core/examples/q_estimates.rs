//! Q-learning and SARSA estimates from the episode set, and the greedy policy.

use bq::fixtures;
use bq::q::{classic_oracle, extract_policy, q_learning_table, sarsa_table};
use bq::semantics::Engine;

fn main() {
    let theory = fixtures::load(fixtures::GRIDWORLD).unwrap();
    let engine = Engine::new(&theory);
    let episodes = engine.enumerate_episodes(false).unwrap();

    let table = q_learning_table(&episodes, theory.gamma).unwrap();
    println!("Q-learning, depth 0:");
    for e in table.to_entries().iter().filter(|e| e.depth == Some(0)) {
        println!("  {} -> {:.4}", e.action, e.value);
    }

    // Same numbers from tabular updates with learning rate 1.
    let oracle = classic_oracle(&engine, false).unwrap();
    println!("max |direct - oracle| = {:e}", table.max_abs_diff(&oracle).unwrap());

    let sarsa = sarsa_table(&episodes, theory.gamma).unwrap();
    let best = sarsa.episodes.iter().max_by(|a, b| a.q0.total_cmp(&b.q0)).unwrap();
    println!("SARSA: {} episodes, best q0 = {:.4} (episode {})", sarsa.episodes.len(), best.q0, best.index);

    println!("policy:");
    for entry in extract_policy(&table).to_entries() {
        let at = entry.state.iter().find(|l| !l.starts_with('-')).cloned().unwrap_or_default();
        println!("  {at:10} {}", entry.action);
    }
}
