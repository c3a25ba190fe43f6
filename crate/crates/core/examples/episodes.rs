//! Enumerate episodes and write them as JSON lines.

use bq::fixtures;
use bq::semantics::{episodes_to_jsonl, Engine};

fn main() {
    let theory = fixtures::load(fixtures::ELEVATOR).unwrap();
    let engine = Engine::new(&theory);

    let all = engine.enumerate_episodes(false).unwrap();
    let to_goal = engine.enumerate_episodes(true).unwrap();
    println!("{} episodes of length {}, {} reach the goal", all.len(), theory.horizon, to_goal.len());

    for e in &all {
        let steps: Vec<String> = e.actions.iter().zip(&e.rewards).map(|(a, r)| format!("{a}/{r}")).collect();
        println!("  from {}: {}", e.initial_state(), steps.join(" "));
    }

    print!("\n{}", episodes_to_jsonl(&all[..2], Some(theory.gamma)));

    // Shorter horizons come for free.
    for n in 0..=3 {
        let shorter = theory.clone().with_horizon(n);
        println!("horizon {n}: {} episodes", Engine::new(&shorter).enumerate_episodes(false).unwrap().len());
    }
}
