//! A small domain written from scratch and run through the whole pipeline.
//!
//! A robot fetches coffee: it must be in the kitchen to pick up a cup and in
//! the office to deliver it. Moving costs a little, delivering pays.

use bq::check::{check_theory, CheckConfig};
use bq::q::{extract_policy, q_learning_table};
use bq::semantics::Engine;
use bq::theory::{ground_theory, parse_theory};

const ROBOT: &str = "
domain room = {kitchen, office}.
fluent at(room), holding, delivered.
action go(room), pick, deliver.

initially { at(office), -at(kitchen), -holding, -delivered }.

go(R) causes at(R), -at(S) : -0.1 if at(S), R != S.
pick causes holding : 0.0 if at(kitchen), -holding.
deliver causes delivered, -holding : 5.0 if at(office), holding.

executable go(R) if at(S), R != S.
executable pick if at(kitchen), -holding.
executable deliver if at(office), holding.

goal delivered.
horizon 4.
discount 0.95.
";

fn main() {
    let theory = ground_theory(&parse_theory(ROBOT).unwrap()).unwrap();
    let engine = Engine::new(&theory);
    let episodes = engine.enumerate_episodes(true).unwrap();
    println!("{} episodes deliver the coffee", episodes.len());
    for e in &episodes {
        let plan: Vec<String> = e.actions.iter().map(ToString::to_string).collect();
        println!("  {}", plan.join(", "));
    }

    let table = q_learning_table(&episodes, theory.gamma).unwrap();
    for entry in extract_policy(&table).to_entries() {
        println!("{{{}}} -> {}", entry.state.join(", "), entry.action);
    }

    let report = check_theory(&theory, &CheckConfig::default()).unwrap();
    print!("{}", report.to_text());
}
