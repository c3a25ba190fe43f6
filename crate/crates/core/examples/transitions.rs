//! States, closure and single transitions on the two-floor elevator.

use std::collections::BTreeSet;

use bq::fixtures;
use bq::semantics::Engine;
use bq::theory::{Atom, Literal, Term};

fn lit(name: &str, arg: Option<i64>, positive: bool) -> Literal {
    let atom = match arg {
        Some(i) => Atom::new(name, vec![Term::Int(i)]),
        None => Atom::constant(name),
    };
    if positive { Literal::pos(atom) } else { Literal::neg(atom) }
}

fn main() {
    let theory = fixtures::load(fixtures::ELEVATOR).unwrap();
    let engine = Engine::new(&theory);

    // The static law fills in current(2) from -current(1).
    let partial: BTreeSet<Literal> = [lit("current", Some(1), false)].into_iter().collect();
    let closed: Vec<String> = engine.closure(&partial).iter().map(ToString::to_string).collect();
    println!("closure of {{-current(1)}} = {{{}}}", closed.join(", "));

    println!("{} states", engine.enumerate_states().unwrap().len());

    for state in engine.initial_world_states().unwrap() {
        println!("\nfrom {state}");
        for action in engine.executable_actions(&state) {
            match engine.successor(&state, &action) {
                Ok(Some(t)) => println!("  {action} -> {} (reward {})", t.to, t.reward),
                Ok(None) => println!("  {action} is undefined here"),
                Err(e) => println!("  {action}: {e}"),
            }
        }
    }

    let s = engine.initial_world_states().unwrap().remove(0);
    let down = Atom::new("down", vec![Term::Int(1)]);
    println!("\ndown(1) executable? {}", engine.is_executable(&s, &down));
    println!("{}", engine.transition(&s, &down).unwrap_err());
}
