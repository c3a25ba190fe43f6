//! Parse a theory with variables, ground it and print the canonical form.
//!
//! ```bash
//! cargo run --example parse_and_ground
//! ```

use bq::theory::{parse_theory, validate_source};

const SOURCE: &str = "
domain floor = 1..3.
fluent on(floor), current(floor), opened.
action up(floor), close.

initially { current(1), on(3), -on(1), -on(2), -current(2), -current(3), -opened }.

up(N) causes current(N), -current(M), -on(N), opened : 1.0 if on(N), current(M), -opened, M != N.
close causes -opened : 1.0 if opened.

executable up(N) if current(M), M < N.
executable close if {}.

goal -on(3).
horizon 2.
discount 0.9.
";

fn main() {
    let theory = parse_theory(SOURCE).expect("syntax");
    let (ground, report) = validate_source(&theory).expect("grounding");
    for issue in &report.issues {
        println!("% {issue}");
    }
    println!("{} fluent atoms, {} actions", ground.atoms().len(), ground.actions().len());
    println!("{} causal laws after grounding", ground.causal_laws.len());
    print!("{}", ground.pretty());

    // Errors carry a position.
    let err = parse_theory("fluent p.\ninitially { q }.").map(|t| validate_source(&t)).unwrap_err();
    println!("\nrejected: {err}");
}
