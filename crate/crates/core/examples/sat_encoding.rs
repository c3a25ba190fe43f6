//! Completion, tightness and loop formulas on a program with a positive cycle.

use bq::fixtures;
use bq::program::parse_program;
use bq::solver::{clark_completion, emit_dimacs, models, sat_answer_sets, tightness_check, Encoder, LoopCheck, SolverLimits};
use bq::translate::{translate, TranslateOptions};

fn main() {
    let p = parse_program("#horizon 0.\n#discount 0.5.\na :- b.\nb :- a.\nc :- not a.").unwrap();
    let t = tightness_check(&p);
    let cycle: Vec<String> = t.cycle.iter().map(ToString::to_string).collect();
    println!("tight: {} (cycle {})", t.tight, cycle.join(" -> "));

    let cnf = clark_completion(&p);
    print!("{}", emit_dimacs(&cnf));
    let completion_models = models(&cnf, 100).unwrap();
    println!("{} completion models", completion_models.len());

    let mut encoder = Encoder::new(&p);
    for m in &completion_models {
        match encoder.loop_formula(m) {
            LoopCheck::Stable => println!("  {:?} is stable", &m[..cnf.atom_vars]),
            LoopCheck::Loop { atoms, clauses } => {
                let names: Vec<String> = atoms.iter().map(ToString::to_string).collect();
                println!("  {:?} unfounded loop {{{}}}, clauses {clauses:?}", &m[..cnf.atom_vars], names.join(", "));
            }
        }
    }
    let out = sat_answer_sets(&p, &SolverLimits::default()).unwrap();
    println!("answer sets: {} after {} restarts", out.answer_sets.len(), out.restarts);

    let coupled = fixtures::load(fixtures::COUPLED).unwrap();
    let program = translate(&coupled, &TranslateOptions::default()).unwrap();
    let out = sat_answer_sets(&program, &SolverLimits::default()).unwrap();
    println!(
        "coupled fixture: {} answer sets via {}, {} loop clauses",
        out.answer_sets.len(),
        out.path,
        out.loop_clauses
    );
}
