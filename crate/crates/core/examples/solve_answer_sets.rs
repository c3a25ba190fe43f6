//! Answer sets by both routes, their Q atoms, and the episodes they encode.

use bq::fixtures;
use bq::semantics::Engine;
use bq::solver::{extract_episode, naive_answer_sets, sat_answer_sets, AnswerSet, SolverLimits};
use bq::translate::{translate, TranslateOptions};

fn main() {
    let theory = fixtures::load(fixtures::ELEVATOR).unwrap();
    let engine = Engine::new(&theory);
    let program = translate(&theory, &TranslateOptions::default()).unwrap();
    let limits = SolverLimits::default();

    let naive = naive_answer_sets(&program, &limits).unwrap();
    let sat = sat_answer_sets(&program, &limits).unwrap();
    println!("{} answer sets; SAT route via {} agrees: {}", naive.len(), sat.path, naive == sat.answer_sets);

    for atoms in naive {
        let answer = AnswerSet::new(&program, atoms).unwrap();
        let (_, episode) = extract_episode(&answer.atoms, &engine).unwrap();
        println!("{}", answer.trace);
        println!("  start {}  final {}", episode.initial_state(), answer.q.steps.last().unwrap());
    }
}
