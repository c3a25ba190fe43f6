use super::*;
use crate::fixtures;
use crate::program::{parse_program, Term};
use crate::semantics::Engine;
use crate::translate::{translate, TranslateOptions};

fn program(text: &str) -> NormalProgram {
    parse_program(&format!("#horizon 0.\n#discount 0.5.\n{text}")).unwrap()
}

fn atom(name: &str) -> GroundAtom {
    GroundAtom::new(name, vec![])
}

fn set(names: &[&str]) -> Interpretation {
    names.iter().map(|n| atom(n)).collect()
}

fn sets(all: &[Interpretation]) -> Vec<Vec<String>> {
    all.iter().map(|s| s.iter().map(ToString::to_string).collect()).collect()
}

fn all_routes(p: &NormalProgram) -> Vec<Interpretation> {
    let limits = SolverLimits::default();
    let naive = naive_answer_sets(p, &limits).unwrap();
    let sat = sat_answer_sets(p, &limits).unwrap().answer_sets;
    assert_eq!(naive, sat);
    if p.atoms().len() <= limits.max_brute_atoms {
        assert_eq!(naive, brute_force_answer_sets(p, &limits).unwrap());
    }
    naive
}

#[test]
fn reduct_drops_blocked_rules() {
    let p = program("a :- not b.\nb :- not a.\nc :- a, not d.");
    let r = reduct(&p, &set(&["a", "c"]));
    let text: Vec<String> = r.iter().map(ToString::to_string).collect();
    assert_eq!(text, ["a.", "c :- a."]);
    assert_eq!(least_model(&r), set(&["a", "c"]));
}

#[test]
fn textbook_programs() {
    assert!(all_routes(&program("a :- not a.")).is_empty());
    assert_eq!(sets(&all_routes(&program("a :- not b.\nb :- not a."))), [vec!["a"], vec!["b"]]);
    assert!(all_routes(&program("a.\n:- a.")).is_empty());
    assert_eq!(sets(&all_routes(&program("a :- b.\nb :- a."))), [Vec::<String>::new()]);
    assert_eq!(sets(&all_routes(&program("a :- not b.\nb :- not a.\n:- a."))), [vec!["b"]]);
    // p is supported only through itself once q is false.
    let p = program("p :- q.\nq :- p.\np :- not r.\nr :- not p.");
    assert_eq!(sets(&all_routes(&p)), [vec!["p", "q"], vec!["r"]]);
}

#[test]
fn is_answer_set_by_definition() {
    let p = program("a :- not b.\nb :- not a.");
    assert!(is_answer_set(&p, &set(&["a"])));
    assert!(!is_answer_set(&p, &set(&["a", "b"])));
    assert!(!is_answer_set(&p, &set(&[])));
}

#[test]
fn completion_clauses() {
    let cnf = clark_completion(&program("a :- not b.\nb :- not a."));
    assert_eq!(cnf.atom_vars, 2);
    let mut clauses = cnf.clauses.clone();
    clauses.sort();
    // a <-> -b and b <-> -a.
    assert_eq!(clauses, [vec![-1, -2], vec![-1, -2], vec![1, 2], vec![1, 2]]);

    let cnf = clark_completion(&program("a.\nb :- a, c."));
    assert_eq!(cnf.names, ["a", "b", "c", "body(a, c)"]);
    assert!(cnf.clauses.contains(&vec![1]));
    assert!(cnf.clauses.contains(&vec![-3]));
    assert!(cnf.clauses.contains(&vec![-2, 4]));
    assert!(cnf.clauses.contains(&vec![1, -4]) && cnf.clauses.contains(&vec![3, -4]));
    assert!(cnf.clauses.contains(&vec![2, -4]));
    assert!(cnf.clauses.contains(&vec![-1, -3, 4]));
}

#[test]
fn shared_bodies_share_a_variable() {
    let cnf = clark_completion(&program("a :- c, d.\nb :- c, d.\nc.\nd."));
    assert_eq!(cnf.num_vars, 5);
}

#[test]
fn tightness() {
    let t = tightness_check(&program("a :- b.\nb :- a.\nc :- not a."));
    assert!(!t.tight);
    assert_eq!(t.cycle, vec![atom("a"), atom("b")]);
    let t = tightness_check(&program("a :- not a.\nb :- a."));
    assert!(t.tight && t.cycle.is_empty());
    let t = tightness_check(&program("a :- a."));
    assert_eq!(t.cycle, vec![atom("a")]);
}

#[test]
fn loop_formula_excludes_unsupported_loop() {
    let p = program("a :- b.\nb :- a.\na :- not c.\nc :- not a.");
    let mut enc = Encoder::new(&p);
    // a, b, c are variables 1..3; the model {a, b} with c false is stable.
    assert_eq!(enc.loop_formula(&[true, true, false]), LoopCheck::Stable);
    // {a, b, c} is not a completion model, but it is self-supported.
    match enc.loop_formula(&[true, true, true]) {
        LoopCheck::Loop { atoms, clauses } => {
            assert_eq!(atoms, vec![atom("a"), atom("b")]);
            assert_eq!(clauses, vec![vec![-1, -3], vec![-2, -3]]);
        }
        LoopCheck::Stable => panic!("expected a loop"),
    }
}

#[test]
fn dpll_enumerates_each_model_once() {
    let xor = CnfFormula::new(2, vec![vec![1, 2], vec![-1, -2]]);
    assert_eq!(models(&xor, 10).unwrap(), vec![vec![false, true], vec![true, false]]);
    assert!(models(&CnfFormula::new(1, vec![vec![]]), 10).unwrap().is_empty());
    assert!(models(&CnfFormula::new(1, vec![vec![1], vec![-1]]), 10).unwrap().is_empty());
    assert_eq!(models(&CnfFormula::new(3, vec![]), 10).unwrap().len(), 8);
    assert!(matches!(models(&CnfFormula::new(3, vec![]), 5), Err(SolveError::ModelCap { cap: 5 })));
}

#[test]
fn dpll_matches_truth_tables() {
    // Pseudo-random 3-CNF over 6 variables from a fixed linear congruential sequence.
    let mut seed = 12345u64;
    let mut next = || {
        seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (seed >> 33) as i32
    };
    for _ in 0..40 {
        let n = 6;
        let clauses: Vec<Vec<i32>> = (0..12)
            .map(|_| (0..3).map(|_| (next() % n + 1) * if next() % 2 == 0 { 1 } else { -1 }).collect())
            .collect();
        let cnf = CnfFormula::new(n as usize, clauses.clone());
        let expected: Vec<Vec<bool>> = (0u32..1 << n)
            .map(|m| (0..n).map(|i| m & (1 << i) != 0).collect::<Vec<bool>>())
            .filter(|v| clauses.iter().all(|c| c.iter().any(|&l| v[l.unsigned_abs() as usize - 1] == (l > 0))))
            .collect();
        let mut got = models(&cnf, 1000).unwrap();
        got.sort();
        let mut expected = expected;
        expected.sort();
        assert_eq!(got, expected);
    }
}

#[test]
fn dimacs_text() {
    let cnf = clark_completion(&program("a."));
    assert_eq!(emit_dimacs(&cnf), "p cnf 1 1\n1 0\nc map 1 a\n");
}

#[test]
fn sat_route_reports_its_path() {
    let limits = SolverLimits::default();
    let tight = sat_answer_sets(&program("a :- not b.\nb :- not a."), &limits).unwrap();
    assert_eq!(tight.path, SatPath::Completion);
    let p = program("p :- q.\nq :- p.\np :- not r.\nr :- not p.");
    let loops = sat_answer_sets(&p, &limits).unwrap();
    assert_eq!(loops.path, SatPath::CompletionWithLoops);
    assert_eq!(loops.answer_sets.len(), 2);
}

#[test]
fn node_cap() {
    let p = program("a :- not b.\nb :- not a.\nc :- not d.\nd :- not c.");
    let limits = SolverLimits { max_nodes: 2, ..SolverLimits::default() };
    let err = naive_answer_sets(&p, &limits).unwrap_err();
    assert!(err.is_cap());
}

#[test]
fn fixtures_agree_across_routes() {
    let limits = SolverLimits::default();
    for (name, source) in fixtures::ALL {
        let theory = fixtures::load(source).unwrap();
        let p = translate(&theory, &TranslateOptions::default()).unwrap();
        let naive = naive_answer_sets(&p, &limits).unwrap();
        let sat = sat_answer_sets(&p, &limits).unwrap();
        assert_eq!(naive, sat.answer_sets, "{name}");
        let engine = Engine::new(&theory);
        let episodes = engine.enumerate_episodes(false).unwrap();
        assert_eq!(naive.len(), episodes.len(), "{name}");
    }
}

#[test]
fn coupled_fixture_needs_loop_formulas() {
    let theory = fixtures::load(fixtures::COUPLED).unwrap();
    let p = translate(&theory, &TranslateOptions::default()).unwrap();
    let out = sat_answer_sets(&p, &SolverLimits::default()).unwrap();
    assert_eq!(out.path, SatPath::CompletionWithLoops);
    assert!(!out.cycle.is_empty());
}

#[test]
fn elevator_answer_sets_are_episodes() {
    let theory = fixtures::load(fixtures::ELEVATOR).unwrap();
    let engine = Engine::new(&theory);
    let p = translate(&theory, &TranslateOptions::default()).unwrap();
    let answer_sets = naive_answer_sets(&p, &SolverLimits::default()).unwrap();
    let mut extracted: Vec<_> = answer_sets.iter().map(|s| extract_episode(s, &engine).unwrap().1).collect();
    extracted.sort();
    let expected: Vec<_> = engine.enumerate_episodes(false).unwrap().into_iter().collect();
    assert_eq!(extracted, expected);
}

#[test]
fn q_layer_folds_discounted_rewards() {
    let theory = fixtures::load(fixtures::ELEVATOR).unwrap();
    let p = translate(&theory, &TranslateOptions::default()).unwrap();
    for s in naive_answer_sets(&p, &SolverLimits::default()).unwrap() {
        let answer = AnswerSet::new(&p, s).unwrap();
        let rewards: Vec<f64> = answer.trace.reward_values().iter().map(|r| r.to_f64()).collect();
        let expected = rewards[0] + 0.9 * rewards[1];
        assert!((answer.q.final_float() - expected).abs() < 1e-12);
        assert!((answer.q.final_value().to_f64() - expected).abs() <= 2e-6);
        assert_eq!(answer.q.steps.len(), 2);
        assert_eq!(answer.q.steps[1].time, 2);
        assert_eq!(answer.q.seeds.len(), theory.actions().len());
    }
}

#[test]
fn q_layer_on_a_hand_written_program() {
    let p = parse_program(
        "#horizon 2.\n#discount 0.5.\nocc(go,0).\nocc(go,1).\nreward(2.0,go,1).\n\
         #q(go,2.0,0) :- reward(2.0,go,1), occ(go,0).\n#q(go,4.0,1) :- reward(4.0,go,2), occ(go,1).",
    )
    .unwrap();
    let s = naive_answer_sets(&p, &SolverLimits::default()).unwrap().remove(0);
    let answer = AnswerSet::new(&p, s).unwrap();
    let values: Vec<String> = answer.q.steps.iter().map(ToString::to_string).collect();
    assert_eq!(values, ["q(2.0,go,1)", "q(2.0,go,2)"]);
    assert_eq!(answer.q.notes.len(), 1);
    assert_eq!(answer.trace.to_string(), "occ(go,0), reward(2.0,go,1), occ(go,1)");
}

#[test]
fn malformed_traces_are_rejected() {
    let theory = fixtures::load(fixtures::ELEVATOR).unwrap();
    let engine = Engine::new(&theory);
    let p = translate(&theory, &TranslateOptions::default()).unwrap();
    let mut s = naive_answer_sets(&p, &SolverLimits::default()).unwrap().remove(0);
    let extra = GroundAtom::new("occ", vec![Term::Sym("close".into()), Term::Int(0)]);
    let other = GroundAtom::new("occ", vec![Term::Fn("up".into(), vec![Term::Int(2)]), Term::Int(0)]);
    s.insert(extra);
    s.insert(other);
    assert!(matches!(extract_episode(&s, &engine), Err(ExtractError::MalformedTrace { time: 0, count: 2 })));
    let mut s = naive_answer_sets(&p, &SolverLimits::default()).unwrap().remove(0);
    s.retain(|a| !(a.predicate == "holds" && a.time() == Some(2)));
    assert!(matches!(extract_episode(&s, &engine), Err(ExtractError::InvalidState { time: 2, .. })));
}
