//! One line per acceptance criterion. Run with `cargo test --test acceptance`.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use bq::check::{check_episodes, check_q_values, check_solvers, solve_program, SolvePath, FIXED_UNIT};
use bq::fixtures;
use bq::program::parse_program;
use bq::q::{argmax_sets, classic_oracle, extract_policy, q_learning_table, q_reconstruct, q_update_once, tail, Mode};
use bq::semantics::{closure, Engine};
use bq::solver::{brute_force_answer_sets, naive_answer_sets, sat_answer_sets, SolverLimits};
use bq::theory::{ActionTheory, Literal};
use bq::translate::{translate, TranslateOptions};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

const FLOAT_TOL: f64 = 1e-9;

fn load(source: &str) -> ActionTheory {
    fixtures::load(source).expect("bundled fixture loads")
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(Config { cases, failure_persistence: None, ..Config::default() }, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

type Verdict = Result<String, String>;

fn within(started: Instant, limit: Duration) -> Result<(), String> {
    let took = started.elapsed();
    if took <= limit {
        Ok(())
    } else {
        Err(format!("took {took:?}, limit {limit:?}"))
    }
}

fn criterion1() -> Verdict {
    let mut parts = Vec::new();
    for (name, source) in [("elevator", fixtures::ELEVATOR), ("gridworld", fixtures::GRIDWORLD)] {
        let started = Instant::now();
        let theory = load(source);
        let engine = Engine::new(&theory);
        let episodes = engine.enumerate_episodes(false).map_err(|e| e.to_string())?;
        let program = translate(&theory, &TranslateOptions::default()).map_err(|e| e.to_string())?;
        let (answers, _) = solve_program(&program, SolvePath::Naive, &SolverLimits::default()).map_err(|e| e.to_string())?;
        let report = check_episodes(&engine, &episodes, &answers);
        if !report.passed {
            return Err(format!("{name}: missing {:?}, spurious {:?}", report.missing, report.spurious));
        }
        within(started, Duration::from_secs(10))?;
        parts.push(format!("{name} {} episodes", report.episodes));
    }
    Ok(parts.join(", "))
}

fn criterion2() -> Verdict {
    let started = Instant::now();
    let mut compared = 0;
    for source in [fixtures::ELEVATOR, fixtures::GRIDWORLD] {
        let theory = load(source);
        let engine = Engine::new(&theory);
        let episodes = engine.enumerate_episodes(false).map_err(|e| e.to_string())?;
        let program = translate(&theory, &TranslateOptions::default()).map_err(|e| e.to_string())?;
        let (answers, _) = solve_program(&program, SolvePath::Naive, &SolverLimits::default()).map_err(|e| e.to_string())?;
        for mode in [Mode::QLearning, Mode::Sarsa] {
            let r = check_q_values(&engine, &episodes, &answers, mode).map_err(|e| e.to_string())?;
            let bound = theory.horizon as f64 * FIXED_UNIT;
            if !r.passed || r.max_float_diff > FLOAT_TOL || r.max_fixed_diff > bound + FLOAT_TOL {
                return Err(format!("{mode}: {:?}", r.mismatches));
            }
            compared += r.compared;
        }
    }
    within(started, Duration::from_secs(5))?;
    Ok(format!("{compared} values, tolerance {FLOAT_TOL:e}, fixed-point bound n*{FIXED_UNIT:e}"))
}

fn criterion3() -> Verdict {
    let started = Instant::now();
    let mut parts = Vec::new();
    for (name, source) in fixtures::ALL {
        let theory = load(source);
        if theory.atoms().len() > 18 {
            continue;
        }
        let program = translate(&theory, &TranslateOptions::default()).map_err(|e| e.to_string())?;
        let r = check_solvers(&program, &SolverLimits::default()).map_err(|e| e.to_string())?;
        if !r.passed {
            return Err(format!("{name}: {} naive, {} sat", r.naive, r.sat));
        }
        parts.push(format!("{name} {} via {}", r.naive, r.sat_path));
    }
    within(started, Duration::from_secs(30))?;
    Ok(parts.join(", "))
}

fn criterion4() -> Verdict {
    let strategy = (proptest::collection::vec(-10.0f64..10.0, 1..=6), prop::sample::select(vec![0.1, 0.5, 0.9]));
    let outcome = runner(1000).run(&strategy, |(rewards, gamma)| {
        let q0 = tail(&rewards, gamma, 0);
        for t in 0..rewards.len() {
            let got = q_reconstruct(q0, &rewards, gamma, t).expect("in range");
            let want = tail(&rewards, gamma, t);
            prop_assert!((got - want).abs() <= FLOAT_TOL, "t={} got {} want {}", t, got, want);
        }
        Ok(())
    });
    outcome.map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for (_, source) in fixtures::ALL {
        let theory = load(source);
        let engine = Engine::new(&theory);
        let episodes = engine.enumerate_episodes(false).map_err(|e| e.to_string())?;
        let table = q_learning_table(&episodes, theory.gamma).map_err(|e| e.to_string())?;
        let transitions = Engine::episode_transitions(&episodes);
        let update = q_update_once(&table, &transitions).map_err(|e| e.to_string())?;
        worst = worst.max(update.max_change);
    }
    if worst > FLOAT_TOL {
        return Err(format!("Bellman update moved the table by {worst:e}"));
    }
    Ok(format!("1000 reward vectors, update change {worst:e} <= {FLOAT_TOL:e}"))
}

fn criterion5() -> Verdict {
    let mut keys = 0;
    for source in [fixtures::ELEVATOR, fixtures::GRIDWORLD] {
        let theory = load(source);
        let engine = Engine::new(&theory);
        let episodes = engine.enumerate_episodes(false).map_err(|e| e.to_string())?;
        let direct = q_learning_table(&episodes, theory.gamma).map_err(|e| e.to_string())?;
        let oracle = classic_oracle(&engine, false).map_err(|e| e.to_string())?;
        match direct.max_abs_diff(&oracle) {
            Some(d) if d <= FLOAT_TOL => keys += direct.len(),
            Some(d) => return Err(format!("max difference {d:e}")),
            None => return Err("key sets differ".into()),
        }
    }
    Ok(format!("{keys} (state, action, depth) entries within {FLOAT_TOL:e}"))
}

fn criterion6() -> Verdict {
    let theory = load(fixtures::GRIDWORLD);
    let engine = Engine::new(&theory);
    let episodes = engine.enumerate_episodes(false).map_err(|e| e.to_string())?;
    let direct = q_learning_table(&episodes, theory.gamma).map_err(|e| e.to_string())?;
    let oracle = classic_oracle(&engine, false).map_err(|e| e.to_string())?;
    let expected = argmax_sets(&oracle);
    if argmax_sets(&direct) != expected {
        return Err("argmax sets differ".into());
    }
    let policy = extract_policy(&direct);
    for (state, set) in &expected {
        let chosen = policy.get(state).ok_or_else(|| format!("no action for {state}"))?.to_string();
        if !set.contains(&chosen) || set.iter().next() != Some(&chosen) {
            return Err(format!("{state}: chose {chosen}, argmax {set:?}"));
        }
    }
    Ok(format!("{} states", expected.len()))
}

fn criterion7() -> Verdict {
    let mut checked = 0;
    for (_, source) in fixtures::ALL {
        let theory = load(source);
        let universe: Vec<Literal> =
            theory.atoms().iter().flat_map(|a| [Literal::pos(a.clone()), Literal::neg(a.clone())]).collect();
        let strategy = (proptest::sample::subsequence(universe.clone(), 0..=universe.len().min(8)), any::<u64>());
        runner(100)
            .run(&strategy, |(lits, extra)| {
                let small: BTreeSet<Literal> = lits.iter().cloned().collect();
                let mut large = small.clone();
                large.extend(universe.iter().enumerate().filter(|(i, _)| extra >> (i % 64) & 1 == 1).map(|(_, l)| l.clone()));
                let c = closure(&theory, &small);
                prop_assert!(c.is_superset(&small));
                prop_assert_eq!(&closure(&theory, &c), &c);
                prop_assert!(closure(&theory, &large).is_superset(&c));
                Ok(())
            })
            .map_err(|e| e.to_string())?;
        let engine = Engine::new(&theory);
        let episodes = engine.enumerate_episodes(false).map_err(|e| e.to_string())?;
        for t in Engine::episode_transitions(&episodes) {
            engine.state(t.to.literals().clone()).map_err(|e| format!("{}: {e}", t.to))?;
            checked += 1;
        }
    }
    let limits = SolverLimits::default();
    for (text, count) in [("a :- not a.", 0), ("a :- not b.\nb :- not a.", 2)] {
        let p = parse_program(&format!("#horizon 0.\n#discount 0.5.\n{text}")).map_err(|e| e.to_string())?;
        let naive = naive_answer_sets(&p, &limits).map_err(|e| e.to_string())?;
        let sat = sat_answer_sets(&p, &limits).map_err(|e| e.to_string())?.answer_sets;
        let brute = brute_force_answer_sets(&p, &limits).map_err(|e| e.to_string())?;
        if naive.len() != count || sat != naive || brute != naive {
            return Err(format!("`{text}`: {} answer sets, expected {count}", naive.len()));
        }
    }
    Ok(format!("closure properties, {checked} transition outputs, textbook programs"))
}

fn criterion8() -> Verdict {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/gridworld.bq");
    let run = || {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = bq::cli::run(["bq", "check", path, "--output", "json"], &mut std::io::empty(), &mut out, &mut err);
        (code, out)
    };
    let (a, b) = (run(), run());
    if a.0 != 0 || b.0 != 0 {
        return Err(format!("exit codes {} and {}", a.0, b.0));
    }
    if a.1 != b.1 {
        return Err("reports differ".into());
    }
    Ok(format!("{} identical bytes", a.1.len()))
}

fn main() {
    type Criterion = (&'static str, fn() -> Verdict);
    let criteria: [Criterion; 8] = [
        ("episodes equal answer-set traces", criterion1),
        ("answer-set Q values equal direct estimates", criterion2),
        ("naive and SAT answer sets coincide", criterion3),
        ("online reconstruction and Bellman fixpoint", criterion4),
        ("classic Q-learning oracle agrees", criterion5),
        ("greedy policy matches the oracle", criterion6),
        ("semantics and reduct unit properties", criterion7),
        ("check reports are byte-identical", criterion8),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let verdict = f();
        let took = started.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("criterion {}: PASS {name} ({detail}) [{took:.2}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({detail}) [{took:.2}s]", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
