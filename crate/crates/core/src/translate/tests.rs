use super::*;
use crate::fixtures;
use crate::program::parse_program;

fn elevator() -> ActionTheory {
    fixtures::load(fixtures::ELEVATOR).unwrap()
}

fn lines(program: &NormalProgram) -> Vec<String> {
    program.rules.iter().map(ToString::to_string).collect()
}

#[test]
fn elevator_rule_shapes() {
    let program = translate(&elevator(), &TranslateOptions::default()).unwrap();
    let text = lines(&program);
    for expected in [
        "action(close).",
        "holds(on(1),0).",
        "holds(on(2),0) :- not holds(neg(on(2)),0).",
        "holds(neg(on(2)),0) :- not holds(on(2),0).",
        ":- holds(opened,1), holds(neg(opened),1).",
        "holds(opened,1) :- holds(opened,0), contrary(opened,neg(opened)), not holds(neg(opened),1).",
        "exec(close,0).",
        "holds(neg(opened),1) :- occ(close,0), exec(close,0), holds(opened,0).",
        "reward(1.0,close,1) :- occ(close,0), exec(close,0), holds(opened,0).",
        "occ(close,0) :- action(close), not abocc(close,0).",
        "abocc(close,0) :- action(close), action(up(2)), occ(up(2),0).",
        ":- occ(up(2),1), not exec(up(2),1).",
        "goal :- holds(neg(on(1)),2), holds(neg(on(2)),2).",
        "factor(0.9).",
        "q(0.0,close,0).",
        "holds(current(2),0) :- holds(neg(current(1)),0).",
    ] {
        assert!(text.iter().any(|l| l == expected), "missing `{expected}`");
    }
    let q = program.q_rules.iter().map(ToString::to_string).find(|r| r.starts_with("#q(close,1.0,1)")).unwrap();
    assert_eq!(
        q,
        "#q(close,1.0,1) :- reward(1.0,close,2), occ(close,1), exec(close,1), holds(opened,1), holds(neg(opened),2)."
    );
}

#[test]
fn facts_come_first_then_time() {
    let program = translate(&elevator(), &TranslateOptions::default()).unwrap();
    let first_rule = program.rules.iter().position(|r| !r.is_fact()).unwrap();
    assert!(program.rules[first_rule..].iter().all(|r| !r.is_fact()));
    let times: Vec<u32> = program.rules[first_rule..].iter().map(Rule::time).collect();
    assert!(times.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn every_core_category_is_used_by_the_elevator() {
    let program = translate(&elevator(), &TranslateOptions::default()).unwrap();
    let report = translation_report(&program);
    for c in Category::ALL.iter().filter(|c| c.is_core()) {
        assert!(report.count(*c) > 0, "no rules of category {c}");
    }
    assert_eq!(report.rules.len(), program.rules.len() + program.q_rules.len());
}

#[test]
fn empty_goal_and_single_action() {
    let t = fixtures::load("fluent p.\naction a.\ninitially { p }.\na causes -p : 1.0 if p.\nexecutable a if {}.\nhorizon 2.\ndiscount 0.5.\n")
        .unwrap();
    let report = translation_report(&translate(&t, &TranslateOptions::default()).unwrap());
    assert_eq!(report.count(Category::Goal), 0);
    assert_eq!(report.count(Category::Abnormal), 0);
    assert_eq!(report.count(Category::Generate), 2);
}

#[test]
fn one_effect_rule_per_effect_and_step() {
    let t = elevator();
    let program = translate(&t, &TranslateOptions::default()).unwrap();
    let report = translation_report(&program);
    let effects: usize = t.causal_laws.iter().map(|l| l.effects.len()).sum();
    assert_eq!(report.count(Category::Effect), effects * t.horizon as usize);
}

#[test]
fn time_indices_stay_in_range() {
    let t = elevator();
    let program = translate(&t, &TranslateOptions::default()).unwrap();
    for atom in program.atoms() {
        if let Some(time) = atom.time() {
            assert!(time <= t.horizon, "{atom}");
        }
    }
    for q in &program.q_rules {
        assert!(q.time < t.horizon);
    }
}

#[test]
fn negative_literals_have_contraries() {
    let program = translate(&elevator(), &TranslateOptions::default()).unwrap();
    let heads: BTreeSet<String> = program.rules.iter().filter_map(|r| r.head.as_ref()).map(ToString::to_string).collect();
    let mut negs = BTreeSet::new();
    fn collect(t: &Term, out: &mut BTreeSet<Term>) {
        if let Term::Fn(name, args) = t {
            if name == "neg" {
                out.insert(args[0].clone());
            }
            for a in args {
                collect(a, out);
            }
        }
    }
    for atom in program.atoms() {
        for a in &atom.args {
            collect(a, &mut negs);
        }
    }
    assert!(!negs.is_empty());
    for f in negs {
        assert!(heads.contains(&format!("contrary({f},neg({f}))")));
        assert!(heads.contains(&format!("contrary(neg({f}),{f})")));
    }
}

#[test]
fn text_round_trip() {
    for (name, source) in fixtures::ALL {
        let t = fixtures::load(source).unwrap();
        for options in [TranslateOptions::default(), TranslateOptions::core_only()] {
            let program = translate(&t, &options).unwrap();
            let parsed = parse_program(&program.to_text()).unwrap();
            assert_eq!(parsed, program, "{name}");
        }
    }
}

#[test]
fn core_only_drops_the_additions() {
    let program = translate(&elevator(), &TranslateOptions::core_only()).unwrap();
    let report = translation_report(&program);
    assert_eq!(report.count(Category::Static), 0);
    assert_eq!(report.count(Category::ExecEnforce), 0);
    assert_eq!(report.count(Category::Goal), 3);
    assert!(lines(&program).contains(&"reward(1.0,close,1) :- occ(close,0), exec(close,0).".to_string()));
}

#[test]
fn unmentioned_atoms_get_choices() {
    let t = fixtures::load(fixtures::GRIDWORLD).unwrap();
    let report = translation_report(&translate(&t, &TranslateOptions::default()).unwrap());
    assert_eq!(report.count(Category::InitialFact), 1);
    assert_eq!(report.count(Category::InitialPos), 8);
    let report = translation_report(&translate(&t, &TranslateOptions::core_only()).unwrap());
    assert_eq!(report.count(Category::InitialPos), 0);
}

#[test]
fn strict_initial_rejects_mixed_completions() {
    let t = fixtures::load("fluent p, q.\naction a.\ninitially { p, q } | { -p, -q }.\nexecutable a if {}.\nhorizon 1.\ndiscount 0.5.\n")
        .unwrap();
    let extra = initial_discrepancies(&t).unwrap();
    let texts: Vec<String> = extra.iter().map(ToString::to_string).collect();
    assert_eq!(texts, ["{-p, q}", "{p, -q}"]);
    let options = TranslateOptions { strict_initial: true, ..TranslateOptions::default() };
    let report = translation_report(&translate(&t, &options).unwrap());
    assert_eq!(report.count(Category::StrictInitial), 2);
}

#[test]
fn required_goal_adds_one_constraint() {
    let options = TranslateOptions { require_goal: true, ..TranslateOptions::default() };
    let program = translate(&elevator(), &options).unwrap();
    assert!(lines(&program).contains(&":- not goal.".to_string()));
}
