use super::*;

fn atom(p: &str, args: Vec<Term>) -> GroundAtom {
    GroundAtom::new(p, args)
}

#[test]
fn fact_and_constraint_text() {
    assert_eq!(Rule::fact(atom("action", vec![Term::Sym("close".into())])).to_string(), "action(close).");
    let opened = Literal::pos(theory::Atom::constant("opened"));
    let rule = Rule::new(None, vec![GroundAtom::holds(&opened, 1), GroundAtom::holds(&opened.complement(), 1)], vec![]);
    assert_eq!(rule.to_string(), ":- holds(opened,1), holds(neg(opened),1).");
}

#[test]
fn literal_terms_round_trip() {
    let on1 = theory::Atom::new("on", vec![theory::Term::Int(1)]);
    for l in [Literal::pos(on1.clone()), Literal::neg(on1)] {
        assert_eq!(Term::from_literal(&l).to_literal(), Some(l));
    }
    assert_eq!(Term::Num("-1.5".parse().unwrap()).to_string(), "-1.5");
}

#[test]
fn categories_are_labelled() {
    assert!(Category::Action.is_core() && Category::Goal.is_core());
    assert!(!Category::Static.is_core());
    assert_eq!(Category::ALL.iter().filter(|c| c.is_core()).count(), 17);
    for c in Category::ALL {
        assert_eq!(Category::from_label(c.label()), Some(c));
    }
}

#[test]
fn text_round_trip() {
    let mut program = NormalProgram {
        rules: vec![
            Rule::new(Some(atom("a", vec![])), vec![], vec![atom("b", vec![])]).tagged(Category::Generate, None),
            Rule::fact(atom("reward", vec![Term::Num("-1.0".parse().unwrap()), Term::Sym("east".into()), Term::Int(1)]))
                .tagged(Category::Reward, Some("east causes x : -1.0 if {}.".into())),
            Rule::new(None, vec![atom("a", vec![])], vec![]),
        ],
        q_rules: vec![QRule {
            action: Term::Sym("east".into()),
            reward: "-1.0".parse().unwrap(),
            time: 0,
            body: vec![atom("occ", vec![Term::Sym("east".into()), Term::Int(0)])],
            provenance: Some(Provenance { category: Category::QValue, source: None }),
        }],
        horizon: 1,
        gamma: 0.5,
    };
    program.canonicalize();
    let text = program.to_text();
    assert!(text.starts_with("#horizon 1.\n#discount 0.5.\nreward(-1.0,east,1)."));
    let parsed = parse_program(&text).unwrap();
    assert_eq!(parsed, program);
    assert_eq!(parsed.to_text(), text);
}

#[test]
fn reader_errors_carry_positions() {
    let err = parse_program("#horizon 1.\n#discount 0.5.\na :- b c.").unwrap_err();
    assert_eq!(err.pos.line, 3);
    assert!(parse_program("a.").is_err());
}
