use logeq::generate::{random_interpretation, random_program, rng};
use logeq::regprog::{
    eval_relation, parse_program, parse_program_with, EvalError, Interpretation, ProgramSyntax,
    RegProgram, Relation,
};
use proptest::prelude::*;

fn prog(s: &str) -> RegProgram {
    parse_program(s).unwrap()
}

fn kleene(s: &str) -> RegProgram {
    parse_program_with(s, ProgramSyntax::KLEENE).unwrap()
}

/// `R^0 ∪ R^1 ∪ ... ∪ R^n` by repeated composition.
fn powers_union(r: &Relation, n: usize) -> Relation {
    let mut acc = Relation::identity(r.size());
    let mut power = Relation::identity(r.size());
    for _ in 0..n {
        power = power.compose(r);
        acc = acc.union(&power);
    }
    acc
}

#[test]
fn parser_shapes() {
    assert_eq!(
        prog("a;(b+c)*"),
        RegProgram::seq(
            RegProgram::prim("a"),
            RegProgram::star(RegProgram::choice(
                RegProgram::prim("b"),
                RegProgram::prim("c")
            ))
        )
    );
    assert_ne!(prog("a+a"), prog("a"));
    assert_eq!(
        kleene("1+a;a*"),
        RegProgram::choice(
            RegProgram::One,
            RegProgram::seq(
                RegProgram::prim("a"),
                RegProgram::star(RegProgram::prim("a"))
            )
        )
    );
    assert!(parse_program("1+a").is_err());
}

#[test]
fn precedence_star_seq_choice() {
    assert_eq!(prog("a+b;c*"), prog("a+(b;(c*))"));
    for s in ["a+b;c*", "(a+b);c", "(a;b)*", "a;b;c", "(a+b)+c"] {
        assert_eq!(prog(&prog(s).to_string()), prog(s), "{s}");
    }
}

#[test]
fn star_of_empty_relation_is_identity() {
    let sigma = Interpretation::new(2).with_relation("a", []);
    assert_eq!(
        eval_relation(&sigma, &prog("a*")).unwrap(),
        Relation::identity(2)
    );
}

#[test]
fn sequence_composes() {
    // states 1, 2, 3 as indices 0, 1, 2
    let sigma = Interpretation::new(3)
        .with_relation("a", [(0, 1)])
        .with_relation("b", [(1, 2)]);
    assert_eq!(
        eval_relation(&sigma, &prog("a;b")).unwrap().pairs(),
        vec![(0, 2)]
    );
}

#[test]
fn star_of_a_chain() {
    let sigma = Interpretation::new(3).with_relation("a", [(0, 1), (1, 2)]);
    let star = eval_relation(&sigma, &prog("a*")).unwrap();
    let expected = Relation::from_pairs(3, [(0, 0), (1, 1), (2, 2), (0, 1), (1, 2), (0, 2)]);
    assert_eq!(star, expected);
    let r = sigma.relation("a").unwrap();
    assert_eq!(powers_union(r, 2), expected);
    assert_eq!(powers_union(r, 3), expected);
}

#[test]
fn unknown_primitive_is_reported() {
    let sigma = Interpretation::new(2);
    assert_eq!(
        eval_relation(&sigma, &prog("a")),
        Err(EvalError::UnknownPrimitive("a".into()))
    );
}

#[test]
fn interpretation_json_uses_state_names() {
    let text = r#"{"states": ["s", "t", 3], "relations": {"a": [["s", "t"], ["t", 3]]}}"#;
    let sigma = Interpretation::from_json(text).unwrap();
    let rel = eval_relation(&sigma, &prog("a;a")).unwrap();
    assert_eq!(rel.pairs(), vec![(0, 2)]);
    let back =
        Interpretation::from_json(&serde_json::to_string(&sigma.to_json_value()).unwrap()).unwrap();
    assert_eq!(back.relation("a"), sigma.relation("a"));
    assert!(
        Interpretation::from_json(r#"{"states": ["s"], "relations": {"a": [["s", "u"]]}}"#)
            .is_err()
    );
}

proptest! {
    #[test]
    fn star_is_the_union_of_powers(seed in any::<u64>(), n in 1usize..=6) {
        let mut r = rng(seed);
        let sigma = random_interpretation(&mut r, n, &["a"]);
        let rel = sigma.relation("a").unwrap();
        prop_assert_eq!(rel.star(), powers_union(rel, n));
    }

    #[test]
    fn semantics_is_compositional(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sigma = random_interpretation(&mut r, 4, &["a", "b"]);
        let (x, y) = (random_program(&mut r, &["a", "b"], 5), random_program(&mut r, &["a", "b"], 5));
        let (ex, ey) = (eval_relation(&sigma, &x).unwrap(), eval_relation(&sigma, &y).unwrap());
        prop_assert_eq!(eval_relation(&sigma, &RegProgram::seq(x.clone(), y.clone())).unwrap(), ex.compose(&ey));
        prop_assert_eq!(eval_relation(&sigma, &RegProgram::choice(x.clone(), y)).unwrap(), ex.union(&ey));
        prop_assert_eq!(eval_relation(&sigma, &RegProgram::star(x)).unwrap(), powers_union(&ex, 4));
    }

    #[test]
    fn printed_programs_reparse(seed in any::<u64>(), size in 1usize..=10) {
        let alpha = random_program(&mut rng(seed), &["a", "b", "c"], size);
        prop_assert_eq!(prog(&alpha.to_string()), alpha);
    }
}
