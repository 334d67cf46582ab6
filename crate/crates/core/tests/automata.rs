use std::collections::BTreeSet;

use logeq::automata::{
    build_eps_nfa, collapse, compile, equivalent, equivalent_with_budget, merge_epsilon_components,
    to_kripke, words_up_to, AutomataError, Equivalence, Label, Nfa,
};
use logeq::generate::{random_program, rng};
use logeq::pdl::{pdl_satisfies, PdlFormula};
use logeq::regprog::{parse_program, parse_program_with, ProgramSyntax, RegProgram};
use proptest::prelude::*;

fn prog(s: &str) -> RegProgram {
    parse_program_with(s, ProgramSyntax::KLEENE).unwrap()
}

fn word(s: &str) -> Vec<String> {
    s.chars().map(|c| c.to_string()).collect()
}

fn nullable(r: &RegProgram) -> bool {
    match r {
        RegProgram::Prim(_) | RegProgram::Zero => false,
        RegProgram::One | RegProgram::Star(_) => true,
        RegProgram::Seq(l, r) => nullable(l) && nullable(r),
        RegProgram::Choice(l, r) => nullable(l) || nullable(r),
        RegProgram::Test(_) => unreachable!(),
    }
}

/// Brzozowski derivative with respect to one symbol.
fn derive(r: &RegProgram, a: &str) -> RegProgram {
    match r {
        RegProgram::Prim(b) if b == a => RegProgram::One,
        RegProgram::Prim(_) | RegProgram::Zero | RegProgram::One => RegProgram::Zero,
        RegProgram::Choice(l, r) => RegProgram::choice(derive(l, a), derive(r, a)),
        RegProgram::Seq(l, r) => {
            let left = RegProgram::seq(derive(l, a), (**r).clone());
            if nullable(l) {
                RegProgram::choice(left, derive(r, a))
            } else {
                left
            }
        }
        RegProgram::Star(b) => RegProgram::seq(derive(b, a), r.clone()),
        RegProgram::Test(_) => unreachable!(),
    }
}

fn matches(r: &RegProgram, w: &[String]) -> bool {
    let mut cur = r.clone();
    for a in w {
        cur = derive(&cur, a);
    }
    nullable(&cur)
}

fn ab() -> BTreeSet<String> {
    ["a", "b"].iter().map(|s| s.to_string()).collect()
}

#[test]
fn primitive_automaton() {
    let a = build_eps_nfa(&prog("a")).unwrap();
    assert_eq!(a.states, 2);
    assert_eq!(a.initial, 0);
    assert_eq!(a.finals, BTreeSet::from([1]));
    assert_eq!(a.transitions, BTreeSet::from([(0, Label::sym("a"), 1)]));
}

#[test]
fn sequence_automaton() {
    let a = build_eps_nfa(&prog("a;b")).unwrap();
    assert_eq!(a.states, 4);
    assert_eq!(a.labelled_edge_count(), 2);
    assert_eq!(a.epsilon_edges().count(), 1);
}

#[test]
fn star_automaton() {
    let a = build_eps_nfa(&prog("a*")).unwrap();
    assert_eq!(a.states, 3);
    assert!(a.finals.contains(&a.initial));
    assert!(collapse(&a).accepts(&Vec::<String>::new()));
}

#[test]
fn collapse_of_primitive_is_the_same_automaton() {
    let n = compile(&prog("a")).unwrap();
    assert_eq!(n.len(), 2);
    assert_eq!(n.transitions.len(), 1);
}

#[test]
fn collapse_of_sequence_has_three_classes() {
    let n = compile(&prog("a;b")).unwrap();
    assert_eq!(n.len(), 3);
    let accepted: Vec<Vec<String>> = words_up_to(&ab(), 4)
        .into_iter()
        .filter(|w| n.accepts(w))
        .collect();
    assert_eq!(accepted, vec![word("ab")]);
    assert!(!n.accepts(&word("ba")));
}

#[test]
fn duplicated_choice_keeps_its_own_shape() {
    let (one, two) = (compile(&prog("a")).unwrap(), compile(&prog("a+a")).unwrap());
    assert_ne!(one.len(), two.len());
    for w in words_up_to(&ab(), 4) {
        assert_eq!(two.accepts(&w), w == word("a"));
    }
}

#[test]
fn empty_finals_accept_nothing() {
    let n = Nfa {
        classes: vec![vec![0], vec![1]],
        initial: 0,
        finals: BTreeSet::new(),
        transitions: BTreeSet::from([(0, "a".to_string(), 1)]),
    };
    assert!(words_up_to(&ab(), 3).iter().all(|w| !n.accepts(w)));
}

#[test]
fn merging_epsilon_components_changes_the_language() {
    let alpha = prog("a + b*");
    let merged = merge_epsilon_components(&build_eps_nfa(&alpha).unwrap());
    assert!(merged.accepts(&word("ba")));
    assert!(!matches(&alpha, &word("ba")));
    assert!(!compile(&alpha).unwrap().accepts(&word("ba")));
}

#[test]
fn equivalence_fixed_points() {
    assert_eq!(
        equivalent(&prog("a"), &prog("a+a")).unwrap(),
        Equivalence::Equal
    );
    assert_eq!(
        equivalent(&prog("(a+b)*"), &prog("(a*;b*)*")).unwrap(),
        Equivalence::Equal
    );
    assert_eq!(
        equivalent(&prog("a;b"), &prog("b;a")).unwrap(),
        Equivalence::Counterexample(word("ab"))
    );
    for w in words_up_to(&ab(), 6) {
        assert_eq!(matches(&prog("(a+b)*"), &w), matches(&prog("(a*;b*)*"), &w));
    }
}

#[test]
fn tests_are_refused() {
    let alpha = parse_program_with("p?;a", ProgramSyntax::DYNAMIC).unwrap();
    assert!(matches!(
        build_eps_nfa(&alpha),
        Err(AutomataError::TestInProgram(_))
    ));
}

#[test]
fn budget_is_enforced() {
    let alpha = parse_program("(a+b)*;a;(a+b);(a+b);(a+b);(a+b)").unwrap();
    let beta = parse_program("(a+b)*;b;(a+b);(a+b);(a+b);(a+b)").unwrap();
    assert!(matches!(
        equivalent_with_budget(&alpha, &beta, 4),
        Err(AutomataError::StateBlowup { .. })
    ));
}

#[test]
fn kripke_view_of_a_primitive() {
    let m = to_kripke(&compile(&prog("a")).unwrap());
    let init: Vec<usize> = (0..m.len()).filter(|&s| m.holds(s, "init")).collect();
    let fin: Vec<usize> = (0..m.len()).filter(|&s| m.holds(s, "final")).collect();
    assert_eq!((init.len(), fin.len()), (1, 1));
    assert_eq!(m.interpretation().relation("a").unwrap().len(), 1);
    let phi = PdlFormula::possibly(RegProgram::prim("a"), PdlFormula::prop("final"));
    assert!(pdl_satisfies(&m, init[0], &phi).unwrap());
}

#[test]
fn kripke_view_of_a_star_marks_start_final() {
    let m = to_kripke(&compile(&prog("a*")).unwrap());
    let start = (0..m.len()).find(|&s| m.holds(s, "init")).unwrap();
    assert!(m.holds(start, "final"));
}

fn any_program() -> impl Strategy<Value = RegProgram> {
    (any::<u64>(), 1usize..=8).prop_map(|(seed, n)| random_program(&mut rng(seed), &["a", "b"], n))
}

proptest! {
    #[test]
    fn collapse_preserves_the_language(alpha in any_program()) {
        let eps = build_eps_nfa(&alpha).unwrap();
        let nfa = collapse(&eps);
        for w in words_up_to(&ab(), 5) {
            let expected = matches(&alpha, &w);
            prop_assert_eq!(eps.accepts(&w), expected, "eps {} {:?}", alpha, w);
            prop_assert_eq!(nfa.accepts(&w), expected, "nfa {} {:?}", alpha, w);
        }
    }

    #[test]
    fn equivalence_agrees_with_word_enumeration(l in any_program(), r in any_program()) {
        let differing = words_up_to(&ab(), 5).into_iter().find(|w| matches(&l, w) != matches(&r, w));
        match equivalent(&l, &r).unwrap() {
            Equivalence::Equal => prop_assert!(differing.is_none()),
            Equivalence::Counterexample(w) => {
                prop_assert!(matches(&l, &w) != matches(&r, &w));
                if let Some(d) = differing {
                    prop_assert!(w.len() <= d.len());
                }
            }
        }
    }

    #[test]
    fn exactly_one_initial_state(alpha in any_program()) {
        let m = to_kripke(&compile(&alpha).unwrap());
        prop_assert_eq!((0..m.len()).filter(|&s| m.holds(s, "init")).count(), 1);
    }
}
