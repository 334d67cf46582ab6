use std::collections::BTreeSet;

use logeq::automata::{compile, to_kripke};
use logeq::generate::{random_kripke, random_pdl, rng};
use logeq::pdl::{
    counter_state, parse_pdl, pdl_satisfies, program_relation, satisfying_states, valid_in,
    KripkeStructure, PdlError, PdlFormula,
};
use logeq::regprog::{
    eval_relation, parse_program, parse_program_with, Interpretation, ProgramSyntax, RegProgram,
};
use proptest::prelude::*;

fn f(s: &str) -> PdlFormula {
    parse_pdl(s).unwrap()
}

fn dynamic(s: &str) -> RegProgram {
    parse_program_with(s, ProgramSyntax::DYNAMIC).unwrap()
}

/// Relation of a program by explicit search, independent of the matrix code.
fn pairs(m: &KripkeStructure, alpha: &RegProgram) -> BTreeSet<(usize, usize)> {
    let n = m.len();
    match alpha {
        RegProgram::Prim(a) => m
            .interpretation()
            .relation(a)
            .map(|r| r.pairs().into_iter().collect())
            .unwrap_or_default(),
        RegProgram::Zero => BTreeSet::new(),
        RegProgram::One => (0..n).map(|s| (s, s)).collect(),
        RegProgram::Test(phi) => (0..n).filter(|&s| sat(m, s, phi)).map(|s| (s, s)).collect(),
        RegProgram::Choice(l, r) => pairs(m, l).union(&pairs(m, r)).cloned().collect(),
        RegProgram::Seq(l, r) => {
            let (pl, pr) = (pairs(m, l), pairs(m, r));
            pl.iter()
                .flat_map(|&(u, v)| {
                    pr.iter()
                        .filter(move |&&(w, _)| w == v)
                        .map(move |&(_, x)| (u, x))
                })
                .collect()
        }
        RegProgram::Star(b) => {
            let step = pairs(m, b);
            let mut out = BTreeSet::new();
            for s in 0..n {
                let mut stack = vec![s];
                let mut seen = BTreeSet::from([s]);
                while let Some(u) = stack.pop() {
                    for &(_, v) in step.iter().filter(|(x, _)| *x == u) {
                        if seen.insert(v) {
                            stack.push(v);
                        }
                    }
                }
                out.extend(seen.into_iter().map(|t| (s, t)));
            }
            out
        }
    }
}

fn sat(m: &KripkeStructure, s: usize, phi: &PdlFormula) -> bool {
    match phi {
        PdlFormula::True => true,
        PdlFormula::Prop(p) => m.holds(s, p),
        PdlFormula::Not(x) => !sat(m, s, x),
        PdlFormula::And(l, r) => sat(m, s, l) && sat(m, s, r),
        PdlFormula::Necessarily(alpha, x) => pairs(m, alpha)
            .iter()
            .filter(|(u, _)| *u == s)
            .all(|&(_, t)| sat(m, t, x)),
    }
}

fn three_states() -> KripkeStructure {
    // p at 0 and 2; a: 0->1, 1->2; b: 2->0, 1->1
    let sigma = Interpretation::new(3)
        .with_relation("a", [(0, 1), (1, 2)])
        .with_relation("b", [(2, 0), (1, 1)]);
    let mut m = KripkeStructure::new(sigma, ["p".to_string(), "q".to_string()]);
    m.set_true(0, "p");
    m.set_true(2, "p");
    m
}

#[test]
fn vacuous_box() {
    let sigma = Interpretation::new(1).with_relation("a", []);
    let m = KripkeStructure::new(sigma, ["p".to_string()]);
    assert!(pdl_satisfies(&m, 0, &f("[a]p")).unwrap());
}

#[test]
fn test_is_the_diagonal_of_its_formula() {
    let m = three_states();
    assert_eq!(
        program_relation(&m, &dynamic("p?")).unwrap().pairs(),
        vec![(0, 0), (2, 2)]
    );
    assert!(program_relation(&m, &dynamic("(~p & p)?"))
        .unwrap()
        .is_empty());
}

#[test]
fn conditional_routes_by_the_test() {
    let m = three_states();
    let rel = program_relation(&m, &dynamic("(p?;a)+((~p)?;b)")).unwrap();
    // 0 and 2 take a (2 has no a-edge), 1 takes b
    assert_eq!(rel.pairs(), vec![(0, 1), (1, 1)]);
}

#[test]
fn rich_tests_are_rejected() {
    let m = three_states();
    assert!(matches!(
        program_relation(&m, &dynamic("([a]p)?")),
        Err(PdlError::RichTestRejected(_))
    ));
}

#[test]
fn unknown_propositions_and_states_are_errors() {
    let m = three_states();
    assert!(matches!(
        pdl_satisfies(&m, 0, &f("r")),
        Err(PdlError::UnknownProposition(_))
    ));
    assert!(matches!(
        pdl_satisfies(&m, 7, &f("p")),
        Err(PdlError::UnknownState(_))
    ));
}

#[test]
fn excluded_middle_is_valid() {
    assert!(valid_in(&three_states(), &f("p | ~p")).unwrap());
    assert_eq!(counter_state(&three_states(), &f("p")).unwrap(), Some(1));
}

#[test]
fn automaton_structures() {
    let ma = to_kripke(&compile(&parse_program("a").unwrap()).unwrap());
    let mb = to_kripke(&compile(&parse_program("b").unwrap()).unwrap());
    let phi = f("init => <a>true");
    assert!(valid_in(&ma, &phi).unwrap());
    assert!(!valid_in(&mb, &phi).unwrap());
}

#[test]
fn kripke_json_round_trips() {
    let text = r#"{"states": ["u", "v"], "props": {"u": {"p": true}, "v": {"p": false}}, "relations": {"a": [["u", "v"]]}}"#;
    let m = KripkeStructure::from_json(text).unwrap();
    assert!(pdl_satisfies(&m, 0, &f("p & <a>~p")).unwrap());
    let again =
        KripkeStructure::from_json(&serde_json::to_string(&m.to_json_value()).unwrap()).unwrap();
    assert_eq!(
        satisfying_states(&again, &f("<a>true")).unwrap(),
        vec![true, false]
    );
}

#[test]
fn formulas_print_and_reparse() {
    for s in [
        "[a;(b+c)*]final",
        "<p? ; a>q",
        "p => [a*](q | ~p)",
        "false",
        "<a + b>true & [b]p",
    ] {
        let phi = f(s);
        assert_eq!(f(&phi.to_string()), phi, "{s}");
    }
}

fn model_and_formula() -> impl Strategy<Value = (KripkeStructure, PdlFormula)> {
    (any::<u64>(), 1usize..=5).prop_map(|(seed, n)| {
        let mut r = rng(seed);
        let m = random_kripke(&mut r, n, &["a", "b"], &["p", "q"]);
        let phi = random_pdl(&mut r, &["p", "q"], &["a", "b"], 2);
        (m, phi)
    })
}

proptest! {
    #[test]
    fn satisfaction_matches_explicit_search((m, phi) in model_and_formula()) {
        let fast = satisfying_states(&m, &phi).unwrap();
        for s in 0..m.len() {
            prop_assert_eq!(fast[s], sat(&m, s, &phi), "{} at {}", phi, s);
        }
    }

    #[test]
    fn diamond_is_dual_of_box((m, phi) in model_and_formula(), seed in any::<u64>()) {
        let alpha = logeq::generate::random_program(&mut rng(seed), &["a", "b"], 4);
        let dia = PdlFormula::possibly(alpha.clone(), phi.clone());
        let dual = PdlFormula::not(PdlFormula::necessarily(alpha, PdlFormula::not(phi)));
        prop_assert_eq!(satisfying_states(&m, &dia).unwrap(), satisfying_states(&m, &dual).unwrap());
    }

    #[test]
    fn test_free_programs_use_the_plain_semantics((m, _) in model_and_formula(), seed in any::<u64>()) {
        let alpha = logeq::generate::random_program(&mut rng(seed), &["a", "b"], 6);
        prop_assert_eq!(program_relation(&m, &alpha).unwrap(), eval_relation(m.interpretation(), &alpha).unwrap());
    }

    #[test]
    fn modus_ponens_on_samples((m, phi) in model_and_formula(), seed in any::<u64>()) {
        let psi = random_pdl(&mut rng(seed), &["p", "q"], &["a", "b"], 2);
        if valid_in(&m, &phi).unwrap() && valid_in(&m, &PdlFormula::implies(phi, psi.clone())).unwrap() {
            prop_assert!(valid_in(&m, &psi).unwrap());
        }
    }
}
