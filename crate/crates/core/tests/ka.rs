use std::collections::BTreeMap;
use std::path::Path;

use logeq::generate::{random_program, rng};
use logeq::ka::{
    axiom, check_proof, check_soundness_against_language, parse_equation, AxiomInstance, Equation,
    LanguageCheck, ProofScript, ProofVerdict, RejectReason, AXIOMS,
};
use logeq::regprog::RegProgram;
use proptest::prelude::*;

fn script(name: &str) -> ProofScript {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("proofs")
        .join(name);
    ProofScript::parse(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn eq(s: &str) -> Equation {
    parse_equation(s).unwrap()
}

fn reject(text: &str) -> (usize, RejectReason) {
    match check_proof(&ProofScript::parse(text).unwrap()) {
        ProofVerdict::Rejected { step, reason } => (step, reason),
        v => panic!("accepted: {v:?}"),
    }
}

/// One outermost, right-to-left step with `x;0 -> 0`, `x + 0 -> x`, `1;x -> x`.
fn rewrite(t: &RegProgram) -> Option<RegProgram> {
    match t {
        RegProgram::Seq(_, r) if **r == RegProgram::Zero => return Some(RegProgram::Zero),
        RegProgram::Choice(l, r) if **r == RegProgram::Zero => return Some((**l).clone()),
        RegProgram::Seq(l, r) if **l == RegProgram::One => return Some((**r).clone()),
        _ => {}
    }
    match t {
        RegProgram::Seq(l, r) => rewrite(r)
            .map(|r2| RegProgram::seq((**l).clone(), r2))
            .or_else(|| rewrite(l).map(|l2| RegProgram::seq(l2, (**r).clone()))),
        RegProgram::Choice(l, r) => rewrite(r)
            .map(|r2| RegProgram::choice((**l).clone(), r2))
            .or_else(|| rewrite(l).map(|l2| RegProgram::choice(l2, (**r).clone()))),
        _ => None,
    }
}

#[test]
fn shipped_proofs_are_accepted() {
    for name in [
        "plus_zero.ka",
        "plus_idem.ka",
        "unit_and_zero.ka",
        "star_induction.ka",
    ] {
        assert_eq!(
            check_proof(&script(name)),
            ProofVerdict::Accepted { hypotheses: vec![] },
            "{name}"
        );
    }
}

#[test]
fn five_step_proof_follows_the_rewrite_trace() {
    let s = script("unit_and_zero.ka");
    assert_eq!(s.steps.len(), 5);
    let mut trace = vec![s.goal.lhs.clone()];
    while let Some(next) = rewrite(trace.last().unwrap()) {
        trace.push(next);
    }
    assert_eq!(trace.last(), Some(&s.goal.rhs));
    // the chained steps 2, 3, 4 are exactly the rewrite trace
    let chain: Vec<RegProgram> = std::iter::once(s.steps[1].equation.lhs.clone())
        .chain(s.steps[1..4].iter().map(|st| st.equation.rhs.clone()))
        .collect();
    assert_eq!(chain, trace);
}

#[test]
fn star_induction_proof_has_the_expected_premise() {
    let s = script("star_induction.ka");
    assert_eq!(s.steps[5].equation, eq("(0 + a;0) + 0 = 0"));
    assert_eq!(s.goal, eq("a*;0 <= 0"));
}

#[test]
fn every_corrupted_step_is_caught_where_it_happens() {
    for name in [
        "plus_zero.ka",
        "plus_idem.ka",
        "unit_and_zero.ka",
        "star_induction.ka",
    ] {
        let good = script(name);
        for k in 0..good.steps.len() {
            let mut bad = good.clone();
            let e = &mut bad.steps[k].equation;
            e.rhs = RegProgram::choice(e.rhs.clone(), RegProgram::prim("zz"));
            match check_proof(&bad) {
                ProofVerdict::Rejected { step, .. } => assert_eq!(step, k + 1, "{name}"),
                v => panic!("{name} step {}: {v:?}", k + 1),
            }
        }
    }
}

#[test]
fn no_commutativity_for_sequence() {
    let (step, reason) =
        reject("goal: a;b = b;a\n1. a;b = b;a BY axiom(seq-assoc, x:=a, y:=b, z:=a)\n");
    assert_eq!(step, 1);
    assert_eq!(
        reason,
        RejectReason::SchemaMismatch {
            axiom: "seq-assoc".into()
        }
    );
}

#[test]
fn rejection_reasons_are_specific() {
    let cases: Vec<(&str, fn(&RejectReason) -> bool)> = vec![
        ("goal: a = a\n1. a = a BY sym(3)\n", |r| matches!(r, RejectReason::DanglingIndex(3))),
        ("goal: a = b\n1. a = b BY refl\n", |r| matches!(r, RejectReason::NotReflexive)),
        ("goal: a + 0 = a\n1. a + 0 = a BY axiom(plus-zero, x:=a)\n2. a + 0 = a BY sym(1)\n", |r| {
            matches!(r, RejectReason::SymmetryMismatch)
        }),
        ("goal: a = a\n1. a = a BY cong(1, [0])\n", |r| matches!(r, RejectReason::DanglingIndex(1))),
        (
            "goal: a + 0 = a\n1. a + 0 = a BY axiom(plus-zero, x:=a)\n2. b;(a + 0) = b;a BY cong(1, [0])\n",
            |r| matches!(r, RejectReason::CongruenceMismatch),
        ),
        (
            "goal: a + 0 = a\n1. a + 0 = a BY axiom(plus-zero, x:=a)\n2. b;(a + 0) = b;a BY cong(1, [0, 1, 1])\n",
            |r| matches!(r, RejectReason::InvalidPath),
        ),
        ("goal: a = a\n1. a = a BY hyp(h)\n", |r| matches!(r, RejectReason::UnknownHypothesis(_))),
        ("goal: a = a\nhyp h: a = b\n1. a = a BY hyp(h)\n", |r| matches!(r, RejectReason::HypothesisMismatch(_))),
        ("goal: a = a\n1. a = a BY star-ind-l(0)\n", |r| matches!(r, RejectReason::DanglingIndex(0))),
        (
            "goal: a + 0 = a\n1. a + 0 = a BY axiom(plus-zero, x:=a)\n2. a*;a <= a BY star-ind-l(1)\n",
            |r| matches!(r, RejectReason::InductionPremiseShape),
        ),
        ("goal: a + 0 = a\n1. a = a + 0 BY axiom(plus-zero, x:=a)\n", |r| {
            matches!(r, RejectReason::SchemaMismatch { .. })
        }),
        ("goal: a + 0 = a\n1. a + 0 = a BY axiom(plus-zero, x:=a)\n2. a = a BY refl\n", |r| {
            matches!(r, RejectReason::GoalNotReached)
        }),
    ];
    for (text, ok) in cases {
        let (_, reason) = reject(text);
        assert!(ok(&reason), "{text}: {reason:?}");
    }
}

#[test]
fn hypotheses_are_reported_when_used() {
    let text = "goal: a;a = a\nhyp idem: a;a = a\n1. a;a = a BY hyp(idem)\n";
    assert_eq!(
        check_proof(&ProofScript::parse(text).unwrap()),
        ProofVerdict::Accepted {
            hypotheses: vec!["idem".into()]
        }
    );
}

#[test]
fn scripts_round_trip_through_text_and_json() {
    let s = script("star_induction.ka");
    assert_eq!(ProofScript::parse(&s.to_text()).unwrap(), s);
    let json = serde_json::to_string(&s).unwrap();
    assert_eq!(ProofScript::parse_any(&json).unwrap(), s);
}

#[test]
fn language_checks() {
    assert_eq!(
        check_soundness_against_language(&eq("1 + a;a* <= a*"), 6),
        LanguageCheck::Consistent
    );
    assert_eq!(
        check_soundness_against_language(&eq("a = a;a"), 6),
        LanguageCheck::Refuted(vec!["a".into()])
    );
    assert_eq!(
        check_soundness_against_language(&eq("0;a = 0"), 6),
        LanguageCheck::Consistent
    );
}

#[test]
fn thirteen_axioms_with_two_horn_rules() {
    assert_eq!(AXIOMS.len(), 13);
    assert_eq!(AXIOMS.iter().filter(|a| a.is_horn()).count(), 2);
    assert!(axiom("star-ind-r").is_some());
    assert!(axiom("seq-comm").is_none());
}

fn substitution(seed: u64, vars: impl IntoIterator<Item = String>) -> BTreeMap<String, RegProgram> {
    let mut r = rng(seed);
    vars.into_iter()
        .map(|v| (v, random_program(&mut r, &["a", "b"], 4)))
        .collect()
}

proptest! {
    #[test]
    fn equational_axioms_hold_on_languages(seed in any::<u64>(), pick in 0usize..13) {
        let ax = &AXIOMS[pick];
        if let AxiomInstance::Equations(eqs) = ax.instantiate(&substitution(seed, ax.variables())) {
            for e in eqs {
                prop_assert_eq!(check_soundness_against_language(&e, 5), LanguageCheck::Consistent, "{}", e);
            }
        }
    }

    #[test]
    fn axiom_instances_are_accepted_as_one_step_proofs(seed in any::<u64>(), pick in 0usize..13) {
        let ax = &AXIOMS[pick];
        let subst = substitution(seed, ax.variables());
        if let AxiomInstance::Equations(eqs) = ax.instantiate(&subst) {
            let by: Vec<String> = subst.iter().map(|(v, t)| format!("{v}:={t}")).collect();
            for e in eqs {
                let text = format!("goal: {e}\n1. {e} BY axiom({}, {})\n", ax.name, by.join(", "));
                prop_assert!(check_proof(&ProofScript::parse(&text).unwrap()).is_accepted(), "{}", text);
            }
        }
    }
}
