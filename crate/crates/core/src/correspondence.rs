//! Bounded empirical checks linking the logical and equational sides:
//! bisimilarity against HML agreement, HML intensions, language equality
//! against PDL diamonds, and program automata against PDL validity.
//!
//! Formula sweeps work on extensions: every formula up to the size and
//! modal-depth bounds is generated, but only one representative per set
//! of satisfying states is kept. Two roots agree on all formulas exactly
//! when they agree on every kept representative, so the verdict equals
//! that of the plain enumeration.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automata::{compile, equivalent, to_kripke, AutomataError, Equivalence};
use crate::bisim::{
    bisimilar, bisimilar_lts, bisimilar_naive_lts, BisimError, BisimVerdict, Combined,
};
use crate::ccs::{build_lts, Action, Lts, LtsError, Process, DEFAULT_STATE_BUDGET};
use crate::generate::{random_kripke, random_pdl, rng};
use crate::hml::{enumerate_formulas, satisfies, satisfying_states, HmlFormula};
use crate::pdl::{pdl_satisfies, valid_in, KripkeJson, KripkeStructure, PdlError, PdlFormula};
use crate::regprog::{Interpretation, RegProgram, Relation};

/// Node bound for HML sweeps.
pub const HML_SIZE_BOUND: usize = 6;
/// Node bound for the explicit intension fragment.
pub const INTENSION_SIZE_BOUND: usize = 5;
/// Node bound for PDL sweeps over automaton structures.
pub const PDL_SIZE_BOUND: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorrespondenceError {
    #[error(transparent)]
    Lts(#[from] LtsError),
    #[error(transparent)]
    Bisim(#[from] BisimError),
    #[error(transparent)]
    Automata(#[from] AutomataError),
    #[error(transparent)]
    Pdl(#[from] PdlError),
    /// A checker disagreed with another; indicates a bug.
    #[error("hard failure: {0}")]
    HardFailure(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Proposition {
    BisimHml,
    Intension,
    ProgramDiamonds,
    AutomatonValidity,
}

impl Proposition {
    pub fn number(self) -> u8 {
        match self {
            Proposition::BisimHml => 1,
            Proposition::Intension => 2,
            Proposition::ProgramDiamonds => 3,
            Proposition::AutomatonValidity => 4,
        }
    }
}

impl fmt::Display for Proposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "prop{}", self.number())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    /// Holds of the left process, fails on the right one.
    Hml { formula: String, modal_depth: usize },
    /// `<left>formula` and `<right>formula` differ at `state`.
    Model {
        model: KripkeJson,
        state: usize,
        formula: String,
        left_holds: bool,
        right_holds: bool,
    },
    /// Validity differs between the two automaton structures.
    Pdl {
        formula: String,
        valid_in_left: bool,
        valid_in_right: bool,
        #[serde(skip_serializing_if = "Option::is_none")]
        word: Option<Vec<String>>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    Consistent,
    /// A verified witness for a negative instance.
    Witness {
        witness: Witness,
    },
    /// A verified witness on an instance the proposition calls positive.
    Violation {
        witness: Witness,
    },
}

impl Verdict {
    pub fn is_consistent(&self) -> bool {
        matches!(self, Verdict::Consistent)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Consistent => None,
            Verdict::Witness { witness } | Verdict::Violation { witness } => Some(witness),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub formula_depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub formula_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub formulas_checked: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub combined_states: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub models_sampled: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub word_length: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrespondenceReport {
    pub proposition: Proposition,
    pub instance: String,
    pub verdict: Verdict,
    pub bounds: Bounds,
}

impl CorrespondenceReport {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }
}

/// Fixed-width bitset over structure states.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Ext(Vec<u64>);

impl Ext {
    fn from_fn(n: usize, f: impl Fn(usize) -> bool) -> Self {
        let mut words = vec![0u64; n.div_ceil(64)];
        for i in 0..n {
            if f(i) {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        Ext(words)
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn not(&self, n: usize) -> Self {
        Ext::from_fn(n, |i| !self.get(i))
    }

    fn and(&self, other: &Ext) -> Self {
        Ext(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }
}

/// All extensions of formulas with at most `size` nodes and modal depth
/// at most `depth`, each with a smallest representative, in order of
/// representative size.
fn sweep<F: Clone, M>(
    n: usize,
    atoms: &[(F, Ext)],
    modals: &[M],
    boxed: impl Fn(&M, &F, &Ext) -> (F, Ext),
    not: impl Fn(&F) -> F,
    and: impl Fn(&F, &F) -> F,
    depth: usize,
    size: usize,
) -> Vec<(F, Ext)> {
    let depth = depth.min(size.saturating_sub(1));
    let mut previous: Vec<Vec<(F, Ext)>> = Vec::new();
    for k in 0..=depth {
        // layers[s]: new extensions whose smallest formula has s nodes
        let mut seen: HashSet<Ext> = HashSet::new();
        let mut layers: Vec<Vec<(F, Ext)>> = vec![Vec::new(); size + 1];
        for (f, e) in atoms {
            if seen.insert(e.clone()) {
                layers[1].push((f.clone(), e.clone()));
            }
        }
        for s in 2..=size {
            let mut fresh = Vec::new();
            for (f, e) in &layers[s - 1] {
                let e = e.not(n);
                if seen.insert(e.clone()) {
                    fresh.push((not(f), e));
                }
            }
            for i in 1..s - 1 {
                for (fl, el) in &layers[i] {
                    for (fr, er) in &layers[s - 1 - i] {
                        let e = el.and(er);
                        if !seen.contains(&e) {
                            seen.insert(e.clone());
                            fresh.push((and(fl, fr), e));
                        }
                    }
                }
            }
            if k > 0 {
                for (f, e) in &previous[s - 1] {
                    for m in modals {
                        let (g, e) = boxed(m, f, e);
                        if seen.insert(e.clone()) {
                            fresh.push((g, e));
                        }
                    }
                }
            }
            layers[s] = fresh;
        }
        // one more level of modal depth adds nothing once a level repeats
        let stable = k > 0
            && layers.iter().zip(&previous).all(|(now, before)| {
                now.len() == before.len() && now.iter().zip(before).all(|(a, b)| a.1 == b.1)
            });
        previous = layers;
        if stable {
            break;
        }
    }
    previous.into_iter().flatten().collect()
}

/// Extensions of HML formulas over the disjoint union of two LTSs.
fn hml_sweep(
    g: &Combined,
    actions: &BTreeSet<Action>,
    depth: usize,
    size: usize,
) -> Vec<(HmlFormula, Ext)> {
    let n = g.states.len();
    let actions: Vec<Action> = actions.iter().cloned().collect();
    sweep(
        n,
        &[(HmlFormula::True, Ext::from_fn(n, |_| true))],
        &actions,
        |a, f, e| {
            let ext = Ext::from_fn(n, |s| {
                g.succ[s]
                    .iter()
                    .filter(|(b, _)| b == a)
                    .all(|&(_, t)| e.get(t))
            });
            (HmlFormula::necessarily(a.clone(), f.clone()), ext)
        },
        |f| HmlFormula::not(f.clone()),
        |l, r| HmlFormula::and(l.clone(), r.clone()),
        depth,
        size,
    )
}

fn lts_pair(p: &Process, q: &Process) -> Result<(Lts, Lts), CorrespondenceError> {
    Ok((
        build_lts(p, DEFAULT_STATE_BUDGET)?,
        build_lts(q, DEFAULT_STATE_BUDGET)?,
    ))
}

fn hml_witness(
    p: &Process,
    q: &Process,
    formula: &HmlFormula,
) -> Result<Verdict, CorrespondenceError> {
    if !(satisfies(p, formula) && !satisfies(q, formula)) {
        return Err(CorrespondenceError::HardFailure(format!(
            "witness {formula} does not separate {p} from {q}"
        )));
    }
    Ok(Verdict::Witness {
        witness: Witness::Hml {
            formula: formula.to_string(),
            modal_depth: formula.modal_depth(),
        },
    })
}

/// Bisimilarity against agreement on all HML formulas up to `depth`
/// (and [`HML_SIZE_BOUND`] nodes). Both bisimulation procedures are run
/// and must agree.
pub fn check_prop1(
    p: &Process,
    q: &Process,
    depth: usize,
) -> Result<CorrespondenceReport, CorrespondenceError> {
    let (left, right) = lts_pair(p, q)?;
    check_prop1_lts(&left, &right, depth)
}

/// [`check_prop1`] on prebuilt transition systems.
pub fn check_prop1_lts(
    left: &Lts,
    right: &Lts,
    depth: usize,
) -> Result<CorrespondenceReport, CorrespondenceError> {
    let (p, q) = (left.state(left.root()), right.state(right.root()));
    let g = Combined::new(left, right);
    let verdict = bisimilar_lts(left, right)?.verdict;
    let naive = bisimilar_naive_lts(left, right)?;
    if naive.verdict.is_bisimilar() != verdict.is_bisimilar() {
        return Err(CorrespondenceError::HardFailure(format!(
            "bisimulation procedures disagree on {p} and {q}"
        )));
    }
    let mut bounds = Bounds {
        formula_depth: Some(depth),
        formula_size: Some(HML_SIZE_BOUND),
        combined_states: Some(g.states.len()),
        ..Bounds::default()
    };
    let instance = format!("{p} ~ {q}");
    let verdict = match verdict {
        BisimVerdict::Bisimilar { .. } => {
            let actions = g.succ.iter().flatten().map(|(a, _)| a.clone()).collect();
            let exts = hml_sweep(&g, &actions, depth, HML_SIZE_BOUND);
            bounds.formulas_checked = Some(exts.len());
            if let Some((f, _)) = exts.iter().find(|(_, e)| e.get(0) != e.get(g.offset)) {
                return Err(CorrespondenceError::HardFailure(format!(
                    "bisimilar {p} and {q} disagree on {f}"
                )));
            }
            Verdict::Consistent
        }
        BisimVerdict::Distinguished { formula } => hml_witness(p, q, &formula)?,
    };
    Ok(CorrespondenceReport {
        proposition: Proposition::BisimHml,
        instance,
        verdict,
        bounds,
    })
}

/// Materializes the intension of `q` (the enumerated formulas it
/// satisfies, up to `depth` and [`INTENSION_SIZE_BOUND`] nodes) and
/// checks that `p` satisfies exactly those formulas when bisimilar.
pub fn check_prop2_intension(
    p: &Process,
    q: &Process,
    depth: usize,
) -> Result<CorrespondenceReport, CorrespondenceError> {
    let left = build_lts(p, DEFAULT_STATE_BUDGET)?;
    let right = build_lts(q, DEFAULT_STATE_BUDGET)?;
    let mut actions = left.actions();
    actions.extend(right.actions());
    let formulas = enumerate_formulas(&actions, depth, INTENSION_SIZE_BOUND);
    let intension: Vec<bool> = formulas
        .iter()
        .map(|f| satisfying_states(&right, f)[right.root()])
        .collect();
    let matches_exactly = formulas
        .iter()
        .zip(&intension)
        .all(|(f, in_q)| satisfying_states(&left, f)[left.root()] == *in_q);
    let bounds = Bounds {
        formula_depth: Some(depth),
        formula_size: Some(INTENSION_SIZE_BOUND),
        formulas_checked: Some(formulas.len()),
        combined_states: Some(left.len() + right.len()),
        ..Bounds::default()
    };
    let verdict = match bisimilar(p, q)? {
        BisimVerdict::Bisimilar { .. } if matches_exactly => Verdict::Consistent,
        BisimVerdict::Bisimilar { .. } => {
            return Err(CorrespondenceError::HardFailure(format!(
                "{p} is bisimilar to {q} but misses part of its intension"
            )))
        }
        // the negation of the formula lies in the intension and fails at p
        BisimVerdict::Distinguished { formula } => hml_witness(p, q, &formula)?,
    };
    Ok(CorrespondenceReport {
        proposition: Proposition::Intension,
        instance: format!("{p} |= [[{q}]]"),
        verdict,
        bounds,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplingConfig {
    pub seed: u64,
    pub models: usize,
    pub formulas_per_model: usize,
    pub max_model_size: usize,
    pub formula_depth: usize,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            seed: 0,
            models: 20,
            formulas_per_model: 5,
            max_model_size: 5,
            formula_depth: 2,
        }
    }
}

/// States `0..=|w|`, `w[i]` relating `i` to `i+1`, `end` true at the
/// last state; every other primitive denotes the empty relation.
pub fn chain_model(word: &[String], alphabet: &BTreeSet<String>) -> KripkeStructure {
    let n = word.len() + 1;
    let mut sigma = Interpretation::new(n);
    let mut names: BTreeSet<String> = alphabet.clone();
    names.extend(word.iter().cloned());
    for a in &names {
        let pairs = word
            .iter()
            .enumerate()
            .filter(|(_, b)| *b == a)
            .map(|(i, _)| (i, i + 1));
        sigma.set_relation(a.clone(), Relation::from_pairs(n, pairs));
    }
    let mut m = KripkeStructure::new(sigma, ["end".to_string()]);
    m.set_true(word.len(), "end");
    m
}

/// Language equality of `alpha` and `beta` against agreement of
/// `<alpha>phi` and `<beta>phi`. Equal languages are checked on sampled
/// structures and formulas; a separating word yields its chain model.
pub fn check_prop3(
    alpha: &RegProgram,
    beta: &RegProgram,
    config: &SamplingConfig,
) -> Result<CorrespondenceReport, CorrespondenceError> {
    let instance = format!("{alpha} = {beta}");
    let mut alphabet = alpha.primitives();
    alphabet.extend(beta.primitives());
    match equivalent(alpha, beta)? {
        Equivalence::Equal => {
            let mut bounds = Bounds {
                formula_depth: Some(config.formula_depth),
                model_size: Some(config.max_model_size),
                ..Bounds::default()
            };
            if alpha == beta {
                bounds.models_sampled = Some(0);
            } else {
                let prims: Vec<&str> = alphabet.iter().map(String::as_str).collect();
                let props = ["p", "q"];
                let mut r = rng(config.seed);
                for _ in 0..config.models {
                    let n = rand::Rng::random_range(&mut r, 1..=config.max_model_size.max(1));
                    let m = random_kripke(&mut r, n, &prims, &props);
                    for _ in 0..config.formulas_per_model {
                        let phi = random_pdl(&mut r, &props, &prims, config.formula_depth);
                        let both = PdlFormula::iff(
                            PdlFormula::possibly(alpha.clone(), phi.clone()),
                            PdlFormula::possibly(beta.clone(), phi.clone()),
                        );
                        if !valid_in(&m, &both)? {
                            return Err(CorrespondenceError::HardFailure(format!(
                                "equal programs {alpha} and {beta} differ on <.>{phi}"
                            )));
                        }
                    }
                }
                bounds.models_sampled = Some(config.models);
            }
            Ok(CorrespondenceReport {
                proposition: Proposition::ProgramDiamonds,
                instance,
                verdict: Verdict::Consistent,
                bounds,
            })
        }
        Equivalence::Counterexample(word) => {
            let m = chain_model(&word, &alphabet);
            let end = PdlFormula::prop("end");
            let left = pdl_satisfies(&m, 0, &PdlFormula::possibly(alpha.clone(), end.clone()))?;
            let right = pdl_satisfies(&m, 0, &PdlFormula::possibly(beta.clone(), end.clone()))?;
            if left == right {
                return Err(CorrespondenceError::HardFailure(format!(
                    "chain model of {word:?} does not separate {alpha} and {beta}"
                )));
            }
            Ok(CorrespondenceReport {
                proposition: Proposition::ProgramDiamonds,
                instance,
                verdict: Verdict::Witness {
                    witness: Witness::Model {
                        model: m.to_json_value(),
                        state: 0,
                        formula: end.to_string(),
                        left_holds: left,
                        right_holds: right,
                    },
                },
                bounds: Bounds {
                    word_length: Some(word.len()),
                    model_size: Some(m.len()),
                    ..Bounds::default()
                },
            })
        }
    }
}

/// Primitives, plus `a*`, `a;b` and `a+b` over them.
fn shallow_programs(alphabet: &BTreeSet<String>) -> Vec<RegProgram> {
    let prims: Vec<RegProgram> = alphabet.iter().map(RegProgram::prim).collect();
    let mut out = prims.clone();
    for a in &prims {
        out.push(RegProgram::star(a.clone()));
    }
    for a in &prims {
        for b in &prims {
            out.push(RegProgram::seq(a.clone(), b.clone()));
        }
    }
    for (i, a) in prims.iter().enumerate() {
        for b in &prims[i + 1..] {
            out.push(RegProgram::choice(a.clone(), b.clone()));
        }
    }
    out
}

/// Disjoint union of two Kripke structures over the same propositions;
/// states of `right` follow those of `left`.
fn disjoint_union(left: &KripkeStructure, right: &KripkeStructure) -> KripkeStructure {
    let (n1, n2) = (left.len(), right.len());
    let n = n1 + n2;
    let mut sigma = Interpretation::new(n);
    let mut names: BTreeSet<&String> = left.interpretation().relations().keys().collect();
    names.extend(right.interpretation().relations().keys());
    for a in names {
        let mut pairs = Vec::new();
        if let Some(r) = left.interpretation().relation(a) {
            pairs.extend(r.pairs());
        }
        if let Some(r) = right.interpretation().relation(a) {
            pairs.extend(r.pairs().into_iter().map(|(u, v)| (u + n1, v + n1)));
        }
        sigma.set_relation(a.clone(), Relation::from_pairs(n, pairs));
    }
    let mut m = KripkeStructure::new(
        sigma,
        left.declared().iter().chain(right.declared()).cloned(),
    );
    for s in 0..n1 {
        for p in left.declared() {
            if left.holds(s, p) {
                m.set_true(s, p);
            }
        }
    }
    for s in 0..n2 {
        for p in right.declared() {
            if right.holds(s, p) {
                m.set_true(s + n1, p);
            }
        }
    }
    m
}

/// Shortest-first PDL formulas over `init`, `final` and shallow programs,
/// one per extension on the union of both structures.
fn pdl_sweep(
    union: &KripkeStructure,
    programs: &[RegProgram],
    depth: usize,
) -> Result<Vec<(PdlFormula, Ext)>, CorrespondenceError> {
    let n = union.len();
    let relations: Vec<(RegProgram, Relation)> = programs
        .iter()
        .map(|p| Ok((p.clone(), crate::pdl::program_relation(union, p)?)))
        .collect::<Result<_, PdlError>>()?;
    let atoms: Vec<(PdlFormula, Ext)> = [
        PdlFormula::True,
        PdlFormula::prop("init"),
        PdlFormula::prop("final"),
    ]
    .into_iter()
    .map(|f| {
        let ext = match &f {
            PdlFormula::Prop(p) => Ext::from_fn(n, |s| union.holds(s, p)),
            _ => Ext::from_fn(n, |_| true),
        };
        (f, ext)
    })
    .collect();
    Ok(sweep(
        n,
        &atoms,
        &relations,
        |(prog, rel), f, e| {
            let ext = Ext::from_fn(n, |s| rel.successors(s).all(|t| e.get(t)));
            (PdlFormula::necessarily(prog.clone(), f.clone()), ext)
        },
        |f| PdlFormula::not(f.clone()),
        |l, r| PdlFormula::and(l.clone(), r.clone()),
        depth,
        PDL_SIZE_BOUND,
    ))
}

fn separates(
    left: &KripkeStructure,
    right: &KripkeStructure,
    phi: &PdlFormula,
) -> Result<Option<(bool, bool)>, PdlError> {
    let l = valid_in(left, phi)?;
    let r = valid_in(right, phi)?;
    Ok((l != r).then_some((l, r)))
}

/// Language equality of `alpha` and `beta` against agreement of PDL
/// validity between their automaton structures, over formulas with
/// propositions `init`, `final`, shallow programs and modal depth at most
/// `depth`.
///
/// A separating formula for programs with equal languages is reported as
/// a violation. Such formulas exist: `[a]<b>true` fails at the start of
/// the structure for `a;b + a;c` and holds at every state of the one for
/// `a;(b + c)`.
pub fn check_prop4(
    alpha: &RegProgram,
    beta: &RegProgram,
    depth: usize,
) -> Result<CorrespondenceReport, CorrespondenceError> {
    let instance = format!("M({alpha}) ~ M({beta})");
    let left = to_kripke(&compile(alpha)?);
    let right = to_kripke(&compile(beta)?);
    let mut alphabet = alpha.primitives();
    alphabet.extend(beta.primitives());
    let programs = shallow_programs(&alphabet);
    let equal = equivalent(alpha, beta)?;
    let mut bounds = Bounds {
        formula_depth: Some(depth),
        formula_size: Some(PDL_SIZE_BOUND),
        model_size: Some(left.len().max(right.len())),
        ..Bounds::default()
    };
    let word = match &equal {
        Equivalence::Equal => None,
        Equivalence::Counterexample(w) => {
            bounds.word_length = Some(w.len());
            Some(w.clone())
        }
    };
    let mut found: Option<(PdlFormula, bool, bool)> = None;
    if word.is_some() && depth >= 1 {
        'patterns: for prog in &programs {
            for target in [PdlFormula::True, PdlFormula::prop("final")] {
                let phi = PdlFormula::implies(
                    PdlFormula::prop("init"),
                    PdlFormula::possibly(prog.clone(), target),
                );
                if let Some((l, r)) = separates(&left, &right, &phi)? {
                    found = Some((phi, l, r));
                    break 'patterns;
                }
            }
        }
    }
    if found.is_none() {
        let union = disjoint_union(&left, &right);
        let exts = pdl_sweep(&union, &programs, depth)?;
        bounds.formulas_checked = Some(exts.len());
        let (n1, n) = (left.len(), union.len());
        let valid = |e: &Ext, range: std::ops::Range<usize>| range.into_iter().all(|s| e.get(s));
        if let Some((phi, _)) = exts
            .iter()
            .find(|(_, e)| valid(e, 0..n1) != valid(e, n1..n))
        {
            let (l, r) = separates(&left, &right, phi)?.ok_or_else(|| {
                CorrespondenceError::HardFailure(format!(
                    "sweep formula {phi} fails re-verification"
                ))
            })?;
            found = Some((phi.clone(), l, r));
        }
    }
    if found.is_none() {
        if let Some(w) = &word {
            let path = w.iter().map(RegProgram::prim).reduce(RegProgram::seq);
            let target = PdlFormula::prop("final");
            let phi = match path {
                Some(p) => {
                    PdlFormula::implies(PdlFormula::prop("init"), PdlFormula::possibly(p, target))
                }
                None => PdlFormula::implies(PdlFormula::prop("init"), target),
            };
            let (l, r) = separates(&left, &right, &phi)?.ok_or_else(|| {
                CorrespondenceError::HardFailure(format!(
                    "word formula {phi} does not separate {alpha} and {beta}"
                ))
            })?;
            found = Some((phi, l, r));
        }
    }
    let verdict = match (found, word.is_some()) {
        (None, false) => Verdict::Consistent,
        (None, true) => unreachable!("the word formula always separates"),
        (Some((phi, l, r)), negative) => {
            let witness = Witness::Pdl {
                formula: phi.to_string(),
                valid_in_left: l,
                valid_in_right: r,
                word: word.clone(),
            };
            if negative {
                Verdict::Witness { witness }
            } else {
                Verdict::Violation { witness }
            }
        }
    };
    Ok(CorrespondenceReport {
        proposition: Proposition::AutomatonValidity,
        instance,
        verdict,
        bounds,
    })
}

/// Per-proposition counts as an aligned text table.
pub fn summary_table(reports: &[CorrespondenceReport]) -> String {
    let mut rows: std::collections::BTreeMap<Proposition, [usize; 3]> = Default::default();
    for r in reports {
        let row = rows.entry(r.proposition).or_default();
        match r.verdict {
            Verdict::Consistent => row[0] += 1,
            Verdict::Witness { .. } => row[1] += 1,
            Verdict::Violation { .. } => row[2] += 1,
        }
    }
    let mut out = format!(
        "{:<12} {:>9} {:>11} {:>9} {:>10}\n",
        "proposition", "instances", "consistent", "witness", "violation"
    );
    for (p, [c, w, v]) in rows {
        out.push_str(&format!(
            "{:<12} {:>9} {:>11} {:>9} {:>10}\n",
            p.to_string(),
            c + w + v,
            c,
            w,
            v
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ccs::parse_process;
    use crate::regprog::parse_program;

    fn p(s: &str) -> Process {
        parse_process(s).unwrap()
    }

    fn prog(s: &str) -> RegProgram {
        parse_program(s).unwrap()
    }

    #[test]
    fn prop1_examples() {
        assert!(check_prop1(&p("0"), &p("0"), 3)
            .unwrap()
            .verdict
            .is_consistent());
        let r = check_prop1(&p("tau.tau.0"), &p("tau.0"), 2).unwrap();
        let Some(Witness::Hml { formula, .. }) = r.verdict.witness() else {
            panic!("expected witness")
        };
        let f = crate::hml::parse_hml(formula).unwrap();
        assert!(satisfies(&p("tau.tau.0"), &f) && !satisfies(&p("tau.0"), &f));
    }

    #[test]
    fn sweep_matches_plain_enumeration() {
        let (a, b) = (p("a?.(b!.0 + c!.0)"), p("a?.b!.0 + a?.c!.0"));
        let (l, r) = lts_pair(&a, &b).unwrap();
        let g = Combined::new(&l, &r);
        let actions: BTreeSet<Action> = g.succ.iter().flatten().map(|(x, _)| x.clone()).collect();
        let exts = hml_sweep(&g, &actions, 3, 5);
        let plain = enumerate_formulas(&actions, 3, 5);
        let distinct: BTreeSet<Vec<bool>> = plain
            .iter()
            .map(|f| {
                (0..g.states.len())
                    .map(|s| satisfies(&g.states[s], f))
                    .collect()
            })
            .collect();
        let swept: BTreeSet<Vec<bool>> = exts
            .iter()
            .map(|(_, e)| (0..g.states.len()).map(|s| e.get(s)).collect())
            .collect();
        assert_eq!(distinct, swept);
    }

    #[test]
    fn prop2_agrees_with_prop1() {
        for (a, b) in [("0", "0"), ("tau.tau.0", "tau.0"), ("a?.0 | 0", "a?.0")] {
            let one = check_prop1(&p(a), &p(b), 2).unwrap();
            let two = check_prop2_intension(&p(a), &p(b), 2).unwrap();
            assert_eq!(one.verdict, two.verdict);
        }
    }

    #[test]
    fn prop3_examples() {
        let cfg = SamplingConfig::default();
        assert!(check_prop3(&prog("a"), &prog("a+a"), &cfg)
            .unwrap()
            .verdict
            .is_consistent());
        let same = check_prop3(&prog("a;b*"), &prog("a;b*"), &cfg).unwrap();
        assert_eq!(same.bounds.models_sampled, Some(0));
        let r = check_prop3(&prog("a"), &prog("b"), &cfg).unwrap();
        let Some(Witness::Model {
            left_holds,
            right_holds,
            model,
            ..
        }) = r.verdict.witness()
        else {
            panic!("expected model witness")
        };
        assert!(*left_holds && !*right_holds);
        assert_eq!(model.states.len(), 2);
    }

    #[test]
    fn prop4_examples() {
        assert!(check_prop4(&prog("a"), &prog("a+a"), 2)
            .unwrap()
            .verdict
            .is_consistent());
        assert!(check_prop4(&prog("a;b"), &prog("a;b"), 2)
            .unwrap()
            .verdict
            .is_consistent());
        let r = check_prop4(&prog("a"), &prog("b"), 1).unwrap();
        let Some(Witness::Pdl {
            formula,
            valid_in_left,
            valid_in_right,
            ..
        }) = r.verdict.witness()
        else {
            panic!("expected formula witness")
        };
        assert_eq!(formula, "~init | <a>true");
        assert!(*valid_in_left && !*valid_in_right);
    }

    #[test]
    fn prop4_fails_for_branching_differences() {
        let r = check_prop4(&prog("a;b + a;c"), &prog("a;(b + c)"), 2).unwrap();
        assert!(matches!(r.verdict, Verdict::Violation { .. }));
    }

    #[test]
    fn chain_model_shape() {
        let w: Vec<String> = vec!["a".into(), "b".into()];
        let m = chain_model(
            &w,
            &["a".to_string(), "b".to_string(), "c".to_string()].into(),
        );
        assert_eq!(m.len(), 3);
        assert!(m.holds(2, "end"));
        assert_eq!(
            m.interpretation().relation("b").unwrap().pairs(),
            vec![(1, 2)]
        );
        assert!(m.interpretation().relation("c").unwrap().is_empty());
    }

    #[test]
    fn reports_serialize_as_json_lines() {
        let r = check_prop1(&p("tau.tau.0"), &p("tau.0"), 2).unwrap();
        let line = r.to_json_line();
        assert!(!line.contains('\n'));
        let back: CorrespondenceReport = serde_json::from_str(&line).unwrap();
        assert_eq!(back, r);
        assert!(summary_table(&[r]).contains("prop1"));
    }
}
