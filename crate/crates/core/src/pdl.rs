//! Propositional dynamic logic over finite Kripke structures, with poor
//! tests.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::regprog::{
    eval_generic, Interpretation, InterpretationError, InterpretationJson, RegProgram, Relation,
    StateName,
};
use crate::syntax::{parse_all, ParseError};

/// Core PDL. `false`, `|`, `=>`, `<=>` and `<alpha>` are sugar.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PdlFormula {
    True,
    Prop(String),
    Not(Box<PdlFormula>),
    And(Box<PdlFormula>, Box<PdlFormula>),
    Necessarily(RegProgram, Box<PdlFormula>),
}

impl PdlFormula {
    pub fn prop(p: impl Into<String>) -> Self {
        PdlFormula::Prop(p.into())
    }

    pub fn not(f: PdlFormula) -> Self {
        PdlFormula::Not(Box::new(f))
    }

    pub fn and(l: PdlFormula, r: PdlFormula) -> Self {
        PdlFormula::And(Box::new(l), Box::new(r))
    }

    pub fn necessarily(alpha: RegProgram, f: PdlFormula) -> Self {
        PdlFormula::Necessarily(alpha, Box::new(f))
    }

    pub fn falsity() -> Self {
        Self::not(PdlFormula::True)
    }

    pub fn or(l: PdlFormula, r: PdlFormula) -> Self {
        Self::not(Self::and(Self::not(l), Self::not(r)))
    }

    pub fn implies(l: PdlFormula, r: PdlFormula) -> Self {
        Self::or(Self::not(l), r)
    }

    /// `(l => r) & (r => l)`
    pub fn iff(l: PdlFormula, r: PdlFormula) -> Self {
        Self::and(Self::implies(l.clone(), r.clone()), Self::implies(r, l))
    }

    /// `<alpha>phi` is `~[alpha]~phi`.
    pub fn possibly(alpha: RegProgram, f: PdlFormula) -> Self {
        Self::not(Self::necessarily(alpha, Self::not(f)))
    }

    /// No boxes or diamonds anywhere.
    pub fn is_propositional(&self) -> bool {
        match self {
            PdlFormula::True | PdlFormula::Prop(_) => true,
            PdlFormula::Not(f) => f.is_propositional(),
            PdlFormula::And(l, r) => l.is_propositional() && r.is_propositional(),
            PdlFormula::Necessarily(..) => false,
        }
    }

    pub fn modal_depth(&self) -> usize {
        match self {
            PdlFormula::True | PdlFormula::Prop(_) => 0,
            PdlFormula::Not(f) => f.modal_depth(),
            PdlFormula::And(l, r) => l.modal_depth().max(r.modal_depth()),
            PdlFormula::Necessarily(_, f) => 1 + f.modal_depth(),
        }
    }

    pub fn propositions(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_props(&mut out);
        out
    }

    fn collect_props(&self, out: &mut BTreeSet<String>) {
        match self {
            PdlFormula::True => {}
            PdlFormula::Prop(p) => {
                out.insert(p.clone());
            }
            PdlFormula::Not(f) => f.collect_props(out),
            PdlFormula::And(l, r) => {
                l.collect_props(out);
                r.collect_props(out);
            }
            PdlFormula::Necessarily(alpha, f) => {
                program_props(alpha, out);
                f.collect_props(out);
            }
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        // 1: disjunction, 2: conjunction, 3: prefix operators
        match self {
            PdlFormula::True => f.write_str("true"),
            PdlFormula::Prop(p) => f.write_str(p),
            PdlFormula::Not(inner) => match &**inner {
                PdlFormula::True => f.write_str("false"),
                PdlFormula::Necessarily(alpha, body) if matches!(**body, PdlFormula::Not(_)) => {
                    let PdlFormula::Not(phi) = &**body else {
                        unreachable!()
                    };
                    write!(f, "<{alpha}>")?;
                    phi.fmt_prec(f, 3)
                }
                PdlFormula::And(l, r)
                    if matches!(**l, PdlFormula::Not(_)) && matches!(**r, PdlFormula::Not(_)) =>
                {
                    let (PdlFormula::Not(l), PdlFormula::Not(r)) = (&**l, &**r) else {
                        unreachable!()
                    };
                    if prec > 1 {
                        f.write_str("(")?;
                    }
                    l.fmt_prec(f, 1)?;
                    f.write_str(" | ")?;
                    r.fmt_prec(f, 2)?;
                    if prec > 1 {
                        f.write_str(")")?;
                    }
                    Ok(())
                }
                other => {
                    f.write_str("~")?;
                    other.fmt_prec(f, 3)
                }
            },
            PdlFormula::And(l, r) => {
                if prec > 2 {
                    f.write_str("(")?;
                }
                l.fmt_prec(f, 2)?;
                f.write_str(" & ")?;
                r.fmt_prec(f, 3)?;
                if prec > 2 {
                    f.write_str(")")?;
                }
                Ok(())
            }
            PdlFormula::Necessarily(alpha, body) => {
                write!(f, "[{alpha}]")?;
                body.fmt_prec(f, 3)
            }
        }
    }
}

fn program_props(alpha: &RegProgram, out: &mut BTreeSet<String>) {
    match alpha {
        RegProgram::Test(phi) => phi.collect_props(out),
        RegProgram::Seq(l, r) | RegProgram::Choice(l, r) => {
            program_props(l, out);
            program_props(r, out);
        }
        RegProgram::Star(p) => program_props(p, out),
        RegProgram::Prim(_) | RegProgram::Zero | RegProgram::One => {}
    }
}

impl fmt::Display for PdlFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl Serialize for PdlFormula {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PdlFormula {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_pdl(&text).map_err(serde::de::Error::custom)
    }
}

pub fn parse_pdl(text: &str) -> Result<PdlFormula, ParseError> {
    parse_all(text, |p| p.pdl())
}

impl std::str::FromStr for PdlFormula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_pdl(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PdlError {
    #[error("unknown proposition `{0}`")]
    UnknownProposition(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("test `{0}?` contains a modality; only propositional tests are supported")]
    RichTestRejected(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KripkeError {
    #[error(transparent)]
    Interpretation(#[from] InterpretationError),
    #[error("valuation mentions unknown state `{0}`")]
    UnknownState(String),
}

/// Kripke file format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KripkeJson {
    pub states: Vec<StateName>,
    #[serde(default)]
    pub props: BTreeMap<String, BTreeMap<String, bool>>,
    #[serde(default)]
    pub relations: BTreeMap<String, Vec<[StateName; 2]>>,
}

/// `(S, pi, sigma)`. Propositions are declared up front; a state without an
/// entry for a declared proposition reads it as false.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KripkeStructure {
    sigma: Interpretation,
    declared: BTreeSet<String>,
    valuation: Vec<BTreeSet<String>>,
}

impl KripkeStructure {
    pub fn new(sigma: Interpretation, declared: impl IntoIterator<Item = String>) -> Self {
        let n = sigma.len();
        KripkeStructure {
            sigma,
            declared: declared.into_iter().collect(),
            valuation: vec![BTreeSet::new(); n],
        }
    }

    /// Declares `p` if needed and makes it true at `s`.
    pub fn set_true(&mut self, s: usize, p: &str) {
        self.declared.insert(p.to_string());
        self.valuation[s].insert(p.to_string());
    }

    pub fn declare(&mut self, p: &str) {
        self.declared.insert(p.to_string());
    }

    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    pub fn interpretation(&self) -> &Interpretation {
        &self.sigma
    }

    pub fn declared(&self) -> &BTreeSet<String> {
        &self.declared
    }

    pub fn holds(&self, s: usize, p: &str) -> bool {
        self.valuation[s].contains(p)
    }

    pub fn state_index(&self, name: &str) -> Result<usize, PdlError> {
        self.sigma
            .state_index(name)
            .ok_or_else(|| PdlError::UnknownState(name.to_string()))
    }

    pub fn from_json_value(json: KripkeJson) -> Result<Self, KripkeError> {
        let sigma = Interpretation::from_json_value(InterpretationJson {
            states: json.states,
            relations: json.relations,
        })?;
        let mut m = KripkeStructure::new(sigma, []);
        for (state, vals) in json.props {
            let s = m
                .sigma
                .state_index(&state)
                .ok_or_else(|| KripkeError::UnknownState(state.clone()))?;
            for (p, value) in vals {
                m.declare(&p);
                if value {
                    m.set_true(s, &p);
                }
            }
        }
        Ok(m)
    }

    pub fn from_json(text: &str) -> Result<Self, KripkeError> {
        let json: KripkeJson = serde_json::from_str(text)
            .map_err(|e| KripkeError::Interpretation(InterpretationError::Json(e.to_string())))?;
        Self::from_json_value(json)
    }

    pub fn to_json_value(&self) -> KripkeJson {
        let base = self.sigma.to_json_value();
        let props = (0..self.len())
            .map(|s| {
                let vals = self
                    .declared
                    .iter()
                    .map(|p| (p.clone(), self.holds(s, p)))
                    .collect();
                (self.sigma.state_name(s).to_string(), vals)
            })
            .collect();
        KripkeJson {
            states: base.states,
            props,
            relations: base.relations,
        }
    }

    fn check_formula(&self, phi: &PdlFormula) -> Result<(), PdlError> {
        for p in phi.propositions() {
            if !self.declared.contains(&p) {
                return Err(PdlError::UnknownProposition(p));
            }
        }
        check_tests_formula(phi)
    }

    /// States satisfying `phi`; assumes `check_formula` passed.
    fn extension(&self, phi: &PdlFormula) -> Vec<bool> {
        let n = self.len();
        match phi {
            PdlFormula::True => vec![true; n],
            PdlFormula::Prop(p) => (0..n).map(|s| self.holds(s, p)).collect(),
            PdlFormula::Not(f) => self.extension(f).into_iter().map(|b| !b).collect(),
            PdlFormula::And(l, r) => {
                let l = self.extension(l);
                let r = self.extension(r);
                l.into_iter().zip(r).map(|(a, b)| a && b).collect()
            }
            PdlFormula::Necessarily(alpha, f) => {
                let rel = self.relation_unchecked(alpha);
                let inner = self.extension(f);
                (0..n)
                    .map(|s| rel.successors(s).all(|t| inner[t]))
                    .collect()
            }
        }
    }

    fn relation_unchecked(&self, alpha: &RegProgram) -> Relation {
        let n = self.len();
        let result: Result<Relation, std::convert::Infallible> = eval_generic(
            n,
            alpha,
            &mut |a| {
                Ok(self
                    .sigma
                    .relation(a)
                    .cloned()
                    .unwrap_or_else(|| Relation::empty(n)))
            },
            &mut |phi| {
                let ext = self.extension(phi);
                Ok(Relation::restrict_diagonal(n, |s| ext[s]))
            },
        );
        match result {
            Ok(r) => r,
            Err(never) => match never {},
        }
    }
}

fn check_tests_formula(phi: &PdlFormula) -> Result<(), PdlError> {
    match phi {
        PdlFormula::True | PdlFormula::Prop(_) => Ok(()),
        PdlFormula::Not(f) => check_tests_formula(f),
        PdlFormula::And(l, r) => {
            check_tests_formula(l)?;
            check_tests_formula(r)
        }
        PdlFormula::Necessarily(alpha, f) => {
            check_tests_program(alpha)?;
            check_tests_formula(f)
        }
    }
}

fn check_tests_program(alpha: &RegProgram) -> Result<(), PdlError> {
    match alpha {
        RegProgram::Test(phi) if !phi.is_propositional() => {
            Err(PdlError::RichTestRejected(phi.to_string()))
        }
        RegProgram::Seq(l, r) | RegProgram::Choice(l, r) => {
            check_tests_program(l)?;
            check_tests_program(r)
        }
        RegProgram::Star(p) => check_tests_program(p),
        _ => Ok(()),
    }
}

/// `(M, s) ⊨ phi`. Primitive programs missing from the structure denote
/// the empty relation.
pub fn pdl_satisfies(m: &KripkeStructure, s: usize, phi: &PdlFormula) -> Result<bool, PdlError> {
    if s >= m.len() {
        return Err(PdlError::UnknownState(s.to_string()));
    }
    m.check_formula(phi)?;
    Ok(m.extension(phi)[s])
}

/// All states satisfying `phi`.
pub fn satisfying_states(m: &KripkeStructure, phi: &PdlFormula) -> Result<Vec<bool>, PdlError> {
    m.check_formula(phi)?;
    Ok(m.extension(phi))
}

/// The relation denoted by `alpha` in `m`, tests included.
pub fn program_relation(m: &KripkeStructure, alpha: &RegProgram) -> Result<Relation, PdlError> {
    check_tests_program(alpha)?;
    let mut props = BTreeSet::new();
    program_props(alpha, &mut props);
    if let Some(p) = props.into_iter().find(|p| !m.declared.contains(p)) {
        return Err(PdlError::UnknownProposition(p));
    }
    Ok(m.relation_unchecked(alpha))
}

/// `M ⊨ phi`: true at every state.
pub fn valid_in(m: &KripkeStructure, phi: &PdlFormula) -> Result<bool, PdlError> {
    Ok(satisfying_states(m, phi)?.into_iter().all(|b| b))
}

/// The first state falsifying `phi`, if any.
pub fn counter_state(m: &KripkeStructure, phi: &PdlFormula) -> Result<Option<usize>, PdlError> {
    Ok(satisfying_states(m, phi)?.into_iter().position(|b| !b))
}
