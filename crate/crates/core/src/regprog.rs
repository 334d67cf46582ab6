//! Regular programs and their relational input-output semantics.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pdl::PdlFormula;
use crate::syntax::{parse_all, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RegProgram {
    Prim(String),
    Seq(Box<RegProgram>, Box<RegProgram>),
    Choice(Box<RegProgram>, Box<RegProgram>),
    Star(Box<RegProgram>),
    Zero,
    One,
    Test(Box<PdlFormula>),
}

impl RegProgram {
    pub fn prim(name: impl Into<String>) -> Self {
        RegProgram::Prim(name.into())
    }

    pub fn seq(l: RegProgram, r: RegProgram) -> Self {
        RegProgram::Seq(Box::new(l), Box::new(r))
    }

    pub fn choice(l: RegProgram, r: RegProgram) -> Self {
        RegProgram::Choice(Box::new(l), Box::new(r))
    }

    pub fn star(p: RegProgram) -> Self {
        RegProgram::Star(Box::new(p))
    }

    pub fn test(f: PdlFormula) -> Self {
        RegProgram::Test(Box::new(f))
    }

    /// Only primitives, `;`, `+` and `*`.
    pub fn is_core(&self) -> bool {
        match self {
            RegProgram::Prim(_) => true,
            RegProgram::Seq(l, r) | RegProgram::Choice(l, r) => l.is_core() && r.is_core(),
            RegProgram::Star(p) => p.is_core(),
            RegProgram::Zero | RegProgram::One | RegProgram::Test(_) => false,
        }
    }

    /// Core forms plus the constants `0` and `1`.
    pub fn is_test_free(&self) -> bool {
        match self {
            RegProgram::Prim(_) | RegProgram::Zero | RegProgram::One => true,
            RegProgram::Seq(l, r) | RegProgram::Choice(l, r) => {
                l.is_test_free() && r.is_test_free()
            }
            RegProgram::Star(p) => p.is_test_free(),
            RegProgram::Test(_) => false,
        }
    }

    /// Number of constructor nodes.
    pub fn size(&self) -> usize {
        match self {
            RegProgram::Prim(_) | RegProgram::Zero | RegProgram::One | RegProgram::Test(_) => 1,
            RegProgram::Seq(l, r) | RegProgram::Choice(l, r) => 1 + l.size() + r.size(),
            RegProgram::Star(p) => 1 + p.size(),
        }
    }

    /// Primitive names occurring outside tests.
    pub fn primitives(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_primitives(&mut out);
        out
    }

    pub(crate) fn collect_primitives(&self, out: &mut BTreeSet<String>) {
        match self {
            RegProgram::Prim(a) => {
                out.insert(a.clone());
            }
            RegProgram::Seq(l, r) | RegProgram::Choice(l, r) => {
                l.collect_primitives(out);
                r.collect_primitives(out);
            }
            RegProgram::Star(p) => p.collect_primitives(out),
            RegProgram::Zero | RegProgram::One | RegProgram::Test(_) => {}
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        // 1: choice, 2: sequence, 3: star operand
        let paren = |f: &mut fmt::Formatter<'_>, open: bool, s: &str| {
            if open {
                f.write_str(s)
            } else {
                Ok(())
            }
        };
        match self {
            RegProgram::Prim(a) => f.write_str(a),
            RegProgram::Zero => f.write_str("0"),
            RegProgram::One => f.write_str("1"),
            RegProgram::Choice(l, r) => {
                paren(f, prec > 1, "(")?;
                l.fmt_prec(f, 1)?;
                f.write_str(" + ")?;
                r.fmt_prec(f, 2)?;
                paren(f, prec > 1, ")")
            }
            RegProgram::Seq(l, r) => {
                paren(f, prec > 2, "(")?;
                l.fmt_prec(f, 2)?;
                f.write_str(";")?;
                r.fmt_prec(f, 3)?;
                paren(f, prec > 2, ")")
            }
            RegProgram::Star(p) => {
                p.fmt_prec(f, 3)?;
                f.write_str("*")
            }
            RegProgram::Test(phi) => match &**phi {
                PdlFormula::Prop(_) | PdlFormula::True => write!(f, "{phi}?"),
                _ => write!(f, "({phi})?"),
            },
        }
    }
}

impl fmt::Display for RegProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl Serialize for RegProgram {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RegProgram {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_program_with(&text, ProgramSyntax::DYNAMIC).map_err(serde::de::Error::custom)
    }
}

/// Which extensions of the core grammar a parse accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProgramSyntax {
    pub constants: bool,
    pub tests: bool,
}

impl ProgramSyntax {
    pub const CORE: ProgramSyntax = ProgramSyntax {
        constants: false,
        tests: false,
    };
    /// Kleene-algebra terms: `0` and `1` allowed.
    pub const KLEENE: ProgramSyntax = ProgramSyntax {
        constants: true,
        tests: false,
    };
    /// PDL programs: constants and tests allowed.
    pub const DYNAMIC: ProgramSyntax = ProgramSyntax {
        constants: true,
        tests: true,
    };
}

/// Parses a core program: primitives, `;`, `+`, `*` and parentheses.
pub fn parse_program(text: &str) -> Result<RegProgram, ParseError> {
    parse_program_with(text, ProgramSyntax::CORE)
}

pub fn parse_program_with(text: &str, syntax: ProgramSyntax) -> Result<RegProgram, ParseError> {
    parse_all(text, |p| p.program(syntax))
}

impl std::str::FromStr for RegProgram {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_program_with(s, ProgramSyntax::KLEENE)
    }
}

/// A binary relation on `{0, .., n-1}` as a dense boolean matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    n: usize,
    bits: Vec<bool>,
}

impl Relation {
    pub fn empty(n: usize) -> Self {
        Relation {
            n,
            bits: vec![false; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut r = Self::empty(n);
        for i in 0..n {
            r.insert(i, i);
        }
        r
    }

    /// Panics if a pair leaves the state range.
    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut r = Self::empty(n);
        for (u, v) in pairs {
            assert!(u < n && v < n, "pair ({u},{v}) outside {n} states");
            r.insert(u, v);
        }
        r
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        self.bits[u * self.n + v]
    }

    pub fn insert(&mut self, u: usize, v: usize) -> bool {
        let slot = &mut self.bits[u * self.n + v];
        let fresh = !*slot;
        *slot = true;
        fresh
    }

    pub fn len(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|b| *b)
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|u| (0..self.n).map(move |v| (u, v)))
            .filter(|&(u, v)| self.contains(u, v))
            .collect()
    }

    pub fn successors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&v| self.contains(u, v))
    }

    pub fn union(&self, other: &Relation) -> Relation {
        assert_eq!(self.n, other.n);
        Relation {
            n: self.n,
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(a, b)| *a || *b)
                .collect(),
        }
    }

    /// `{(u,v) | exists w. (u,w) in self and (w,v) in other}`
    pub fn compose(&self, other: &Relation) -> Relation {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::empty(n);
        for u in 0..n {
            for w in self.successors(u) {
                for v in 0..n {
                    if other.contains(w, v) {
                        out.bits[u * n + v] = true;
                    }
                }
            }
        }
        out
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| !*a || *b)
    }

    /// Union of all powers, iterating `R* := Id ∪ R*;R` until no pair is
    /// added.
    pub fn star(&self) -> Relation {
        let mut acc = Self::identity(self.n);
        loop {
            let next = acc.union(&acc.compose(self));
            if next == acc {
                return acc;
            }
            acc = next;
        }
    }

    pub fn restrict_diagonal(n: usize, keep: impl Fn(usize) -> bool) -> Relation {
        Self::from_pairs(n, (0..n).filter(|&i| keep(i)).map(|i| (i, i)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unknown primitive program `{0}`")]
    UnknownPrimitive(String),
    #[error("tests are only meaningful inside a Kripke structure")]
    TestOutsideModel,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InterpretationError {
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("relation `{relation}` mentions unknown state `{state}`")]
    UnknownState { relation: String, state: String },
    #[error("invalid JSON: {0}")]
    Json(String),
}

/// A state named either by number or by string in JSON input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateName {
    Number(u64),
    Name(String),
}

impl fmt::Display for StateName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateName::Number(n) => write!(f, "{n}"),
            StateName::Name(s) => f.write_str(s),
        }
    }
}

/// Interpretation file format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterpretationJson {
    pub states: Vec<StateName>,
    #[serde(default)]
    pub relations: BTreeMap<String, Vec<[StateName; 2]>>,
}

/// Finite state set with a relation per primitive program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interpretation {
    names: Vec<StateName>,
    relations: BTreeMap<String, Relation>,
}

impl Interpretation {
    /// States `0..n`, no relations yet.
    pub fn new(n: usize) -> Self {
        Interpretation {
            names: (0..n as u64).map(StateName::Number).collect(),
            relations: BTreeMap::new(),
        }
    }

    pub fn with_relation(
        mut self,
        name: impl Into<String>,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Self {
        let n = self.len();
        self.relations
            .insert(name.into(), Relation::from_pairs(n, pairs));
        self
    }

    pub fn set_relation(&mut self, name: impl Into<String>, rel: Relation) {
        assert_eq!(rel.size(), self.len());
        self.relations.insert(name.into(), rel);
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn state_name(&self, i: usize) -> &StateName {
        &self.names[i]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|s| s.to_string() == name)
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations.get(name)
    }

    pub fn relations(&self) -> &BTreeMap<String, Relation> {
        &self.relations
    }

    pub fn from_json_value(json: InterpretationJson) -> Result<Self, InterpretationError> {
        let mut index: BTreeMap<String, usize> = BTreeMap::new();
        for (i, s) in json.states.iter().enumerate() {
            if index.insert(s.to_string(), i).is_some() {
                return Err(InterpretationError::DuplicateState(s.to_string()));
            }
        }
        let n = json.states.len();
        let mut relations = BTreeMap::new();
        for (name, pairs) in json.relations {
            let mut rel = Relation::empty(n);
            for [u, v] in pairs {
                let look = |s: &StateName| {
                    index.get(&s.to_string()).copied().ok_or_else(|| {
                        InterpretationError::UnknownState {
                            relation: name.clone(),
                            state: s.to_string(),
                        }
                    })
                };
                rel.insert(look(&u)?, look(&v)?);
            }
            relations.insert(name, rel);
        }
        Ok(Interpretation {
            names: json.states,
            relations,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, InterpretationError> {
        let json: InterpretationJson =
            serde_json::from_str(text).map_err(|e| InterpretationError::Json(e.to_string()))?;
        Self::from_json_value(json)
    }

    pub fn to_json_value(&self) -> InterpretationJson {
        InterpretationJson {
            states: self.names.clone(),
            relations: self
                .relations
                .iter()
                .map(|(a, r)| (a.clone(), self.named_pairs(r)))
                .collect(),
        }
    }

    pub fn named_pairs(&self, r: &Relation) -> Vec<[StateName; 2]> {
        r.pairs()
            .into_iter()
            .map(|(u, v)| [self.names[u].clone(), self.names[v].clone()])
            .collect()
    }
}

/// Shared evaluator: `prim` and `test` supply the base relations.
pub(crate) fn eval_generic<E>(
    n: usize,
    alpha: &RegProgram,
    prim: &mut dyn FnMut(&str) -> Result<Relation, E>,
    test: &mut dyn FnMut(&PdlFormula) -> Result<Relation, E>,
) -> Result<Relation, E> {
    Ok(match alpha {
        RegProgram::Prim(a) => prim(a)?,
        RegProgram::Seq(l, r) => {
            eval_generic(n, l, prim, test)?.compose(&eval_generic(n, r, prim, test)?)
        }
        RegProgram::Choice(l, r) => {
            eval_generic(n, l, prim, test)?.union(&eval_generic(n, r, prim, test)?)
        }
        RegProgram::Star(p) => eval_generic(n, p, prim, test)?.star(),
        RegProgram::Zero => Relation::empty(n),
        RegProgram::One => Relation::identity(n),
        RegProgram::Test(phi) => test(phi)?,
    })
}

/// The input-output relation of `alpha` under `sigma`. `0` denotes the
/// empty relation and `1` the identity.
pub fn eval_relation(sigma: &Interpretation, alpha: &RegProgram) -> Result<Relation, EvalError> {
    eval_generic(
        sigma.len(),
        alpha,
        &mut |a| {
            sigma
                .relation(a)
                .cloned()
                .ok_or_else(|| EvalError::UnknownPrimitive(a.to_string()))
        },
        &mut |_| Err(EvalError::TestOutsideModel),
    )
}
