//! Equational proofs in Kleene algebra.
//!
//! Script format, one item per line (`#` starts a comment):
//!
//! ```text
//! goal: a*;0 <= 0
//! hyp h: a;a = a
//! 1. a;0 = 0            BY axiom(seq-zero, x:=a)
//! 2. 0 + a;0 = 0 + 0    BY cong(1, [1])
//! ...
//! ```
//!
//! `x <= y` is stored as `x + y = y`. Justifications:
//! `axiom(name, v:=term, ...)`, `refl`, `sym(i)`, `trans(i, j, ...)`,
//! `cong(i, [path])`, `star-ind-l(i)`, `star-ind-r(i)`, `hyp(name)`.
//! Paths pick children from the root: `0` is the left operand (or the
//! body of a star), `1` the right operand.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automata::{compile, words_up_to};
use crate::regprog::{parse_program_with, ProgramSyntax, RegProgram};
use crate::syntax::{parse_all, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Equation {
    pub lhs: RegProgram,
    pub rhs: RegProgram,
}

impl Equation {
    pub fn new(lhs: RegProgram, rhs: RegProgram) -> Self {
        Equation { lhs, rhs }
    }

    /// `x <= y` as `x + y = y`.
    pub fn le(x: RegProgram, y: RegProgram) -> Self {
        Equation::new(RegProgram::choice(x, y.clone()), y)
    }

    pub fn flipped(&self) -> Self {
        Equation::new(self.rhs.clone(), self.lhs.clone())
    }

    fn substitute(&self, s: &BTreeMap<String, RegProgram>) -> Self {
        Equation::new(substitute(&self.lhs, s), substitute(&self.rhs, s))
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

/// Accepts `lhs = rhs` and `lhs <= rhs`.
pub fn parse_equation(text: &str) -> Result<Equation, ParseError> {
    let (lhs, rhs, is_le) = parse_all(text, |p| p.equation())?;
    Ok(if is_le {
        Equation::le(lhs, rhs)
    } else {
        Equation::new(lhs, rhs)
    })
}

impl std::str::FromStr for Equation {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_equation(s)
    }
}

impl Serialize for Equation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Equation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_equation(&text).map_err(serde::de::Error::custom)
    }
}

fn substitute(t: &RegProgram, s: &BTreeMap<String, RegProgram>) -> RegProgram {
    match t {
        RegProgram::Prim(v) => s.get(v).cloned().unwrap_or_else(|| t.clone()),
        RegProgram::Seq(l, r) => RegProgram::seq(substitute(l, s), substitute(r, s)),
        RegProgram::Choice(l, r) => RegProgram::choice(substitute(l, s), substitute(r, s)),
        RegProgram::Star(p) => RegProgram::star(substitute(p, s)),
        RegProgram::Zero | RegProgram::One | RegProgram::Test(_) => t.clone(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxiomShape {
    /// Every ordered pair `sides[i] = sides[j]` with `i < j` is an instance.
    Chain(&'static [&'static str]),
    /// From a proved premise conclude the conclusion.
    Horn {
        premise: &'static str,
        conclusion: &'static str,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Axiom {
    pub name: &'static str,
    pub shape: AxiomShape,
}

/// The Kleene-algebra axioms, in their conventional order.
pub const AXIOMS: [Axiom; 13] = [
    Axiom {
        name: "plus-assoc",
        shape: AxiomShape::Chain(&["x+(y+z)", "(x+y)+z"]),
    },
    Axiom {
        name: "plus-comm",
        shape: AxiomShape::Chain(&["x+y", "y+x"]),
    },
    Axiom {
        name: "plus-zero",
        shape: AxiomShape::Chain(&["x+0", "x"]),
    },
    Axiom {
        name: "plus-idem",
        shape: AxiomShape::Chain(&["x+x", "x"]),
    },
    Axiom {
        name: "seq-assoc",
        shape: AxiomShape::Chain(&["x;(y;z)", "(x;y);z"]),
    },
    Axiom {
        name: "seq-one",
        shape: AxiomShape::Chain(&["1;x", "x;1", "x"]),
    },
    Axiom {
        name: "seq-dist-l",
        shape: AxiomShape::Chain(&["x;(y+z)", "x;y + x;z"]),
    },
    Axiom {
        name: "seq-dist-r",
        shape: AxiomShape::Chain(&["(x+y);z", "x;z + y;z"]),
    },
    Axiom {
        name: "seq-zero",
        shape: AxiomShape::Chain(&["0;x", "x;0", "0"]),
    },
    Axiom {
        name: "star-unfold-l",
        shape: AxiomShape::Chain(&["(1 + x;x*) + x*", "x*"]),
    },
    Axiom {
        name: "star-unfold-r",
        shape: AxiomShape::Chain(&["(1 + x*;x) + x*", "x*"]),
    },
    Axiom {
        name: "star-ind-l",
        shape: AxiomShape::Horn {
            premise: "b + a;x <= x",
            conclusion: "a*;b <= x",
        },
    },
    Axiom {
        name: "star-ind-r",
        shape: AxiomShape::Horn {
            premise: "b + x;a <= x",
            conclusion: "b;a* <= x",
        },
    },
];

pub fn axiom(name: &str) -> Option<&'static Axiom> {
    AXIOMS.iter().find(|a| a.name == name)
}

fn schema_term(text: &str) -> RegProgram {
    parse_program_with(text, ProgramSyntax::KLEENE).expect("axiom schema parses")
}

fn schema_equation(text: &str) -> Equation {
    parse_equation(text).expect("axiom schema parses")
}

/// An axiom instantiated by a substitution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomInstance {
    Equations(Vec<Equation>),
    Horn {
        premise: Equation,
        conclusion: Equation,
    },
}

impl Axiom {
    pub fn is_horn(&self) -> bool {
        matches!(self.shape, AxiomShape::Horn { .. })
    }

    /// Schema variables, sorted.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        match self.shape {
            AxiomShape::Chain(sides) => {
                for s in sides {
                    out.extend(schema_term(s).primitives());
                }
            }
            AxiomShape::Horn {
                premise,
                conclusion,
            } => {
                for e in [schema_equation(premise), schema_equation(conclusion)] {
                    out.extend(e.lhs.primitives());
                    out.extend(e.rhs.primitives());
                }
            }
        }
        out
    }

    /// Panics unless `subst` covers the schema variables.
    pub fn instantiate(&self, subst: &BTreeMap<String, RegProgram>) -> AxiomInstance {
        match self.shape {
            AxiomShape::Chain(sides) => {
                let terms: Vec<RegProgram> = sides
                    .iter()
                    .map(|s| substitute(&schema_term(s), subst))
                    .collect();
                let mut eqs = Vec::new();
                for i in 0..terms.len() {
                    for j in i + 1..terms.len() {
                        eqs.push(Equation::new(terms[i].clone(), terms[j].clone()));
                    }
                }
                AxiomInstance::Equations(eqs)
            }
            AxiomShape::Horn {
                premise,
                conclusion,
            } => AxiomInstance::Horn {
                premise: schema_equation(premise).substitute(subst),
                conclusion: schema_equation(conclusion).substitute(subst),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    Axiom {
        name: String,
        substitution: Vec<(String, RegProgram)>,
    },
    Reflexivity,
    Symmetry(usize),
    /// Chains `l = m1`, `m1 = m2`, ..., `mk = r`.
    Transitivity(Vec<usize>),
    Congruence {
        step: usize,
        path: Vec<usize>,
    },
    StarInductionLeft(usize),
    StarInductionRight(usize),
    Hypothesis(String),
}

impl fmt::Display for Justification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[usize]| {
            v.iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join(", ")
        };
        match self {
            Justification::Axiom { name, substitution } => {
                write!(f, "axiom({name}")?;
                for (v, t) in substitution {
                    write!(f, ", {v}:={t}")?;
                }
                f.write_str(")")
            }
            Justification::Reflexivity => f.write_str("refl"),
            Justification::Symmetry(i) => write!(f, "sym({i})"),
            Justification::Transitivity(ix) => write!(f, "trans({})", list(ix)),
            Justification::Congruence { step, path } => write!(f, "cong({step}, [{}])", list(path)),
            Justification::StarInductionLeft(i) => write!(f, "star-ind-l({i})"),
            Justification::StarInductionRight(i) => write!(f, "star-ind-r({i})"),
            Justification::Hypothesis(h) => write!(f, "hyp({h})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message}")]
pub struct JustificationError {
    pub message: String,
}

fn jerr<T>(message: impl Into<String>) -> Result<T, JustificationError> {
    Err(JustificationError {
        message: message.into(),
    })
}

/// Splits on commas outside parentheses and brackets.
fn split_args(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(text[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    let last = text[start..].trim();
    if !last.is_empty() || !out.is_empty() {
        out.push(last);
    }
    out
}

fn index_arg(text: &str) -> Result<usize, JustificationError> {
    text.trim()
        .parse::<usize>()
        .or_else(|_| jerr(format!("expected a step number, found `{}`", text.trim())))
}

pub fn parse_justification(text: &str) -> Result<Justification, JustificationError> {
    let text = text.trim();
    if text == "refl" {
        return Ok(Justification::Reflexivity);
    }
    let Some(open) = text.find('(') else {
        return jerr(format!("unrecognized justification `{text}`"));
    };
    if !text.ends_with(')') {
        return jerr(format!("missing `)` in `{text}`"));
    }
    let head = text[..open].trim();
    let args = split_args(&text[open + 1..text.len() - 1]);
    let one_index = |args: &[&str]| -> Result<usize, JustificationError> {
        match args {
            [i] => index_arg(i),
            _ => jerr(format!("`{head}` takes one step number")),
        }
    };
    match head {
        "axiom" => {
            let Some((name, rest)) = args.split_first() else {
                return jerr("axiom needs a name");
            };
            let mut substitution = Vec::new();
            for binding in rest {
                let Some((v, t)) = binding.split_once(":=") else {
                    return jerr(format!("malformed substitution `{binding}`"));
                };
                let term = parse_program_with(t.trim(), ProgramSyntax::KLEENE).or_else(|e| {
                    jerr(format!("malformed substitution term `{}`: {e}", t.trim()))
                })?;
                substitution.push((v.trim().to_string(), term));
            }
            Ok(Justification::Axiom {
                name: name.to_string(),
                substitution,
            })
        }
        "sym" => Ok(Justification::Symmetry(one_index(&args)?)),
        "trans" => {
            if args.len() < 2 {
                return jerr("trans needs at least two step numbers");
            }
            Ok(Justification::Transitivity(
                args.iter()
                    .map(|a| index_arg(a))
                    .collect::<Result<_, _>>()?,
            ))
        }
        "cong" => {
            let [i, path] = args.as_slice() else {
                return jerr("cong takes a step number and a path");
            };
            let path = path.trim();
            let Some(inner) = path.strip_prefix('[').and_then(|p| p.strip_suffix(']')) else {
                return jerr(format!("expected a path like [0, 1], found `{path}`"));
            };
            let path = split_args(inner)
                .into_iter()
                .map(|c| match c {
                    "0" => Ok(0),
                    "1" => Ok(1),
                    other => jerr(format!("path components are 0 or 1, found `{other}`")),
                })
                .collect::<Result<_, _>>()?;
            Ok(Justification::Congruence {
                step: index_arg(i)?,
                path,
            })
        }
        "star-ind-l" => Ok(Justification::StarInductionLeft(one_index(&args)?)),
        "star-ind-r" => Ok(Justification::StarInductionRight(one_index(&args)?)),
        "hyp" => match args.as_slice() {
            [h] if !h.is_empty() => Ok(Justification::Hypothesis(h.to_string())),
            _ => jerr("hyp takes a hypothesis name"),
        },
        other => jerr(format!("unknown rule `{other}`")),
    }
}

impl Serialize for Justification {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Justification {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_justification(&text).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofStep {
    pub equation: Equation,
    #[serde(rename = "by")]
    pub justification: Justification,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofScript {
    pub goal: Equation,
    #[serde(default)]
    pub hypotheses: BTreeMap<String, Equation>,
    pub steps: Vec<ProofStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScriptError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("script has no goal line")]
    MissingGoal,
    #[error("invalid JSON script: {0}")]
    Json(String),
}

impl ProofScript {
    /// Parses the line-oriented text format.
    pub fn parse(text: &str) -> Result<Self, ScriptError> {
        let mut goal = None;
        let mut hypotheses = BTreeMap::new();
        let mut steps = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let err = |message: String| ScriptError::Line {
                line: line_no,
                message,
            };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("goal:") {
                if goal.is_some() {
                    return Err(err("second goal line".into()));
                }
                goal = Some(parse_equation(rest.trim()).map_err(|e| err(e.to_string()))?);
                continue;
            }
            if let Some(rest) = line.strip_prefix("hyp ") {
                let Some((name, eq)) = rest.split_once(':') else {
                    return Err(err("expected `hyp <name>: <equation>`".into()));
                };
                let eq = parse_equation(eq.trim()).map_err(|e| err(e.to_string()))?;
                if hypotheses.insert(name.trim().to_string(), eq).is_some() {
                    return Err(err(format!("hypothesis `{}` declared twice", name.trim())));
                }
                continue;
            }
            let Some(at) = line.rfind(" BY ") else {
                return Err(err("expected `<equation> BY <justification>`".into()));
            };
            let (mut eq_text, just_text) = (line[..at].trim(), &line[at + 4..]);
            if let Some((num, rest)) = eq_text.split_once('.') {
                if let Ok(n) = num.trim().parse::<usize>() {
                    if n != steps.len() + 1 {
                        return Err(err(format!(
                            "step labelled {n} but it is step {}",
                            steps.len() + 1
                        )));
                    }
                    eq_text = rest.trim();
                }
            }
            let equation = parse_equation(eq_text).map_err(|e| err(e.to_string()))?;
            let justification = parse_justification(just_text).map_err(|e| err(e.message))?;
            steps.push(ProofStep {
                equation,
                justification,
            });
        }
        Ok(ProofScript {
            goal: goal.ok_or(ScriptError::MissingGoal)?,
            hypotheses,
            steps,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, ScriptError> {
        serde_json::from_str(text).map_err(|e| ScriptError::Json(e.to_string()))
    }

    /// Detects JSON by a leading `{`.
    pub fn parse_any(text: &str) -> Result<Self, ScriptError> {
        if text.trim_start().starts_with('{') {
            Self::from_json(text)
        } else {
            Self::parse(text)
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("goal: {}\n", self.goal);
        for (h, eq) in &self.hypotheses {
            out.push_str(&format!("hyp {h}: {eq}\n"));
        }
        for (i, s) in self.steps.iter().enumerate() {
            out.push_str(&format!(
                "{}. {} BY {}\n",
                i + 1,
                s.equation,
                s.justification
            ));
        }
        out
    }
}

/// Why a step was rejected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Error)]
#[serde(tag = "kind", content = "detail", rename_all = "snake_case")]
pub enum RejectReason {
    #[error("unknown axiom `{0}`")]
    UnknownAxiom(String),
    #[error("malformed substitution: {0}")]
    MalformedSubstitution(String),
    #[error("equation does not match axiom `{axiom}` under the substitution")]
    SchemaMismatch { axiom: String },
    #[error("`{0}` is an implication; apply it with star-ind-l(i) or star-ind-r(i)")]
    HornAxiomCited(String),
    #[error("step {0} does not refer to an earlier step")]
    DanglingIndex(usize),
    #[error("sides differ, so reflexivity does not apply")]
    NotReflexive,
    #[error("equation is not the mirror image of the cited step")]
    SymmetryMismatch,
    #[error("cited steps do not chain into this equation")]
    TransitivityMismatch,
    #[error("path does not address a subterm")]
    InvalidPath,
    #[error("sides are not related by replacing the subterm at the path")]
    CongruenceMismatch,
    #[error("cited step is not of the form required by the induction rule")]
    InductionPremiseShape,
    #[error("equation is not the conclusion of the induction rule for the cited step")]
    InductionConclusionMismatch,
    #[error("induction premise depends on hypotheses {0:?}")]
    TaintedPremise(Vec<String>),
    #[error("unknown hypothesis `{0}`")]
    UnknownHypothesis(String),
    #[error("equation differs from hypothesis `{0}`")]
    HypothesisMismatch(String),
    #[error("last step does not prove the goal")]
    GoalNotReached,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ProofVerdict {
    /// `hypotheses` lists the assumptions the goal depends on.
    Accepted { hypotheses: Vec<String> },
    /// `step` is 1-based; it is one past the last step when the goal
    /// is not reached.
    Rejected { step: usize, reason: RejectReason },
}

impl ProofVerdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, ProofVerdict::Accepted { .. })
    }
}

fn subterm<'a>(t: &'a RegProgram, path: &[usize]) -> Option<&'a RegProgram> {
    let Some((&first, rest)) = path.split_first() else {
        return Some(t);
    };
    let child = match (t, first) {
        (RegProgram::Seq(l, _) | RegProgram::Choice(l, _), 0) => l,
        (RegProgram::Seq(_, r) | RegProgram::Choice(_, r), 1) => r,
        (RegProgram::Star(p), 0) => p,
        _ => return None,
    };
    subterm(child, rest)
}

fn replace_at(t: &RegProgram, path: &[usize], with: &RegProgram) -> Option<RegProgram> {
    let Some((&first, rest)) = path.split_first() else {
        return Some(with.clone());
    };
    Some(match (t, first) {
        (RegProgram::Seq(l, r), 0) => RegProgram::seq(replace_at(l, rest, with)?, (**r).clone()),
        (RegProgram::Seq(l, r), 1) => RegProgram::seq((**l).clone(), replace_at(r, rest, with)?),
        (RegProgram::Choice(l, r), 0) => {
            RegProgram::choice(replace_at(l, rest, with)?, (**r).clone())
        }
        (RegProgram::Choice(l, r), 1) => {
            RegProgram::choice((**l).clone(), replace_at(r, rest, with)?)
        }
        (RegProgram::Star(p), 0) => RegProgram::star(replace_at(p, rest, with)?),
        _ => return None,
    })
}

/// Reads `(b + a;x) + x = x` (left) or `(b + x;a) + x = x` (right),
/// returning `(a, b, x)`.
fn induction_premise(eq: &Equation, left: bool) -> Option<(RegProgram, RegProgram, RegProgram)> {
    let RegProgram::Choice(inner, x1) = &eq.lhs else {
        return None;
    };
    let RegProgram::Choice(b, prod) = &**inner else {
        return None;
    };
    let RegProgram::Seq(p, q) = &**prod else {
        return None;
    };
    let (a, x0) = if left { (p, q) } else { (q, p) };
    (**x0 == **x1 && **x1 == eq.rhs).then(|| ((**a).clone(), (**b).clone(), eq.rhs.clone()))
}

/// Checks each step in order and reports the first failure.
pub fn check_proof(script: &ProofScript) -> ProofVerdict {
    let mut taint: Vec<BTreeSet<String>> = Vec::new();
    for (k, step) in script.steps.iter().enumerate() {
        let here = k + 1;
        let reject = |reason| ProofVerdict::Rejected { step: here, reason };
        match check_step(script, &taint, k, step) {
            Ok(deps) => taint.push(deps),
            Err(reason) => return reject(reason),
        }
    }
    match script.steps.last() {
        Some(last) if last.equation == script.goal => ProofVerdict::Accepted {
            hypotheses: taint
                .last()
                .cloned()
                .unwrap_or_default()
                .into_iter()
                .collect(),
        },
        _ => ProofVerdict::Rejected {
            step: script.steps.len() + 1,
            reason: RejectReason::GoalNotReached,
        },
    }
}

fn check_step(
    script: &ProofScript,
    taint: &[BTreeSet<String>],
    k: usize,
    step: &ProofStep,
) -> Result<BTreeSet<String>, RejectReason> {
    let eq = &step.equation;
    let earlier = |i: usize| -> Result<&Equation, RejectReason> {
        if i >= 1 && i <= k {
            Ok(&script.steps[i - 1].equation)
        } else {
            Err(RejectReason::DanglingIndex(i))
        }
    };
    let deps = |ix: &[usize]| -> BTreeSet<String> {
        ix.iter()
            .flat_map(|&i| taint[i - 1].iter().cloned())
            .collect()
    };
    match &step.justification {
        Justification::Axiom { name, substitution } => {
            let ax = axiom(name).ok_or_else(|| RejectReason::UnknownAxiom(name.clone()))?;
            if ax.is_horn() {
                return Err(RejectReason::HornAxiomCited(name.clone()));
            }
            let vars = ax.variables();
            let mut map = BTreeMap::new();
            for (v, t) in substitution {
                if !vars.contains(v) {
                    return Err(RejectReason::MalformedSubstitution(format!(
                        "`{v}` is not a variable of `{name}`"
                    )));
                }
                if map.insert(v.clone(), t.clone()).is_some() {
                    return Err(RejectReason::MalformedSubstitution(format!(
                        "`{v}` assigned twice"
                    )));
                }
            }
            if let Some(missing) = vars.iter().find(|v| !map.contains_key(*v)) {
                return Err(RejectReason::MalformedSubstitution(format!(
                    "`{missing}` is not assigned"
                )));
            }
            match ax.instantiate(&map) {
                AxiomInstance::Equations(eqs) if eqs.contains(eq) => Ok(BTreeSet::new()),
                _ => Err(RejectReason::SchemaMismatch {
                    axiom: name.clone(),
                }),
            }
        }
        Justification::Reflexivity => {
            if eq.lhs == eq.rhs {
                Ok(BTreeSet::new())
            } else {
                Err(RejectReason::NotReflexive)
            }
        }
        Justification::Symmetry(i) => {
            if earlier(*i)?.flipped() == *eq {
                Ok(deps(&[*i]))
            } else {
                Err(RejectReason::SymmetryMismatch)
            }
        }
        Justification::Transitivity(ix) => {
            let chain: Vec<&Equation> = ix.iter().map(|&i| earlier(i)).collect::<Result<_, _>>()?;
            let links = chain.windows(2).all(|w| w[0].rhs == w[1].lhs);
            if links && chain[0].lhs == eq.lhs && chain[chain.len() - 1].rhs == eq.rhs {
                Ok(deps(ix))
            } else {
                Err(RejectReason::TransitivityMismatch)
            }
        }
        Justification::Congruence { step: i, path } => {
            let inner = earlier(*i)?;
            let at = subterm(&eq.lhs, path).ok_or(RejectReason::InvalidPath)?;
            if *at != inner.lhs {
                return Err(RejectReason::CongruenceMismatch);
            }
            match replace_at(&eq.lhs, path, &inner.rhs) {
                Some(t) if t == eq.rhs => Ok(deps(&[*i])),
                _ => Err(RejectReason::CongruenceMismatch),
            }
        }
        Justification::StarInductionLeft(i) | Justification::StarInductionRight(i) => {
            let left = matches!(step.justification, Justification::StarInductionLeft(_));
            let premise = earlier(*i)?;
            let (a, b, x) =
                induction_premise(premise, left).ok_or(RejectReason::InductionPremiseShape)?;
            if !taint[i - 1].is_empty() {
                return Err(RejectReason::TaintedPremise(
                    taint[i - 1].iter().cloned().collect(),
                ));
            }
            let product = if left {
                RegProgram::seq(RegProgram::star(a), b)
            } else {
                RegProgram::seq(b, RegProgram::star(a))
            };
            if *eq == Equation::le(product, x) {
                Ok(BTreeSet::new())
            } else {
                Err(RejectReason::InductionConclusionMismatch)
            }
        }
        Justification::Hypothesis(h) => {
            let stated = script
                .hypotheses
                .get(h)
                .ok_or_else(|| RejectReason::UnknownHypothesis(h.clone()))?;
            if stated == eq {
                Ok(BTreeSet::from([h.clone()]))
            } else {
                Err(RejectReason::HypothesisMismatch(h.clone()))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LanguageCheck {
    Consistent,
    /// A word in exactly one side's language.
    Refuted(Vec<String>),
}

/// Compares the languages of both sides on all words up to `max_word_length`.
pub fn check_soundness_against_language(eq: &Equation, max_word_length: usize) -> LanguageCheck {
    let left = compile(&eq.lhs).expect("equations are test-free");
    let right = compile(&eq.rhs).expect("equations are test-free");
    let mut alphabet = eq.lhs.primitives();
    alphabet.extend(eq.rhs.primitives());
    for w in words_up_to(&alphabet, max_word_length) {
        if left.accepts(&w) != right.accepts(&w) {
            return LanguageCheck::Refuted(w);
        }
    }
    LanguageCheck::Consistent
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eq(s: &str) -> Equation {
        parse_equation(s).unwrap()
    }

    fn run(text: &str) -> ProofVerdict {
        check_proof(&ProofScript::parse(text).unwrap())
    }

    #[test]
    fn axiom_table_order_and_variables() {
        let names: Vec<&str> = AXIOMS.iter().map(|a| a.name).collect();
        assert_eq!(names.len(), 13);
        assert_eq!(names[0], "plus-assoc");
        assert_eq!(names[12], "star-ind-r");
        assert_eq!(
            axiom("star-ind-l").unwrap().variables(),
            ["a", "b", "x"].iter().map(|s| s.to_string()).collect()
        );
    }

    #[test]
    fn le_expands() {
        assert_eq!(eq("a <= b"), eq("a + b = b"));
    }

    #[test]
    fn one_step_plus_zero() {
        let v = run("goal: a + 0 = a\n1. a + 0 = a BY axiom(plus-zero, x:=a)\n");
        assert_eq!(v, ProofVerdict::Accepted { hypotheses: vec![] });
    }

    #[test]
    fn commutation_of_sequence_is_rejected() {
        let v = run("goal: a;b = b;a\n1. a;b = b;a BY axiom(seq-assoc, x:=a, y:=b, z:=a)\n");
        assert_eq!(
            v,
            ProofVerdict::Rejected {
                step: 1,
                reason: RejectReason::SchemaMismatch {
                    axiom: "seq-assoc".into()
                }
            }
        );
    }

    #[test]
    fn chain_axioms_accept_any_ordered_pair() {
        for e in ["1;a = a;1", "1;a = a", "a;1 = a"] {
            let text = format!("goal: {e}\n{e} BY axiom(seq-one, x:=a)\n");
            assert!(run(&text).is_accepted(), "{e}");
        }
        assert!(!run("goal: a = 1;a\na = 1;a BY axiom(seq-one, x:=a)\n").is_accepted());
    }

    #[test]
    fn distinct_reasons() {
        let reason = |text: &str| match run(text) {
            ProofVerdict::Rejected { reason, .. } => reason,
            v => panic!("accepted: {v:?}"),
        };
        assert!(matches!(
            reason("goal: a = a\na = a BY axiom(plus-zero)\n"),
            RejectReason::MalformedSubstitution(_)
        ));
        assert!(matches!(
            reason("goal: a = a\na = a BY axiom(plus-zero, x:=a, y:=b)\n"),
            RejectReason::MalformedSubstitution(_)
        ));
        assert!(matches!(
            reason("goal: a = a\na = a BY sym(1)\n"),
            RejectReason::DanglingIndex(1)
        ));
        assert!(matches!(
            reason("goal: a = a\na = a BY axiom(nope, x:=a)\n"),
            RejectReason::UnknownAxiom(_)
        ));
        assert!(matches!(
            reason("goal: a = a\na = a BY axiom(star-ind-l, a:=a, b:=a, x:=a)\n"),
            RejectReason::HornAxiomCited(_)
        ));
        assert!(matches!(
            reason("goal: a = b\na = b BY refl\n"),
            RejectReason::NotReflexive
        ));
        assert!(matches!(
            reason("goal: a = b\n"),
            RejectReason::GoalNotReached
        ));
    }

    #[test]
    fn hypotheses_taint_induction_premises() {
        let text = "goal: a*;b <= b\nhyp h: b + a;b <= b\n1. b + a;b <= b BY hyp(h)\n2. a*;b <= b BY star-ind-l(1)\n";
        assert_eq!(
            run(text),
            ProofVerdict::Rejected {
                step: 2,
                reason: RejectReason::TaintedPremise(vec!["h".into()])
            }
        );
        let text = "goal: b + a;b <= b\nhyp h: b + a;b <= b\n1. b + a;b <= b BY hyp(h)\n";
        assert_eq!(
            run(text),
            ProofVerdict::Accepted {
                hypotheses: vec!["h".into()]
            }
        );
    }

    #[test]
    fn congruence_paths() {
        let text = "goal: c + a;0 = c + 0\n1. a;0 = 0 BY axiom(seq-zero, x:=a)\n2. c + a;0 = c + 0 BY cong(1, [1])\n";
        assert!(run(text).is_accepted());
        let text = "goal: c + a;0 = c + 0\n1. a;0 = 0 BY axiom(seq-zero, x:=a)\n2. c + a;0 = c + 0 BY cong(1, [0])\n";
        assert!(matches!(
            run(text),
            ProofVerdict::Rejected {
                step: 2,
                reason: RejectReason::CongruenceMismatch
            }
        ));
        let text =
            "goal: c = c\n1. a;0 = 0 BY axiom(seq-zero, x:=a)\n2. c = c BY cong(1, [1, 1])\n";
        assert!(matches!(
            run(text),
            ProofVerdict::Rejected {
                step: 2,
                reason: RejectReason::InvalidPath
            }
        ));
    }

    #[test]
    fn text_and_json_round_trip() {
        let text = "goal: a + a = a\n1. a + a = a BY axiom(plus-idem, x:=a)\n2. a = a + a BY sym(1)\n3. a + a = a BY sym(2)\n";
        let script = ProofScript::parse(text).unwrap();
        assert_eq!(ProofScript::parse(&script.to_text()).unwrap(), script);
        let json = serde_json::to_string(&script).unwrap();
        assert_eq!(ProofScript::parse_any(&json).unwrap(), script);
        assert!(check_proof(&script).is_accepted());
    }

    #[test]
    fn script_syntax_errors_carry_lines() {
        assert_eq!(
            ProofScript::parse("goal: a = a\n\n1. a = a\n"),
            Err(ScriptError::Line {
                line: 3,
                message: "expected `<equation> BY <justification>`".into()
            })
        );
        assert!(matches!(
            ProofScript::parse("goal: a = a\n2. a = a BY refl\n"),
            Err(ScriptError::Line { line: 2, .. })
        ));
        assert_eq!(
            ProofScript::parse("1. a = a BY refl"),
            Err(ScriptError::MissingGoal)
        );
    }

    #[test]
    fn language_check_examples() {
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
}
