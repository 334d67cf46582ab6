//! CCS process terms, the structural operational semantics, and finite
//! LTS exploration.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{parse_all, ParseError};

/// Default cap on explored states, overridable per call.
pub const DEFAULT_STATE_BUDGET: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Action {
    Tau,
    Receive(String),
    Send(String),
}

impl Action {
    pub fn receive(channel: impl Into<String>) -> Self {
        Action::Receive(channel.into())
    }

    pub fn send(channel: impl Into<String>) -> Self {
        Action::Send(channel.into())
    }

    /// `None` for τ, which has no co-action.
    pub fn complement(&self) -> Option<Action> {
        match self {
            Action::Tau => None,
            Action::Receive(x) => Some(Action::Send(x.clone())),
            Action::Send(x) => Some(Action::Receive(x.clone())),
        }
    }

    pub fn channel(&self) -> Option<&str> {
        match self {
            Action::Tau => None,
            Action::Receive(x) | Action::Send(x) => Some(x),
        }
    }

    pub fn is_tau(&self) -> bool {
        matches!(self, Action::Tau)
    }

    fn rename(&self, from: &str, to: &str) -> Action {
        match self {
            Action::Receive(x) if x == from => Action::Receive(to.to_string()),
            Action::Send(x) if x == from => Action::Send(to.to_string()),
            other => other.clone(),
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Tau => f.write_str("tau"),
            Action::Receive(x) => write!(f, "{x}?"),
            Action::Send(x) => write!(f, "{x}!"),
        }
    }
}

pub fn parse_action(text: &str) -> Result<Action, ParseError> {
    parse_all(text, |p| p.action())
}

/// A CCS term. Sums are lists of prefixed continuations; the empty sum is `0`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Process {
    Sum(Vec<(Action, Process)>),
    Par(Box<Process>, Box<Process>),
    Restrict(String, Box<Process>),
}

impl Process {
    pub fn nil() -> Self {
        Process::Sum(Vec::new())
    }

    pub fn prefix(action: Action, continuation: Process) -> Self {
        Process::Sum(vec![(action, continuation)])
    }

    pub fn sum(summands: Vec<(Action, Process)>) -> Self {
        Process::Sum(summands)
    }

    pub fn par(left: Process, right: Process) -> Self {
        Process::Par(Box::new(left), Box::new(right))
    }

    pub fn restrict(channel: impl Into<String>, body: Process) -> Self {
        Process::Restrict(channel.into(), Box::new(body))
    }

    pub fn is_nil(&self) -> bool {
        matches!(self, Process::Sum(s) if s.is_empty())
    }

    pub fn prefix_count(&self) -> usize {
        match self {
            Process::Sum(s) => s.iter().map(|(_, p)| 1 + p.prefix_count()).sum(),
            Process::Par(l, r) => l.prefix_count() + r.prefix_count(),
            Process::Restrict(_, p) => p.prefix_count(),
        }
    }

    /// Channel names occurring free in the term.
    pub fn free_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Process::Sum(s) => {
                for (a, p) in s {
                    if let Some(x) = a.channel() {
                        if !bound.iter().any(|b| b == x) {
                            out.insert(x.to_string());
                        }
                    }
                    p.collect_free(bound, out);
                }
            }
            Process::Par(l, r) => {
                l.collect_free(bound, out);
                r.collect_free(bound, out);
            }
            Process::Restrict(x, p) => {
                bound.push(x.clone());
                p.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    fn collect_all_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Process::Sum(s) => {
                for (a, p) in s {
                    if let Some(x) = a.channel() {
                        out.insert(x.to_string());
                    }
                    p.collect_all_names(out);
                }
            }
            Process::Par(l, r) => {
                l.collect_all_names(out);
                r.collect_all_names(out);
            }
            Process::Restrict(x, p) => {
                out.insert(x.clone());
                p.collect_all_names(out);
            }
        }
    }

    /// Replaces free occurrences of `from` by `to`.
    fn rename_free(&self, from: &str, to: &str) -> Process {
        match self {
            Process::Sum(s) => Process::Sum(
                s.iter()
                    .map(|(a, p)| (a.rename(from, to), p.rename_free(from, to)))
                    .collect(),
            ),
            Process::Par(l, r) => Process::par(l.rename_free(from, to), r.rename_free(from, to)),
            Process::Restrict(x, p) if x == from => self.clone(),
            Process::Restrict(x, p) => Process::restrict(x.clone(), p.rename_free(from, to)),
        }
    }

    /// α-renames restricted channels so that every binder is distinct from
    /// every other binder and from every free name. Binders that are
    /// already unique keep their name, so the result is a fixed point.
    pub fn with_unique_binders(&self) -> Process {
        let mut taken = BTreeSet::new();
        self.collect_all_names(&mut taken);
        let mut claimed = self.free_names();
        self.freshen(&mut claimed, &mut taken)
    }

    fn freshen(&self, claimed: &mut BTreeSet<String>, taken: &mut BTreeSet<String>) -> Process {
        match self {
            Process::Sum(s) => Process::Sum(
                s.iter()
                    .map(|(a, p)| (a.clone(), p.freshen(claimed, taken)))
                    .collect(),
            ),
            Process::Par(l, r) => {
                let l = l.freshen(claimed, taken);
                Process::par(l, r.freshen(claimed, taken))
            }
            Process::Restrict(x, body) => {
                let (name, body) = if claimed.contains(x) {
                    let fresh = (1..)
                        .map(|k| format!("{x}'{k}"))
                        .find(|n| !taken.contains(n) && !claimed.contains(n))
                        .expect("unbounded supply of names");
                    taken.insert(fresh.clone());
                    let renamed = body.rename_free(x, &fresh);
                    (fresh, renamed)
                } else {
                    (x.clone(), (**body).clone())
                };
                claimed.insert(name.clone());
                Process::restrict(name, body.freshen(claimed, taken))
            }
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, ctx: Ctx) -> fmt::Result {
        match self {
            Process::Sum(s) if s.is_empty() => f.write_str("0"),
            Process::Sum(s) if s.len() == 1 => {
                let (a, p) = &s[0];
                write!(f, "{a}.")?;
                p.fmt_prec(f, Ctx::Continuation)
            }
            Process::Sum(s) => {
                let parens = ctx != Ctx::Top;
                if parens {
                    f.write_str("(")?;
                }
                for (i, (a, p)) in s.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" + ")?;
                    }
                    write!(f, "{a}.")?;
                    p.fmt_prec(f, Ctx::Continuation)?;
                }
                if parens {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Process::Par(l, r) => {
                let parens = matches!(ctx, Ctx::Continuation | Ctx::ParRight);
                if parens {
                    f.write_str("(")?;
                }
                l.fmt_prec(f, Ctx::ParLeft)?;
                f.write_str(" | ")?;
                r.fmt_prec(f, Ctx::ParRight)?;
                if parens {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Process::Restrict(x, p) => {
                let parens = ctx != Ctx::Top;
                if parens {
                    f.write_str("(")?;
                }
                write!(f, "nu {x}. ")?;
                p.fmt_prec(f, Ctx::Top)?;
                if parens {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Ctx {
    Top,
    ParLeft,
    ParRight,
    Continuation,
}

/// Canonical text: summand order as written. Sums under `|` are
/// parenthesised for readability; otherwise only needed parentheses appear.
impl fmt::Display for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, Ctx::Top)
    }
}

/// Parses the concrete syntax: `x?` receive, `x!` send, `tau`, `.` prefix,
/// `+`, `|`, `nu x. P`, parentheses. Restricted channels are renamed apart.
pub fn parse_process(text: &str) -> Result<Process, ParseError> {
    parse_all(text, |p| p.process()).map(|p| p.with_unique_binders())
}

impl std::str::FromStr for Process {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_process(s)
    }
}

/// Every pair derivable by the five SOS rules.
pub fn transitions(p: &Process) -> BTreeSet<(Action, Process)> {
    let mut out = BTreeSet::new();
    match p {
        Process::Sum(s) => {
            for (a, q) in s {
                out.insert((a.clone(), q.clone()));
            }
        }
        Process::Restrict(x, body) => {
            for (a, q) in transitions(body) {
                if a.channel() != Some(x.as_str()) {
                    out.insert((a, Process::restrict(x.clone(), q)));
                }
            }
        }
        Process::Par(l, r) => {
            let left = transitions(l);
            let right = transitions(r);
            for (a, l2) in &left {
                out.insert((a.clone(), Process::par(l2.clone(), (**r).clone())));
            }
            for (a, r2) in &right {
                out.insert((a.clone(), Process::par((**l).clone(), r2.clone())));
            }
            for (a, l2) in &left {
                let Some(co) = a.complement() else { continue };
                for (b, r2) in &right {
                    if *b == co {
                        out.insert((Action::Tau, Process::par(l2.clone(), r2.clone())));
                    }
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LtsError {
    #[error("state budget of {budget} exceeded")]
    BudgetExceeded { budget: usize },
}

/// The finite LTS reachable from a root term. State 0 is the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lts {
    states: Vec<Process>,
    successors: Vec<Vec<(Action, usize)>>,
}

pub fn build_lts(p: &Process, state_budget: usize) -> Result<Lts, LtsError> {
    let budget = state_budget.max(1);
    let mut index: HashMap<Process, usize> = HashMap::new();
    let mut states = vec![p.clone()];
    let mut successors = vec![Vec::new()];
    index.insert(p.clone(), 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(s) = queue.pop_front() {
        let mut out = Vec::new();
        for (a, q) in transitions(&states[s]) {
            let t = match index.get(&q) {
                Some(&t) => t,
                None => {
                    if states.len() >= budget {
                        return Err(LtsError::BudgetExceeded { budget });
                    }
                    let t = states.len();
                    index.insert(q.clone(), t);
                    states.push(q);
                    successors.push(Vec::new());
                    queue.push_back(t);
                    t
                }
            };
            out.push((a, t));
        }
        successors[s] = out;
    }
    Ok(Lts { states, successors })
}

impl Lts {
    pub fn root(&self) -> usize {
        0
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, s: usize) -> &Process {
        &self.states[s]
    }

    pub fn states(&self) -> &[Process] {
        &self.states
    }

    pub fn successors(&self, s: usize) -> &[(Action, usize)] {
        &self.successors[s]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, &Action, usize)> + '_ {
        self.successors
            .iter()
            .enumerate()
            .flat_map(|(s, out)| out.iter().map(move |(a, t)| (s, a, *t)))
    }

    pub fn edge_count(&self) -> usize {
        self.successors.iter().map(Vec::len).sum()
    }

    pub fn actions(&self) -> BTreeSet<Action> {
        self.edges().map(|(_, a, _)| a.clone()).collect()
    }

    pub fn is_deadlocked(&self, s: usize) -> bool {
        self.successors[s].is_empty()
    }

    /// Every path from the root that ends in a deadlocked state, up to
    /// `limit` paths, in depth-first order over sorted transitions.
    pub fn maximal_runs(&self, limit: usize) -> Vec<Run> {
        let mut out = Vec::new();
        let mut steps = Vec::new();
        self.runs_from(self.root(), None, &mut steps, &mut out, limit);
        out
    }

    /// Every path from the root whose labels are exactly `labels`.
    pub fn runs_labelled(&self, labels: &[Action], limit: usize) -> Vec<Run> {
        let mut out = Vec::new();
        let mut steps = Vec::new();
        self.runs_from(self.root(), Some(labels), &mut steps, &mut out, limit);
        out
    }

    fn runs_from(
        &self,
        s: usize,
        labels: Option<&[Action]>,
        steps: &mut Vec<(Action, usize)>,
        out: &mut Vec<Run>,
        limit: usize,
    ) {
        if out.len() >= limit {
            return;
        }
        let done = match labels {
            Some(l) => l.is_empty(),
            None => self.is_deadlocked(s),
        };
        if done {
            out.push(Run {
                start: self.states[self.root()].clone(),
                steps: steps
                    .iter()
                    .map(|(a, t)| (a.clone(), self.states[*t].clone()))
                    .collect(),
            });
            return;
        }
        for (a, t) in &self.successors[s] {
            let rest = match labels {
                Some(l) if l[0] != *a => continue,
                Some(l) => Some(&l[1..]),
                None => None,
            };
            steps.push((a.clone(), *t));
            self.runs_from(*t, rest, steps, out, limit);
            steps.pop();
        }
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph lts {\n  rankdir=LR;\n");
        out.push_str("  __start [shape=point];\n  __start -> s0;\n");
        for (i, p) in self.states.iter().enumerate() {
            out.push_str(&format!("  s{i} [label={}];\n", dot_quote(&p.to_string())));
        }
        let mut edges: Vec<(usize, String, usize)> = self
            .edges()
            .map(|(s, a, t)| (s, a.to_string(), t))
            .collect();
        edges.sort();
        for (s, a, t) in edges {
            out.push_str(&format!("  s{s} -> s{t} [label={}];\n", dot_quote(&a)));
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> LtsJson {
        LtsJson {
            states: self.states.iter().map(ToString::to_string).collect(),
            root: self.states[0].to_string(),
            edges: self
                .edges()
                .map(|(s, a, t)| {
                    [
                        self.states[s].to_string(),
                        a.to_string(),
                        self.states[t].to_string(),
                    ]
                })
                .collect(),
        }
    }
}

/// Serialized LTS: `{states, root, edges: [[src, action, dst]]}` keyed by
/// canonical term text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LtsJson {
    pub states: Vec<String>,
    pub root: String,
    pub edges: Vec<[String; 3]>,
}

/// A finite execution from a start term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Run {
    pub start: Process,
    pub steps: Vec<(Action, Process)>,
}

impl Run {
    pub fn labels(&self) -> Vec<Action> {
        self.steps.iter().map(|(a, _)| a.clone()).collect()
    }

    pub fn last(&self) -> &Process {
        self.steps.last().map_or(&self.start, |(_, p)| p)
    }
}

impl fmt::Display for Run {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.start)?;
        for (a, p) in &self.steps {
            write!(f, " --{a}--> {p}")?;
        }
        Ok(())
    }
}

pub(crate) fn dot_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Process {
        parse_process(s).unwrap()
    }

    const PAPER: &str = "(x?.y?.0 + x!.z?.0) | x!.0 | y!.0";

    #[test]
    fn nil_is_the_empty_sum() {
        assert_eq!(p("0"), Process::Sum(vec![]));
        assert!(transitions(&p("0")).is_empty());
    }

    #[test]
    fn parses_the_three_component_example() {
        let left = Process::sum(vec![
            (
                Action::receive("x"),
                Process::prefix(Action::receive("y"), Process::nil()),
            ),
            (
                Action::send("x"),
                Process::prefix(Action::receive("z"), Process::nil()),
            ),
        ]);
        let expected = Process::par(
            Process::par(left, Process::prefix(Action::send("x"), Process::nil())),
            Process::prefix(Action::send("y"), Process::nil()),
        );
        assert_eq!(p(PAPER), expected);
        assert_eq!(p(PAPER).to_string(), PAPER);
    }

    #[test]
    fn unprefixed_summand_is_a_grammar_error() {
        let err = parse_process("x?.0 + (a!.0 | b!.0)").unwrap_err();
        assert!(matches!(err, ParseError::Grammar { pos: 7, .. }), "{err:?}");
    }

    #[test]
    fn missing_polarity_is_a_syntax_error() {
        assert!(matches!(
            parse_process("x.0"),
            Err(ParseError::Syntax { .. })
        ));
        assert!(parse_process("x?.").is_err());
        assert!(parse_process("(x?.0").is_err());
        assert!(parse_process("nu tau. 0").is_err());
    }

    #[test]
    fn first_step_of_the_worked_derivation() {
        let t = transitions(&p(PAPER));
        assert!(t.contains(&(Action::Tau, p("y?.0 | 0 | y!.0"))));
    }

    #[test]
    fn restriction_blocks_the_bound_channel() {
        let t = transitions(&p("nu x. (x?.0 | a!.0)"));
        let expected: BTreeSet<_> = [(Action::send("a"), p("nu x. (x?.0 | 0)"))]
            .into_iter()
            .collect();
        assert_eq!(t, expected);
        let t = transitions(&p("nu x. (x?.0 | x!.0)"));
        assert_eq!(t, [(Action::Tau, p("nu x. (0 | 0)"))].into_iter().collect());
    }

    #[test]
    fn binders_are_renamed_apart() {
        let q = p("x!.0 | nu x. x?.0");
        assert_eq!(q.to_string(), "x!.0 | (nu x'1. x'1?.0)");
        let q = p("nu x. (x!.0 | nu x. x?.0)");
        assert_eq!(q.to_string(), "nu x. x!.0 | (nu x'1. x'1?.0)");
        // the inner receive is on a different channel, so no sync
        assert!(transitions(&q).is_empty());
        let unique = p("nu x. (x!.0 | nu y. y?.0)");
        assert_eq!(unique, unique.with_unique_binders());
    }

    #[test]
    fn lts_of_nil() {
        let lts = build_lts(&p("0"), 10).unwrap();
        assert_eq!((lts.len(), lts.edge_count()), (1, 0));
    }

    #[test]
    fn interleaving_diamond() {
        let lts = build_lts(&p("a?.0 | b!.0"), 10).unwrap();
        assert_eq!((lts.len(), lts.edge_count()), (4, 4));
    }

    #[test]
    fn budget_is_enforced() {
        let err = build_lts(&p("a?.0 | b!.0"), 3).unwrap_err();
        assert_eq!(err, LtsError::BudgetExceeded { budget: 3 });
    }

    #[test]
    fn paper_trace_is_a_tau_tau_run_to_deadlock() {
        let lts = build_lts(&p(PAPER), 1000).unwrap();
        let runs = lts.runs_labelled(&[Action::Tau, Action::Tau], 10);
        assert_eq!(runs.len(), 1);
        let run = &runs[0];
        assert_eq!(run.steps[0].1, p("y?.0 | 0 | y!.0"));
        assert_eq!(run.steps[1].1, p("0 | 0 | 0"));
        assert!(transitions(run.last()).is_empty());
    }

    #[test]
    fn printing_round_trips_nested_shapes() {
        for text in [
            "a!.(b?.0 + c?.0)",
            "a!.(b?.0 | c?.0)",
            "a!.(nu b. b?.0)",
            "a!.0 | (b!.0 | c!.0)",
            "tau.tau.0 + a?.0",
            "nu a. nu b. a!.b?.0",
        ] {
            let q = p(text);
            assert_eq!(q.to_string(), text);
            assert_eq!(p(&q.to_string()), q);
        }
    }

    #[test]
    fn dot_and_json_exports_are_sorted_and_keyed_by_text() {
        let lts = build_lts(&p("a?.0 | b!.0"), 10).unwrap();
        let dot = lts.to_dot();
        assert!(dot.contains("s0 [label=\"a?.0 | b!.0\"]"));
        assert_eq!(dot, lts.to_dot());
        let json = serde_json::to_string(&lts.to_json()).unwrap();
        let back: LtsJson = serde_json::from_str(&json).unwrap();
        assert_eq!(back.root, "a?.0 | b!.0");
        assert_eq!(back.edges.len(), 4);
    }
}
