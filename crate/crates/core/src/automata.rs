//! From regular programs to automata: the inductive ε-NFA construction,
//! ε-collapse, language equivalence and the Kripke view of an automaton.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ccs::dot_quote;
use crate::pdl::KripkeStructure;
use crate::regprog::{Interpretation, RegProgram, Relation};

pub const DEFAULT_SUBSET_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Eps,
    Sym(String),
}

impl Label {
    pub fn sym(s: impl Into<String>) -> Self {
        Label::Sym(s.into())
    }

    pub fn symbol(&self) -> Option<&str> {
        match self {
            Label::Eps => None,
            Label::Sym(s) => Some(s),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Eps => f.write_str("eps"),
            Label::Sym(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomataError {
    #[error("test `{0}` has no automaton; only test-free programs can be compiled")]
    TestInProgram(String),
    #[error("subset construction exceeded the budget of {budget} state pairs")]
    StateBlowup { budget: usize },
}

/// JSON form shared by both automaton kinds; `null` labels are ε-moves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomatonJson {
    pub states: Vec<usize>,
    pub initial: usize,
    pub finals: Vec<usize>,
    pub transitions: Vec<(usize, Option<String>, usize)>,
}

/// States are `0..states`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpsNfa {
    pub states: usize,
    pub initial: usize,
    pub finals: BTreeSet<usize>,
    pub transitions: BTreeSet<(usize, Label, usize)>,
}

impl EpsNfa {
    fn shifted(
        &self,
        by: usize,
    ) -> (
        usize,
        BTreeSet<usize>,
        impl Iterator<Item = (usize, Label, usize)> + '_,
    ) {
        (
            self.initial + by,
            self.finals.iter().map(|q| q + by).collect(),
            self.transitions
                .iter()
                .map(move |(p, l, q)| (p + by, l.clone(), q + by)),
        )
    }

    pub fn epsilon_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.transitions
            .iter()
            .filter(|(_, l, _)| *l == Label::Eps)
            .map(|&(p, _, q)| (p, q))
    }

    pub fn labelled_edge_count(&self) -> usize {
        self.transitions
            .iter()
            .filter(|(_, l, _)| *l != Label::Eps)
            .count()
    }

    pub fn alphabet(&self) -> BTreeSet<String> {
        self.transitions
            .iter()
            .filter_map(|(_, l, _)| l.symbol().map(str::to_string))
            .collect()
    }

    /// States reachable from `from` by ε-moves, `from` included.
    pub fn epsilon_closure(&self, from: &BTreeSet<usize>) -> BTreeSet<usize> {
        let mut out = from.clone();
        let mut stack: Vec<usize> = from.iter().copied().collect();
        while let Some(p) = stack.pop() {
            for (_, _, q) in self
                .transitions
                .range((p, Label::Eps, 0)..=(p, Label::Eps, usize::MAX))
            {
                if out.insert(*q) {
                    stack.push(*q);
                }
            }
        }
        out
    }

    /// Direct simulation with ε-closure after every step.
    pub fn accepts(&self, word: &[impl AsRef<str>]) -> bool {
        let mut current = self.epsilon_closure(&BTreeSet::from([self.initial]));
        for a in word {
            let a = a.as_ref();
            let next: BTreeSet<usize> = self
                .transitions
                .iter()
                .filter(|(p, l, _)| current.contains(p) && l.symbol() == Some(a))
                .map(|&(_, _, q)| q)
                .collect();
            current = self.epsilon_closure(&next);
        }
        current.iter().any(|q| self.finals.contains(q))
    }

    pub fn to_json(&self) -> AutomatonJson {
        AutomatonJson {
            states: (0..self.states).collect(),
            initial: self.initial,
            finals: self.finals.iter().copied().collect(),
            transitions: self
                .transitions
                .iter()
                .map(|(p, l, q)| (*p, l.symbol().map(str::to_string), *q))
                .collect(),
        }
    }

    pub fn to_dot(&self) -> String {
        automaton_dot(
            "eps_nfa",
            self.states,
            self.initial,
            &self.finals,
            self.transitions
                .iter()
                .map(|(p, l, q)| (*p, l.to_string(), *q)),
            |q| q.to_string(),
        )
    }
}

/// Inductive construction. Fresh start states take the lowest number;
/// the left operand's states follow, then the right operand's.
pub fn build_eps_nfa(alpha: &RegProgram) -> Result<EpsNfa, AutomataError> {
    Ok(match alpha {
        RegProgram::Prim(a) => EpsNfa {
            states: 2,
            initial: 0,
            finals: BTreeSet::from([1]),
            transitions: BTreeSet::from([(0, Label::sym(a.clone()), 1)]),
        },
        RegProgram::Zero => EpsNfa {
            states: 1,
            initial: 0,
            finals: BTreeSet::new(),
            transitions: BTreeSet::new(),
        },
        RegProgram::One => EpsNfa {
            states: 1,
            initial: 0,
            finals: BTreeSet::from([0]),
            transitions: BTreeSet::new(),
        },
        RegProgram::Seq(l, r) => {
            let l = build_eps_nfa(l)?;
            let r = build_eps_nfa(r)?;
            let (i1, f1, t1) = l.shifted(0);
            let (i2, f2, t2) = r.shifted(l.states);
            let mut transitions: BTreeSet<_> = t1.chain(t2).collect();
            for q in &f1 {
                transitions.insert((*q, Label::Eps, i2));
            }
            EpsNfa {
                states: l.states + r.states,
                initial: i1,
                finals: f2,
                transitions,
            }
        }
        RegProgram::Choice(l, r) => {
            let l = build_eps_nfa(l)?;
            let r = build_eps_nfa(r)?;
            let (i1, f1, t1) = l.shifted(1);
            let (i2, f2, t2) = r.shifted(1 + l.states);
            let mut transitions: BTreeSet<_> = t1.chain(t2).collect();
            transitions.insert((0, Label::Eps, i1));
            transitions.insert((0, Label::Eps, i2));
            EpsNfa {
                states: 1 + l.states + r.states,
                initial: 0,
                finals: f1.union(&f2).copied().collect(),
                transitions,
            }
        }
        RegProgram::Star(p) => {
            let inner = build_eps_nfa(p)?;
            let (i1, f1, t1) = inner.shifted(1);
            let mut transitions: BTreeSet<_> = t1.collect();
            for q in &f1 {
                transitions.insert((*q, Label::Eps, 0));
            }
            // the fresh start must be able to enter the body
            transitions.insert((0, Label::Eps, i1));
            let mut finals = f1;
            finals.insert(0);
            EpsNfa {
                states: 1 + inner.states,
                initial: 0,
                finals,
                transitions,
            }
        }
        RegProgram::Test(phi) => return Err(AutomataError::TestInProgram(format!("{phi}?"))),
    })
}

/// An ε-free automaton whose states are classes of ε-NFA states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nfa {
    /// Members of each class, sorted; classes ordered by least member.
    pub classes: Vec<Vec<usize>>,
    pub initial: usize,
    pub finals: BTreeSet<usize>,
    pub transitions: BTreeSet<(usize, String, usize)>,
}

impl Nfa {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn alphabet(&self) -> BTreeSet<String> {
        self.transitions.iter().map(|(_, a, _)| a.clone()).collect()
    }

    pub fn step(&self, from: &BTreeSet<usize>, a: &str) -> BTreeSet<usize> {
        self.transitions
            .iter()
            .filter(|(p, b, _)| b == a && from.contains(p))
            .map(|&(_, _, q)| q)
            .collect()
    }

    /// Subset simulation.
    pub fn accepts(&self, word: &[impl AsRef<str>]) -> bool {
        let mut current = BTreeSet::from([self.initial]);
        for a in word {
            current = self.step(&current, a.as_ref());
            if current.is_empty() {
                return false;
            }
        }
        current.iter().any(|q| self.finals.contains(q))
    }

    fn class_name(&self, c: usize) -> String {
        let members: Vec<String> = self.classes[c].iter().map(usize::to_string).collect();
        format!("{{{}}}", members.join(","))
    }

    pub fn to_json(&self) -> AutomatonJson {
        AutomatonJson {
            states: (0..self.len()).collect(),
            initial: self.initial,
            finals: self.finals.iter().copied().collect(),
            transitions: self
                .transitions
                .iter()
                .map(|(p, a, q)| (*p, Some(a.clone()), *q))
                .collect(),
        }
    }

    pub fn to_dot(&self) -> String {
        automaton_dot(
            "nfa",
            self.len(),
            self.initial,
            &self.finals,
            self.transitions.iter().map(|(p, a, q)| (*p, a.clone(), *q)),
            |c| self.class_name(c),
        )
    }

    /// Kripke structure with propositions `init` and `final` and one
    /// relation per symbol.
    pub fn to_kripke(&self) -> KripkeStructure {
        to_kripke(self)
    }
}

fn automaton_dot(
    name: &str,
    states: usize,
    initial: usize,
    finals: &BTreeSet<usize>,
    edges: impl Iterator<Item = (usize, String, usize)>,
    label: impl Fn(usize) -> String,
) -> String {
    let mut out = format!("digraph {name} {{\n  rankdir=LR;\n  __start [shape=point];\n");
    for q in 0..states {
        let shape = if finals.contains(&q) {
            "doublecircle"
        } else {
            "circle"
        };
        out.push_str(&format!(
            "  q{q} [shape={shape}, label={}];\n",
            dot_quote(&label(q))
        ));
    }
    out.push_str(&format!("  __start -> q{initial};\n"));
    let mut edges: Vec<_> = edges.collect();
    edges.sort();
    for (p, l, q) in edges {
        out.push_str(&format!("  q{p} -> q{q} [label={}];\n", dot_quote(&l)));
    }
    out.push_str("}\n");
    out
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.0[root] != root {
            root = self.0[root];
        }
        let mut y = x;
        while self.0[y] != root {
            let next = self.0[y];
            self.0[y] = root;
            y = next;
        }
        root
    }

    /// Makes `keep`'s root the representative of both.
    fn absorb(&mut self, keep: usize, gone: usize) {
        let (k, g) = (self.find(keep), self.find(gone));
        if k != g {
            self.0[g] = k;
        }
    }
}

fn quotient(
    uf: &mut UnionFind,
    transitions: &BTreeSet<(usize, Label, usize)>,
) -> BTreeSet<(usize, Label, usize)> {
    transitions
        .iter()
        .map(|(p, l, q)| (uf.find(*p), l.clone(), uf.find(*q)))
        .filter(|(p, l, q)| !(p == q && *l == Label::Eps))
        .collect()
}

fn number_classes(uf: &mut UnionFind, n: usize) -> (Vec<Vec<usize>>, Vec<usize>) {
    let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for q in 0..n {
        by_root.entry(uf.find(q)).or_default().push(q);
    }
    let mut classes: Vec<Vec<usize>> = by_root.into_values().collect();
    classes.sort();
    let mut class_of = vec![0; n];
    for (c, members) in classes.iter().enumerate() {
        for &q in members {
            class_of[q] = c;
        }
    }
    (classes, class_of)
}

/// Merges states joined by ε-moves where doing so cannot change the
/// language, then removes the remaining ε-moves by ε-closure.
///
/// An ε-edge `c -> d` is contracted when `d` has no other incoming edge
/// and is not initial, or when `c` has no other outgoing edge and is not
/// final unless `d` is.
pub fn collapse(a: &EpsNfa) -> Nfa {
    let mut uf = UnionFind::new(a.states);
    let mut finals: BTreeSet<usize> = a.finals.clone();
    let mut edges = a.transitions.clone();
    loop {
        let mut in_deg: HashMap<usize, usize> = HashMap::new();
        let mut out_deg: HashMap<usize, usize> = HashMap::new();
        for (p, _, q) in &edges {
            *out_deg.entry(*p).or_default() += 1;
            *in_deg.entry(*q).or_default() += 1;
        }
        let initial = uf.find(a.initial);
        let pick = edges.iter().find_map(|(c, l, d)| {
            if *l != Label::Eps {
                return None;
            }
            if in_deg[d] == 1 && *d != initial {
                Some((*c, *d))
            } else if out_deg[c] == 1 && (!finals.contains(c) || finals.contains(d)) {
                Some((*d, *c))
            } else {
                None
            }
        });
        let Some((keep, gone)) = pick else { break };
        if finals.remove(&gone) {
            finals.insert(keep);
        }
        uf.absorb(keep, gone);
        edges = quotient(&mut uf, &edges);
    }
    let (classes, class_of) = number_classes(&mut uf, a.states);
    let rep = |c: usize| classes[c][0];
    let closure = |c: usize| -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([c]);
        let mut stack = vec![c];
        while let Some(x) = stack.pop() {
            for (p, l, q) in &edges {
                if *l == Label::Eps && class_of[*p] == x && seen.insert(class_of[*q]) {
                    stack.push(class_of[*q]);
                }
            }
        }
        seen
    };
    let mut transitions = BTreeSet::new();
    let mut final_classes = BTreeSet::new();
    for c in 0..classes.len() {
        let reach = closure(c);
        if reach.iter().any(|&x| finals.contains(&uf.find(rep(x)))) {
            final_classes.insert(c);
        }
        for (p, l, q) in &edges {
            if let Label::Sym(s) = l {
                if reach.contains(&class_of[*p]) {
                    transitions.insert((c, s.clone(), class_of[*q]));
                }
            }
        }
    }
    Nfa {
        initial: class_of[a.initial],
        classes,
        finals: final_classes,
        transitions,
    }
}

/// Identifies every pair of states connected by ε-moves in either
/// direction, taking the equivalence closure. The result can accept
/// words the ε-NFA rejects: for `a + b*` the start state is merged with
/// the loop of `b*` and with the start of `a`, so `b;a` becomes accepted.
pub fn merge_epsilon_components(a: &EpsNfa) -> Nfa {
    let mut uf = UnionFind::new(a.states);
    for (p, q) in a.epsilon_edges() {
        uf.absorb(p, q);
    }
    let (classes, class_of) = number_classes(&mut uf, a.states);
    Nfa {
        initial: class_of[a.initial],
        finals: a.finals.iter().map(|q| class_of[*q]).collect(),
        transitions: a
            .transitions
            .iter()
            .filter_map(|(p, l, q)| {
                l.symbol()
                    .map(|s| (class_of[*p], s.to_string(), class_of[*q]))
            })
            .collect(),
        classes,
    }
}

/// ε-NFA construction followed by [`collapse`].
pub fn compile(alpha: &RegProgram) -> Result<Nfa, AutomataError> {
    Ok(collapse(&build_eps_nfa(alpha)?))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Equivalence {
    Equal,
    /// Shortest separating word, least in symbol order among the shortest.
    Counterexample(Vec<String>),
}

impl Equivalence {
    pub fn is_equal(&self) -> bool {
        matches!(self, Equivalence::Equal)
    }
}

/// Language equality of two programs.
pub fn equivalent(alpha: &RegProgram, beta: &RegProgram) -> Result<Equivalence, AutomataError> {
    equivalent_with_budget(alpha, beta, DEFAULT_SUBSET_BUDGET)
}

pub fn equivalent_with_budget(
    alpha: &RegProgram,
    beta: &RegProgram,
    budget: usize,
) -> Result<Equivalence, AutomataError> {
    let mut alphabet = alpha.primitives();
    alphabet.extend(beta.primitives());
    nfa_equivalent(&compile(alpha)?, &compile(beta)?, &alphabet, budget)
}

/// Breadth-first search over pairs of subset states.
pub fn nfa_equivalent(
    left: &Nfa,
    right: &Nfa,
    alphabet: &BTreeSet<String>,
    budget: usize,
) -> Result<Equivalence, AutomataError> {
    type Pair = (BTreeSet<usize>, BTreeSet<usize>);
    let accepting = |nfa: &Nfa, set: &BTreeSet<usize>| set.iter().any(|q| nfa.finals.contains(q));
    let start: Pair = (
        BTreeSet::from([left.initial]),
        BTreeSet::from([right.initial]),
    );
    let mut index: HashMap<Pair, usize> = HashMap::new();
    let mut parent: Vec<Option<(usize, String)>> = vec![None];
    let mut pairs: Vec<Pair> = vec![start.clone()];
    index.insert(start, 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let (l, r) = pairs[i].clone();
        if accepting(left, &l) != accepting(right, &r) {
            let mut word = Vec::new();
            let mut at = i;
            while let Some((p, a)) = &parent[at] {
                word.push(a.clone());
                at = *p;
            }
            word.reverse();
            return Ok(Equivalence::Counterexample(word));
        }
        for a in alphabet {
            let next = (left.step(&l, a), right.step(&r, a));
            if !index.contains_key(&next) {
                if pairs.len() >= budget {
                    return Err(AutomataError::StateBlowup { budget });
                }
                index.insert(next.clone(), pairs.len());
                parent.push(Some((i, a.clone())));
                pairs.push(next);
                queue.push_back(pairs.len() - 1);
            }
        }
    }
    Ok(Equivalence::Equal)
}

/// `S` = classes, `init` holds at the initial class only, `final` at the
/// final classes, and each symbol denotes its edge relation.
pub fn to_kripke(a: &Nfa) -> KripkeStructure {
    let n = a.len();
    let mut sigma = Interpretation::new(n);
    let mut by_symbol: BTreeMap<&str, Vec<(usize, usize)>> = BTreeMap::new();
    for (p, s, q) in &a.transitions {
        by_symbol.entry(s).or_default().push((*p, *q));
    }
    for (s, pairs) in by_symbol {
        sigma.set_relation(s, Relation::from_pairs(n, pairs));
    }
    let mut m = KripkeStructure::new(sigma, ["init".to_string(), "final".to_string()]);
    m.set_true(a.initial, "init");
    for q in &a.finals {
        m.set_true(*q, "final");
    }
    m
}

/// All words over `alphabet` of length at most `max_len`, shortest first.
pub fn words_up_to(alphabet: &BTreeSet<String>, max_len: usize) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Vec<String>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * alphabet.len());
        for w in &layer {
            for a in alphabet {
                let mut v = w.clone();
                v.push(a.clone());
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}
