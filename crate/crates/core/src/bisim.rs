//! Strong bisimilarity, decided two independent ways.
//!
//! [`bisimilar_naive`] computes the greatest fixpoint by pruning the full
//! cross product of the combined state space; [`bisimilar`] runs
//! splitter-based partition refinement. Both explain a negative verdict
//! with an HML formula rebuilt from their own refinement history, and both
//! model-check that formula on the two roots before returning it. The
//! `_lts` variants work on prebuilt transition systems.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::ccs::{build_lts, transitions, Action, Lts, LtsError, Process, DEFAULT_STATE_BUDGET};
use crate::hml::{satisfying_states, HmlFormula};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BisimError {
    #[error(transparent)]
    Lts(#[from] LtsError),
    #[error("internal error: {0}")]
    Internal(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BisimVerdict {
    /// A strong bisimulation containing the root pair.
    Bisimilar { relation: Vec<(Process, Process)> },
    /// Holds of the left process and fails on the right one.
    Distinguished { formula: HmlFormula },
}

impl BisimVerdict {
    pub fn is_bisimilar(&self) -> bool {
        matches!(self, BisimVerdict::Bisimilar { .. })
    }

    pub fn formula(&self) -> Option<&HmlFormula> {
        match self {
            BisimVerdict::Distinguished { formula } => Some(formula),
            BisimVerdict::Bisimilar { .. } => None,
        }
    }
}

/// A verdict plus the size of the search that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BisimRun {
    pub verdict: BisimVerdict,
    pub combined_states: usize,
    /// Pruning rounds (naive) or block splits (refinement).
    pub rounds: usize,
}

/// Disjoint union of two LTSs; right-hand states are offset by `offset`.
pub(crate) struct Combined {
    pub(crate) states: Vec<Process>,
    pub(crate) succ: Vec<Vec<(Action, usize)>>,
    pub(crate) offset: usize,
}

impl Combined {
    pub(crate) fn new(left: &Lts, right: &Lts) -> Self {
        let offset = left.len();
        let mut states: Vec<Process> = left.states().to_vec();
        states.extend(right.states().iter().cloned());
        let mut succ: Vec<Vec<(Action, usize)>> = (0..left.len())
            .map(|s| left.successors(s).to_vec())
            .collect();
        succ.extend((0..right.len()).map(|s| {
            right
                .successors(s)
                .iter()
                .map(|(a, t)| (a.clone(), t + offset))
                .collect()
        }));
        Combined {
            states,
            succ,
            offset,
        }
    }

    fn len(&self) -> usize {
        self.states.len()
    }

    fn actions(&self) -> BTreeSet<Action> {
        self.succ
            .iter()
            .flat_map(|out| out.iter().map(|(a, _)| a.clone()))
            .collect()
    }

    fn successors_by<'a>(&'a self, s: usize, a: &'a Action) -> impl Iterator<Item = usize> + 'a {
        self.succ[s]
            .iter()
            .filter(move |(b, _)| b == a)
            .map(|&(_, t)| t)
    }

    /// Pairs (left state, right state) related by `related`, closed under
    /// matching moves from the root pair.
    fn witness(&self, related: impl Fn(usize, usize) -> bool) -> Vec<(Process, Process)> {
        let root = (0, self.offset);
        let mut seen = BTreeSet::from([root]);
        let mut queue = VecDeque::from([root]);
        while let Some((s, t)) = queue.pop_front() {
            for (a, s2) in &self.succ[s] {
                for t2 in self.successors_by(t, a) {
                    if related(*s2, t2) && seen.insert((*s2, t2)) {
                        queue.push_back((*s2, t2));
                    }
                }
            }
        }
        seen.into_iter()
            .map(|(s, t)| (self.states[s].clone(), self.states[t].clone()))
            .collect()
    }
}

/// Builds a formula true at `s` and false at `t` from a separation order:
/// `separated(s, t)` gives the stage at which the pair was told apart and
/// `apart_before(stage, s', t')` says whether `s'` and `t'` were already
/// apart before that stage.
struct FormulaBuilder<'a, F, G>
where
    F: Fn(usize, usize) -> Option<usize>,
    G: Fn(usize, usize, usize) -> bool,
{
    graph: &'a Combined,
    separated: F,
    apart_before: G,
    memo: HashMap<(usize, usize), HmlFormula>,
}

impl<F, G> FormulaBuilder<'_, F, G>
where
    F: Fn(usize, usize) -> Option<usize>,
    G: Fn(usize, usize, usize) -> bool,
{
    fn distinguish(&mut self, s: usize, t: usize) -> Result<HmlFormula, BisimError> {
        if let Some(f) = self.memo.get(&(s, t)) {
            return Ok(f.clone());
        }
        let stage = (self.separated)(s, t).ok_or_else(|| {
            BisimError::Internal(format!("states {s} and {t} were never separated"))
        })?;
        let formula = match self.unmatched_move(stage, s, t) {
            Some((a, s2)) => {
                let targets: Vec<usize> = self.graph.successors_by(t, &a).collect();
                let mut conjuncts: Vec<HmlFormula> = Vec::new();
                for t2 in targets {
                    let f = self.distinguish(s2, t2)?;
                    if !conjuncts.contains(&f) {
                        conjuncts.push(f);
                    }
                }
                let body = conjuncts
                    .into_iter()
                    .reduce(HmlFormula::and)
                    .unwrap_or(HmlFormula::True);
                HmlFormula::possibly(a, body)
            }
            None => match self.unmatched_move(stage, t, s) {
                Some(_) => HmlFormula::not(self.distinguish(t, s)?),
                None => {
                    return Err(BisimError::Internal(format!(
                        "no unmatched move separates states {s} and {t}"
                    )))
                }
            },
        };
        self.memo.insert((s, t), formula.clone());
        Ok(formula)
    }

    /// A move `s -a-> s2` such that every `t -a-> t2` has `s2`, `t2`
    /// already apart before `stage`.
    fn unmatched_move(&self, stage: usize, s: usize, t: usize) -> Option<(Action, usize)> {
        self.graph.succ[s]
            .iter()
            .find(|(a, s2)| {
                self.graph
                    .successors_by(t, a)
                    .all(|t2| (self.apart_before)(stage, *s2, t2))
            })
            .cloned()
    }
}

fn verified(left: &Lts, right: &Lts, formula: HmlFormula) -> Result<HmlFormula, BisimError> {
    let holds = |lts: &Lts| satisfying_states(lts, &formula)[lts.root()];
    if holds(left) && !holds(right) {
        Ok(formula)
    } else {
        Err(BisimError::Internal(format!(
            "distinguishing formula {formula} failed re-verification"
        )))
    }
}

/// Greatest fixpoint by iterated pruning of the full cross product.
pub fn bisimilar_naive(p: &Process, q: &Process) -> Result<BisimVerdict, BisimError> {
    bisimilar_naive_with_budget(p, q, DEFAULT_STATE_BUDGET).map(|r| r.verdict)
}

pub fn bisimilar_naive_with_budget(
    p: &Process,
    q: &Process,
    budget: usize,
) -> Result<BisimRun, BisimError> {
    bisimilar_naive_lts(&build_lts(p, budget)?, &build_lts(q, budget)?)
}

pub fn bisimilar_naive_lts(left: &Lts, right: &Lts) -> Result<BisimRun, BisimError> {
    let g = Combined::new(left, right);
    let n = g.len();
    // removed[s * n + t]: round in which the pair left the relation
    let mut removed: Vec<Option<usize>> = vec![None; n * n];
    let mut round = 0;
    loop {
        round += 1;
        let related = |removed: &[Option<usize>], s: usize, t: usize| removed[s * n + t].is_none();
        let mut dropped = Vec::new();
        for s in 0..n {
            for t in 0..n {
                if !related(&removed, s, t) {
                    continue;
                }
                let forth = g.succ[s]
                    .iter()
                    .all(|(a, s2)| g.successors_by(t, a).any(|t2| related(&removed, *s2, t2)));
                let back = g.succ[t]
                    .iter()
                    .all(|(a, t2)| g.successors_by(s, a).any(|s2| related(&removed, s2, *t2)));
                if !(forth && back) {
                    dropped.push(s * n + t);
                }
            }
        }
        if dropped.is_empty() {
            break;
        }
        for i in dropped {
            removed[i] = Some(round);
        }
    }
    let rounds = round - 1;
    let (rp, rq) = (0, g.offset);
    let verdict = if removed[rp * n + rq].is_none() {
        BisimVerdict::Bisimilar {
            relation: g.witness(|s, t| removed[s * n + t].is_none()),
        }
    } else {
        let mut builder = FormulaBuilder {
            graph: &g,
            separated: |s, t| removed[s * n + t],
            apart_before: |stage, s, t| removed[s * n + t].is_some_and(|r| r < stage),
            memo: HashMap::new(),
        };
        let formula = builder.distinguish(rp, rq)?;
        BisimVerdict::Distinguished {
            formula: verified(left, right, formula)?,
        }
    };
    Ok(BisimRun {
        verdict,
        combined_states: n,
        rounds,
    })
}

/// One block split, by whether a state has a move into the splitter.
struct Split {
    with_move: Vec<bool>,
    without_move: Vec<bool>,
}

struct Refinement {
    block_of: Vec<usize>,
    splits: Vec<Split>,
}

/// Coarsest stable partition. Splitters are taken smallest first, ties
/// broken by their sorted member list, so the result is reproducible.
fn refine(g: &Combined) -> Refinement {
    let n = g.len();
    let actions: Vec<Action> = g.actions().into_iter().collect();
    let mut blocks: Vec<Vec<usize>> = vec![(0..n).collect()];
    let mut block_of = vec![0usize; n];
    let mut worklist: BTreeSet<(usize, Vec<usize>)> = BTreeSet::from([(n, (0..n).collect())]);
    let mut splits = Vec::new();
    // predecessor lists per action
    let mut pred: BTreeMap<&Action, Vec<Vec<usize>>> = BTreeMap::new();
    for (s, out) in g.succ.iter().enumerate() {
        for (a, t) in out {
            pred.entry(a).or_insert_with(|| vec![Vec::new(); n])[*t].push(s);
        }
    }
    while let Some((_, splitter)) = worklist.pop_first() {
        for a in &actions {
            let mut has_move = vec![false; n];
            let preds = &pred[a];
            for &t in &splitter {
                for &s in &preds[t] {
                    has_move[s] = true;
                }
            }
            for b in 0..blocks.len() {
                let (inside, outside): (Vec<usize>, Vec<usize>) =
                    blocks[b].iter().partition(|&&s| has_move[s]);
                if inside.is_empty() || outside.is_empty() {
                    continue;
                }
                let mut with_move = vec![false; n];
                let mut without_move = vec![false; n];
                for &s in &inside {
                    with_move[s] = true;
                }
                for &s in &outside {
                    without_move[s] = true;
                }
                splits.push(Split {
                    with_move,
                    without_move,
                });
                let fresh = blocks.len();
                for &s in &outside {
                    block_of[s] = fresh;
                }
                worklist.insert((inside.len(), inside.clone()));
                worklist.insert((outside.len(), outside.clone()));
                blocks[b] = inside;
                blocks.push(outside);
            }
        }
    }
    Refinement { block_of, splits }
}

impl Refinement {
    fn separation(&self, s: usize, t: usize) -> Option<usize> {
        self.splits.iter().position(|sp| {
            (sp.with_move[s] && sp.without_move[t]) || (sp.with_move[t] && sp.without_move[s])
        })
    }
}

/// Partition refinement on the disjoint union of both LTSs.
pub fn bisimilar(p: &Process, q: &Process) -> Result<BisimVerdict, BisimError> {
    bisimilar_with_budget(p, q, DEFAULT_STATE_BUDGET).map(|r| r.verdict)
}

pub fn bisimilar_with_budget(
    p: &Process,
    q: &Process,
    budget: usize,
) -> Result<BisimRun, BisimError> {
    bisimilar_lts(&build_lts(p, budget)?, &build_lts(q, budget)?)
}

pub fn bisimilar_lts(left: &Lts, right: &Lts) -> Result<BisimRun, BisimError> {
    let g = Combined::new(left, right);
    let refinement = refine(&g);
    let (rp, rq) = (0, g.offset);
    let verdict = if refinement.block_of[rp] == refinement.block_of[rq] {
        let block_of = &refinement.block_of;
        BisimVerdict::Bisimilar {
            relation: g.witness(|s, t| block_of[s] == block_of[t]),
        }
    } else {
        let mut builder = FormulaBuilder {
            graph: &g,
            separated: |s, t| refinement.separation(s, t),
            apart_before: |stage, s, t| refinement.separation(s, t).is_some_and(|k| k < stage),
            memo: HashMap::new(),
        };
        let formula = builder.distinguish(rp, rq)?;
        BisimVerdict::Distinguished {
            formula: verified(left, right, formula)?,
        }
    };
    Ok(BisimRun {
        verdict,
        combined_states: g.len(),
        rounds: refinement.splits.len(),
    })
}

/// `None` exactly when the processes are bisimilar.
pub fn distinguishing_formula(p: &Process, q: &Process) -> Result<Option<HmlFormula>, BisimError> {
    Ok(bisimilar(p, q)?.formula().cloned())
}

/// Checks both transfer conditions on every pair of `relation`, computing
/// transitions directly from the terms.
pub fn is_strong_bisimulation(relation: &[(Process, Process)]) -> bool {
    let set: BTreeSet<(&Process, &Process)> = relation.iter().map(|(a, b)| (a, b)).collect();
    relation.iter().all(|(p, q)| {
        let tp = transitions(p);
        let tq = transitions(q);
        let forth = tp
            .iter()
            .all(|(a, p2)| tq.iter().any(|(b, q2)| a == b && set.contains(&(p2, q2))));
        let back = tq
            .iter()
            .all(|(b, q2)| tp.iter().any(|(a, p2)| a == b && set.contains(&(p2, q2))));
        forth && back
    })
}
