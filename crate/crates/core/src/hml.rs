//! Hennessy-Milner logic: formulas, satisfaction, bounded enumeration.

use std::collections::BTreeSet;
use std::fmt;

use crate::ccs::{transitions, Action, Lts, Process};
use crate::syntax::{parse_all, ParseError};

/// Core HML. Disjunction, implication, `false` and `<a>` are sugar over
/// these four forms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HmlFormula {
    True,
    Not(Box<HmlFormula>),
    And(Box<HmlFormula>, Box<HmlFormula>),
    /// `[a]phi`
    Necessarily(Action, Box<HmlFormula>),
}

impl HmlFormula {
    pub fn not(f: HmlFormula) -> Self {
        HmlFormula::Not(Box::new(f))
    }

    pub fn and(l: HmlFormula, r: HmlFormula) -> Self {
        HmlFormula::And(Box::new(l), Box::new(r))
    }

    pub fn necessarily(a: Action, f: HmlFormula) -> Self {
        HmlFormula::Necessarily(a, Box::new(f))
    }

    pub fn falsity() -> Self {
        Self::not(HmlFormula::True)
    }

    /// `¬(¬l ∧ ¬r)`
    pub fn or(l: HmlFormula, r: HmlFormula) -> Self {
        Self::not(Self::and(Self::not(l), Self::not(r)))
    }

    /// `¬l ∨ r`
    pub fn implies(l: HmlFormula, r: HmlFormula) -> Self {
        Self::or(Self::not(l), r)
    }

    /// `<a>phi` is `¬[a]¬phi`.
    pub fn possibly(a: Action, f: HmlFormula) -> Self {
        Self::not(Self::necessarily(a, Self::not(f)))
    }

    pub fn modal_depth(&self) -> usize {
        match self {
            HmlFormula::True => 0,
            HmlFormula::Not(f) => f.modal_depth(),
            HmlFormula::And(l, r) => l.modal_depth().max(r.modal_depth()),
            HmlFormula::Necessarily(_, f) => 1 + f.modal_depth(),
        }
    }

    /// Number of constructor nodes.
    pub fn size(&self) -> usize {
        match self {
            HmlFormula::True => 1,
            HmlFormula::Not(f) | HmlFormula::Necessarily(_, f) => 1 + f.size(),
            HmlFormula::And(l, r) => 1 + l.size() + r.size(),
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        // 1: disjunction, 2: conjunction, 3: prefix operators
        match self {
            HmlFormula::True => f.write_str("true"),
            HmlFormula::Not(inner) => match &**inner {
                HmlFormula::True => f.write_str("false"),
                HmlFormula::Necessarily(a, body) if matches!(**body, HmlFormula::Not(_)) => {
                    let HmlFormula::Not(phi) = &**body else {
                        unreachable!()
                    };
                    write!(f, "<{a}>")?;
                    phi.fmt_prec(f, 3)
                }
                HmlFormula::And(l, r)
                    if matches!(**l, HmlFormula::Not(_)) && matches!(**r, HmlFormula::Not(_)) =>
                {
                    let (HmlFormula::Not(l), HmlFormula::Not(r)) = (&**l, &**r) else {
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
            HmlFormula::And(l, r) => {
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
            HmlFormula::Necessarily(a, body) => {
                write!(f, "[{a}]")?;
                body.fmt_prec(f, 3)
            }
        }
    }
}

/// Prints with sugar recovered where the shape matches exactly, so the
/// output reparses to the identical tree.
impl fmt::Display for HmlFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

pub fn parse_hml(text: &str) -> Result<HmlFormula, ParseError> {
    parse_all(text, |p| p.hml())
}

impl std::str::FromStr for HmlFormula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_hml(s)
    }
}

/// `P ⊨ phi`, by structural recursion over the formula and the SOS rules.
pub fn satisfies(p: &Process, phi: &HmlFormula) -> bool {
    match phi {
        HmlFormula::True => true,
        HmlFormula::Not(f) => !satisfies(p, f),
        HmlFormula::And(l, r) => satisfies(p, l) && satisfies(p, r),
        HmlFormula::Necessarily(a, f) => transitions(p)
            .iter()
            .filter(|(b, _)| b == a)
            .all(|(_, q)| satisfies(q, f)),
    }
}

/// The set of LTS states satisfying `phi`, computed bottom-up.
pub fn satisfying_states(lts: &Lts, phi: &HmlFormula) -> Vec<bool> {
    let n = lts.len();
    match phi {
        HmlFormula::True => vec![true; n],
        HmlFormula::Not(f) => satisfying_states(lts, f).into_iter().map(|b| !b).collect(),
        HmlFormula::And(l, r) => {
            let l = satisfying_states(lts, l);
            let r = satisfying_states(lts, r);
            l.into_iter().zip(r).map(|(a, b)| a && b).collect()
        }
        HmlFormula::Necessarily(a, f) => {
            let inner = satisfying_states(lts, f);
            (0..n)
                .map(|s| {
                    lts.successors(s)
                        .iter()
                        .filter(|(b, _)| b == a)
                        .all(|&(_, t)| inner[t])
                })
                .collect()
        }
    }
}

/// Every core formula over `actions` with modal depth at most
/// `max_modal_depth` and at most `max_size` nodes, ordered by size and
/// then by printed text.
pub fn enumerate_formulas(
    actions: &BTreeSet<Action>,
    max_modal_depth: usize,
    max_size: usize,
) -> Vec<HmlFormula> {
    if max_size == 0 {
        return Vec::new();
    }
    // depth beyond size - 1 cannot be realized
    let depth = max_modal_depth.min(max_size - 1);
    // table[n][k]: formulas of exactly n nodes with modal depth <= k
    let mut table: Vec<Vec<Vec<HmlFormula>>> = vec![vec![Vec::new(); depth + 1]; max_size + 1];
    for k in 0..=depth {
        table[1][k] = vec![HmlFormula::True];
    }
    for n in 2..=max_size {
        for k in 0..=depth {
            let mut here = Vec::new();
            for f in &table[n - 1][k] {
                here.push(HmlFormula::not(f.clone()));
            }
            if k > 0 {
                for a in actions {
                    for f in &table[n - 1][k - 1] {
                        here.push(HmlFormula::necessarily(a.clone(), f.clone()));
                    }
                }
            }
            for i in 1..n - 1 {
                for l in &table[i][k] {
                    for r in &table[n - 1 - i][k] {
                        here.push(HmlFormula::and(l.clone(), r.clone()));
                    }
                }
            }
            table[n][k] = here;
        }
    }
    let mut out = Vec::new();
    for row in table.iter_mut().skip(1) {
        let mut level = std::mem::take(&mut row[depth]);
        let mut keyed: Vec<(String, HmlFormula)> =
            level.drain(..).map(|f| (f.to_string(), f)).collect();
        keyed.sort();
        out.extend(keyed.into_iter().map(|(_, f)| f));
    }
    out
}
