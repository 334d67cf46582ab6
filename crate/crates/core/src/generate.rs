//! Seeded generators for processes, programs, Kripke structures and
//! formulas. Every generator takes its RNG explicitly; corpora built from
//! the same seed are identical across runs.

use std::collections::BTreeSet;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ccs::{Action, Process};
use crate::pdl::{KripkeStructure, PdlFormula};
use crate::regprog::{Interpretation, RegProgram, Relation};

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

fn actions_over(channels: &[&str]) -> Vec<Action> {
    let mut out = vec![Action::Tau];
    for c in channels {
        out.push(Action::receive(*c));
        out.push(Action::send(*c));
    }
    out
}

/// Every process over `channels` with at most `max_prefixes` prefixes,
/// up to the following normalisations: summands of a sum are listed in
/// sorted order, both operands of `|` are non-nil with the left one not
/// greater than the right, and restriction wraps only non-nil bodies that
/// are not themselves restrictions.
pub fn process_family(channels: &[&str], max_prefixes: usize) -> Vec<Process> {
    let actions = actions_over(channels);
    // exact[k]: processes with exactly k prefixes
    let mut exact: Vec<Vec<Process>> = vec![vec![Process::nil()]];
    for k in 1..=max_prefixes {
        let mut here: BTreeSet<Process> = BTreeSet::new();
        // prefixed summands with exactly j prefixes
        let summands = |j: usize, exact: &Vec<Vec<Process>>| -> Vec<(Action, Process)> {
            let mut out = Vec::new();
            for a in &actions {
                for p in &exact[j - 1] {
                    out.push((a.clone(), p.clone()));
                }
            }
            out.sort();
            out
        };
        // sums: sorted multisets of summands whose sizes add to k
        fn multisets(
            k: usize,
            min_item: Option<&(Action, Process)>,
            pool: &[Vec<(Action, Process)>],
            acc: &mut Vec<(Action, Process)>,
            out: &mut BTreeSet<Process>,
        ) {
            if k == 0 {
                if !acc.is_empty() {
                    out.insert(Process::sum(acc.clone()));
                }
                return;
            }
            for j in 1..=k {
                for item in &pool[j] {
                    if min_item.is_some_and(|m| item < m) {
                        continue;
                    }
                    acc.push(item.clone());
                    multisets(k - j, Some(item), pool, acc, out);
                    acc.pop();
                }
            }
        }
        let pool: Vec<Vec<(Action, Process)>> = (0..=k)
            .map(|j| {
                if j == 0 {
                    Vec::new()
                } else {
                    summands(j, &exact)
                }
            })
            .collect();
        multisets(k, None, &pool, &mut Vec::new(), &mut here);
        for i in 1..k {
            for l in &exact[i] {
                for r in &exact[k - i] {
                    if l <= r {
                        here.insert(Process::par(l.clone(), r.clone()));
                    }
                }
            }
        }
        let bodies: Vec<Process> = here
            .iter()
            .filter(|p| !matches!(p, Process::Restrict(..)))
            .cloned()
            .collect();
        for body in bodies {
            for c in channels {
                here.insert(Process::restrict(*c, body.clone()));
            }
        }
        exact.push(here.into_iter().collect());
    }
    exact.into_iter().flatten().collect()
}

/// A random process with at most `max_prefixes` prefixes.
pub fn random_process(rng: &mut Rng64, channels: &[&str], max_prefixes: usize) -> Process {
    let budget = rng.random_range(0..=max_prefixes);
    random_process_exact(rng, &actions_over(channels), channels, budget)
}

fn random_process_exact(
    rng: &mut Rng64,
    actions: &[Action],
    channels: &[&str],
    budget: usize,
) -> Process {
    if budget == 0 {
        return Process::nil();
    }
    match rng.random_range(0..10) {
        0..=5 => {
            let mut summands = Vec::new();
            let mut left = budget;
            while left > 0 {
                let take = rng.random_range(1..=left);
                let a = actions.choose(rng).expect("nonempty").clone();
                summands.push((a, random_process_exact(rng, actions, channels, take - 1)));
                left -= take;
                if rng.random_bool(0.5) {
                    break;
                }
            }
            // spend the rest on one more summand
            if left > 0 {
                let a = actions.choose(rng).expect("nonempty").clone();
                summands.push((a, random_process_exact(rng, actions, channels, left - 1)));
            }
            Process::sum(summands)
        }
        6..=8 if budget >= 2 => {
            let split = rng.random_range(1..budget);
            Process::par(
                random_process_exact(rng, actions, channels, split),
                random_process_exact(rng, actions, channels, budget - split),
            )
        }
        _ => {
            let c = channels.choose(rng).expect("nonempty");
            Process::restrict(*c, random_process_exact(rng, actions, channels, budget))
        }
    }
}

/// A process bisimilar to `p`, obtained by one of: adding a nil parallel
/// component, swapping a parallel composition, duplicating or reordering
/// summands.
pub fn bisimilar_variant(rng: &mut Rng64, p: &Process) -> Process {
    match rng.random_range(0..4) {
        0 => Process::par(p.clone(), Process::nil()),
        1 => Process::par(Process::nil(), p.clone()),
        _ => rewrite_somewhere(rng, p),
    }
}

fn rewrite_somewhere(rng: &mut Rng64, p: &Process) -> Process {
    match p {
        Process::Par(l, r) => match rng.random_range(0..3) {
            0 => Process::par((**r).clone(), (**l).clone()),
            1 => Process::par(rewrite_somewhere(rng, l), (**r).clone()),
            _ => Process::par((**l).clone(), rewrite_somewhere(rng, r)),
        },
        Process::Restrict(c, body) => Process::restrict(c.clone(), rewrite_somewhere(rng, body)),
        Process::Sum(s) if s.is_empty() => Process::par(Process::nil(), Process::nil()),
        Process::Sum(s) => {
            let mut s = s.clone();
            let i = rng.random_range(0..s.len());
            match rng.random_range(0..3) {
                0 => s.push(s[i].clone()),
                1 => s.reverse(),
                _ => s[i].1 = rewrite_somewhere(rng, &s[i].1),
            }
            Process::sum(s)
        }
    }
}

/// Seeded pairs: half are a random process with a bisimilar variant,
/// half are two independent random processes.
pub fn random_process_pairs(
    seed: u64,
    count: usize,
    channels: &[&str],
    max_prefixes: usize,
) -> Vec<(Process, Process)> {
    let mut rng = rng(seed);
    (0..count)
        .map(|i| {
            let p = random_process(&mut rng, channels, max_prefixes);
            let q = if i % 2 == 0 {
                bisimilar_variant(&mut rng, &p)
            } else {
                random_process(&mut rng, channels, max_prefixes)
            };
            (p, q)
        })
        .collect()
}

/// A random core program with at most `max_size` nodes.
pub fn random_program(rng: &mut Rng64, prims: &[&str], max_size: usize) -> RegProgram {
    let size = rng.random_range(1..=max_size.max(1));
    random_program_exact(rng, prims, size)
}

fn random_program_exact(rng: &mut Rng64, prims: &[&str], size: usize) -> RegProgram {
    match size {
        0 | 1 => RegProgram::prim(*prims.choose(rng).expect("nonempty")),
        2 => RegProgram::star(random_program_exact(rng, prims, 1)),
        _ => match rng.random_range(0..5) {
            0 => RegProgram::star(random_program_exact(rng, prims, size - 1)),
            k => {
                let split = rng.random_range(1..size - 1);
                let l = random_program_exact(rng, prims, split);
                let r = random_program_exact(rng, prims, size - 1 - split);
                if k <= 2 {
                    RegProgram::seq(l, r)
                } else {
                    RegProgram::choice(l, r)
                }
            }
        },
    }
}

/// Applies one Kleene-algebra axiom, read as a rewrite in either
/// direction, at a random position where it matches. Returns `None` when
/// the chosen position admits no rewrite.
fn rewrite_once(rng: &mut Rng64, t: &RegProgram) -> Option<RegProgram> {
    use RegProgram as R;
    let children: Vec<&RegProgram> = match t {
        R::Seq(l, r) | R::Choice(l, r) => vec![l, r],
        R::Star(p) => vec![p],
        _ => vec![],
    };
    if !children.is_empty() && rng.random_bool(0.6) {
        let i = rng.random_range(0..children.len());
        let new_child = rewrite_once(rng, children[i])?;
        return Some(match (t, i) {
            (R::Seq(_, r), 0) => R::seq(new_child, (**r).clone()),
            (R::Seq(l, _), _) => R::seq((**l).clone(), new_child),
            (R::Choice(_, r), 0) => R::choice(new_child, (**r).clone()),
            (R::Choice(l, _), _) => R::choice((**l).clone(), new_child),
            (R::Star(_), _) => R::star(new_child),
            _ => unreachable!(),
        });
    }
    let mut options: Vec<RegProgram> = vec![
        // plus-idem, plus-zero, seq-one (expanding)
        R::choice(t.clone(), t.clone()),
        R::choice(t.clone(), R::Zero),
        R::seq(R::One, t.clone()),
        R::seq(t.clone(), R::One),
    ];
    match t {
        R::Choice(x, y) => {
            options.push(R::choice((**y).clone(), (**x).clone()));
            if let R::Choice(y1, z) = &**y {
                options.push(R::choice(
                    R::choice((**x).clone(), (**y1).clone()),
                    (**z).clone(),
                ));
            }
            if let R::Choice(x1, y1) = &**x {
                options.push(R::choice(
                    (**x1).clone(),
                    R::choice((**y1).clone(), (**y).clone()),
                ));
            }
            if x == y {
                options.push((**x).clone());
            }
            if **y == R::Zero {
                options.push((**x).clone());
            }
            if let (R::Seq(a, b), R::Seq(c, d)) = (&**x, &**y) {
                if a == c {
                    options.push(R::seq(
                        (**a).clone(),
                        R::choice((**b).clone(), (**d).clone()),
                    ));
                }
                if b == d {
                    options.push(R::seq(
                        R::choice((**a).clone(), (**c).clone()),
                        (**b).clone(),
                    ));
                }
            }
        }
        R::Seq(x, y) => {
            if let R::Seq(y1, z) = &**y {
                options.push(R::seq(R::seq((**x).clone(), (**y1).clone()), (**z).clone()));
            }
            if let R::Seq(x1, y1) = &**x {
                options.push(R::seq(
                    (**x1).clone(),
                    R::seq((**y1).clone(), (**y).clone()),
                ));
            }
            if let R::Choice(a, b) = &**y {
                options.push(R::choice(
                    R::seq((**x).clone(), (**a).clone()),
                    R::seq((**x).clone(), (**b).clone()),
                ));
            }
            if let R::Choice(a, b) = &**x {
                options.push(R::choice(
                    R::seq((**a).clone(), (**y).clone()),
                    R::seq((**b).clone(), (**y).clone()),
                ));
            }
            if **x == R::One {
                options.push((**y).clone());
            }
            if **y == R::One {
                options.push((**x).clone());
            }
        }
        R::Star(x) => {
            // star-unfold in both orientations
            options.push(R::choice(R::One, R::seq((**x).clone(), t.clone())));
            options.push(R::choice(R::One, R::seq(t.clone(), (**x).clone())));
        }
        _ => {}
    }
    options.choose(rng).cloned()
}

/// A program provably equal to `alpha` in Kleene algebra, reached by
/// `steps` random axiom rewrites.
pub fn ka_variant(rng: &mut Rng64, alpha: &RegProgram, steps: usize) -> RegProgram {
    let mut t = alpha.clone();
    for _ in 0..steps {
        if let Some(next) = rewrite_once(rng, &t) {
            if next.size() <= 4 * alpha.size() + 8 {
                t = next;
            }
        }
    }
    t
}

/// Pairs `(alpha, beta)` with `beta` a rewrite of `alpha`.
pub fn equivalent_program_pairs(
    seed: u64,
    count: usize,
    prims: &[&str],
    max_size: usize,
) -> Vec<(RegProgram, RegProgram)> {
    let mut rng = rng(seed);
    (0..count)
        .map(|_| {
            let alpha = random_program(&mut rng, prims, max_size);
            let steps = rng.random_range(1..=4);
            let beta = ka_variant(&mut rng, &alpha, steps);
            (alpha, beta)
        })
        .collect()
}

pub fn random_relation(rng: &mut Rng64, n: usize, density: f64) -> Relation {
    let mut r = Relation::empty(n);
    for u in 0..n {
        for v in 0..n {
            if rng.random_bool(density) {
                r.insert(u, v);
            }
        }
    }
    r
}

pub fn random_interpretation(rng: &mut Rng64, n: usize, prims: &[&str]) -> Interpretation {
    let mut sigma = Interpretation::new(n);
    for a in prims {
        let density = rng.random_range(0.1..0.6);
        sigma.set_relation(*a, random_relation(rng, n, density));
    }
    sigma
}

pub fn random_kripke(rng: &mut Rng64, n: usize, prims: &[&str], props: &[&str]) -> KripkeStructure {
    let sigma = random_interpretation(rng, n, prims);
    let mut m = KripkeStructure::new(sigma, props.iter().map(|p| p.to_string()));
    for s in 0..n {
        for p in props {
            if rng.random_bool(0.5) {
                m.set_true(s, p);
            }
        }
    }
    m
}

/// A random PDL formula with modal depth at most `depth`, whose boxes
/// carry random core programs.
pub fn random_pdl(rng: &mut Rng64, props: &[&str], prims: &[&str], depth: usize) -> PdlFormula {
    let leaf = |rng: &mut Rng64| match rng.random_range(0..6) {
        0 => PdlFormula::True,
        _ => PdlFormula::prop(*props.choose(rng).expect("nonempty")),
    };
    match rng.random_range(0..6) {
        0 | 1 => leaf(rng),
        2 => PdlFormula::not(random_pdl(rng, props, prims, depth)),
        3 => PdlFormula::and(
            random_pdl(rng, props, prims, depth.min(1)),
            random_pdl(rng, props, prims, depth),
        ),
        _ if depth == 0 => leaf(rng),
        4 => PdlFormula::necessarily(
            random_program(rng, prims, 3),
            random_pdl(rng, props, prims, depth - 1),
        ),
        _ => PdlFormula::possibly(
            random_program(rng, prims, 3),
            random_pdl(rng, props, prims, depth - 1),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::equivalent;
    use crate::bisim::bisimilar;

    #[test]
    fn family_respects_bounds() {
        let fam = process_family(&["a"], 2);
        assert!(fam.iter().all(|p| p.prefix_count() <= 2));
        assert!(fam.contains(&Process::nil()));
        let unique: BTreeSet<&Process> = fam.iter().collect();
        assert_eq!(unique.len(), fam.len());
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(
            random_process_pairs(7, 20, &["a", "b"], 4),
            random_process_pairs(7, 20, &["a", "b"], 4)
        );
        assert_eq!(
            equivalent_program_pairs(7, 20, &["a", "b"], 6),
            equivalent_program_pairs(7, 20, &["a", "b"], 6)
        );
    }

    #[test]
    fn variants_are_bisimilar() {
        let mut r = rng(3);
        for _ in 0..50 {
            let p = random_process(&mut r, &["a", "b"], 4);
            let q = bisimilar_variant(&mut r, &p);
            assert!(bisimilar(&p, &q).unwrap().is_bisimilar(), "{p} vs {q}");
        }
    }

    #[test]
    fn rewrites_preserve_language() {
        for (a, b) in equivalent_program_pairs(11, 40, &["a", "b"], 6) {
            assert!(equivalent(&a, &b).unwrap().is_equal(), "{a} vs {b}");
        }
    }

    #[test]
    fn random_programs_are_core_and_bounded() {
        let mut r = rng(5);
        for _ in 0..100 {
            let p = random_program(&mut r, &["a", "b"], 8);
            assert!(p.is_core() && p.size() <= 8);
        }
    }
}
