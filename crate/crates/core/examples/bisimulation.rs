//! Decides bisimilarity both ways and explains negative answers.

use logeq::bisim::{bisimilar, bisimilar_naive_with_budget, BisimVerdict};
use logeq::ccs::{parse_process, DEFAULT_STATE_BUDGET};

fn main() {
    let pairs = [
        ("tau.tau.0", "tau.0"),
        ("a?.0 | 0", "a?.0"),
        ("a?.(b!.0 + c!.0)", "a?.b!.0 + a?.c!.0"),
        ("a?.0 | b?.0", "a?.b?.0 + b?.a?.0"),
    ];
    for (l, r) in pairs {
        let (p, q) = (parse_process(l).unwrap(), parse_process(r).unwrap());
        let naive = bisimilar_naive_with_budget(&p, &q, DEFAULT_STATE_BUDGET).unwrap();
        match bisimilar(&p, &q).unwrap() {
            BisimVerdict::Bisimilar { relation } => {
                println!("{p} ~ {q}");
                for (s, t) in relation {
                    println!("    ({s}, {t})");
                }
            }
            BisimVerdict::Distinguished { formula } => {
                println!("{p} !~ {q}, told apart by {formula}");
            }
        }
        println!(
            "    naive procedure: {} rounds, same answer: {}",
            naive.rounds,
            naive.verdict.is_bisimilar() == bisimilar(&p, &q).unwrap().is_bisimilar()
        );
    }
}
