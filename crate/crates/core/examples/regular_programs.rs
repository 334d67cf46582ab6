//! Evaluates regular programs as relations over a small state space.

use logeq::regprog::{eval_relation, parse_program, Interpretation};

fn main() {
    // a: 0 -> 1 -> 2, b: 2 -> 0
    let sigma = Interpretation::new(3)
        .with_relation("a", [(0, 1), (1, 2)])
        .with_relation("b", [(2, 0)]);
    for text in ["a", "a;a", "a + b", "a*", "(a;a;b)*", "a;b;a"] {
        let alpha = parse_program(text).expect("valid program");
        let rel = eval_relation(&sigma, &alpha).expect("known primitives");
        println!("{alpha:<10} {:?}", rel.pairs());
    }
}
