//! Builds automata for regular programs and compares languages.

use logeq::automata::{build_eps_nfa, collapse, equivalent, merge_epsilon_components, Equivalence};
use logeq::regprog::parse_program;

fn main() {
    let alpha = parse_program("(a + b)*;a").unwrap();
    let eps = build_eps_nfa(&alpha).unwrap();
    println!("{alpha}: {} states with epsilon moves", eps.states);
    let nfa = collapse(&eps);
    println!("after collapse: {} states", nfa.len());
    print!("{}", nfa.to_dot());

    // merging whole epsilon components changes the language
    let sneaky = parse_program("a + b*").unwrap();
    let merged = merge_epsilon_components(&build_eps_nfa(&sneaky).unwrap());
    println!(
        "{sneaky}: component merge accepts ba? {}",
        merged.accepts(&["b", "a"])
    );

    for (l, r) in [("a", "a+a"), ("(a+b)*", "(a*;b*)*"), ("a;b", "b;a")] {
        let (l, r) = (parse_program(l).unwrap(), parse_program(r).unwrap());
        match equivalent(&l, &r).unwrap() {
            Equivalence::Equal => println!("{l} = {r}"),
            Equivalence::Counterexample(w) => println!("{l} != {r}, witness {w:?}"),
        }
    }
}
