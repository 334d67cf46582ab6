//! Model-checks a few Hennessy-Milner formulas against a vending machine.

use logeq::ccs::parse_process;
use logeq::hml::{parse_hml, satisfies};

fn main() {
    let machine = parse_process("coin?.(tea!.0 + coffee!.0)").expect("valid process");
    let formulas = [
        "<coin?>true",
        "[coin?]<tea!>true",
        "[coin?][coin?]false",
        "<coin?>(<tea!>true & <coffee!>true)",
        "<tea!>true",
    ];
    for text in formulas {
        let phi = parse_hml(text).expect("valid formula");
        println!("{machine} |= {phi}: {}", satisfies(&machine, &phi));
    }
}
