//! Runs each correspondence check on a couple of instances.

use logeq::ccs::parse_process;
use logeq::correspondence::{check_prop1, check_prop3, check_prop4, summary_table, SamplingConfig};
use logeq::regprog::parse_program;

fn main() {
    let mut reports = Vec::new();
    for (l, r) in [("a?.0 | 0", "a?.0"), ("tau.tau.0", "tau.0")] {
        let (p, q) = (parse_process(l).unwrap(), parse_process(r).unwrap());
        reports.push(check_prop1(&p, &q, 4).unwrap());
    }
    for (l, r) in [("a", "a+a"), ("a", "b"), ("a;b + a;c", "a;(b + c)")] {
        let (a, b) = (parse_program(l).unwrap(), parse_program(r).unwrap());
        reports.push(check_prop3(&a, &b, &SamplingConfig::default()).unwrap());
        reports.push(check_prop4(&a, &b, 2).unwrap());
    }
    for r in &reports {
        println!("{}", r.to_json_line());
    }
    print!("{}", summary_table(&reports));
}
