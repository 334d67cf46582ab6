//! Unfolds a three-component process and prints its runs.

use logeq::ccs::{build_lts, parse_process, Action, DEFAULT_STATE_BUDGET};

fn main() {
    let p = parse_process("(x?.y?.0 + x!.z?.0) | x!.0 | y!.0").expect("valid process");
    let lts = build_lts(&p, DEFAULT_STATE_BUDGET).expect("finite");
    println!("{} states, {} transitions", lts.len(), lts.edge_count());

    println!("runs labelled tau,tau:");
    for run in lts.runs_labelled(&[Action::Tau, Action::Tau], 10) {
        println!("  {run}");
    }

    println!("all maximal runs:");
    for run in lts.maximal_runs(20) {
        println!("  {run}");
    }
}
