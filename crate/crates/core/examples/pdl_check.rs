//! Checks dynamic-logic formulas on a Kripke structure read from JSON.

use logeq::pdl::{counter_state, parse_pdl, pdl_satisfies, KripkeStructure};

const MODEL: &str = r#"{
  "states": ["idle", "busy", "done"],
  "props": { "idle": { "ready": true }, "done": { "ready": true, "finished": true } },
  "relations": { "start": [["idle", "busy"]], "work": [["busy", "busy"], ["busy", "done"]] }
}"#;

fn main() {
    let m = KripkeStructure::from_json(MODEL).expect("valid model");
    let idle = m.state_index("idle").unwrap();
    for text in [
        "<start;work*>finished",
        "[start]~ready",
        "[start;work*](ready => finished)",
        "<(ready?;start)*>true",
    ] {
        let phi = parse_pdl(text).expect("valid formula");
        let here = pdl_satisfies(&m, idle, &phi).unwrap();
        let counter = counter_state(&m, &phi).unwrap();
        println!("{phi}: at idle {here}, valid {}", counter.is_none());
    }
}
