//! Checks equational proofs in Kleene algebra, including a broken one.

use logeq::ka::{check_proof, ProofScript, ProofVerdict};

const PROOF: &str = "
goal: 1;a + a;0 = a
1. a;0 = 0               BY axiom(seq-zero, x:=a)
2. 1;a + a;0 = 1;a + 0   BY cong(1, [1])
3. 1;a + 0 = 1;a         BY axiom(plus-zero, x:=1;a)
4. 1;a = a               BY axiom(seq-one, x:=a)
5. 1;a + a;0 = a         BY trans(2, 3, 4)
";

fn main() {
    let script = ProofScript::parse(PROOF).expect("well-formed script");
    println!("{}", script.to_text());
    println!("verdict: {:?}", check_proof(&script));

    let broken = PROOF.replace("trans(2, 3, 4)", "trans(2, 4)");
    match check_proof(&ProofScript::parse(&broken).unwrap()) {
        ProofVerdict::Rejected { step, reason } => println!("broken proof: step {step}: {reason}"),
        ProofVerdict::Accepted { .. } => println!("broken proof accepted?"),
    }
}
