//! Checks the bundled proof script, derives the until-introduction rule
//! for a few premise instances, and runs a small mutation test.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dtds::corpus::extra_rule_instances;
use dtds::proofkit::{derive_extra_rule, match_axiom, mutate, ProofScript};
use dtds::syntax::parse;

fn main() {
    let script = ProofScript::parse(include_str!("data/until_weakening.proof"), 2).unwrap();
    print!("{script}");
    println!("check: {:?}\n", script.check(2));

    for text in ["U(p,q) <-> (p | (q & X U(p,q)))", "O1 p -> O1 [1] p", "[*] X p -> X box p", "p -> p"] {
        let m = match_axiom(&parse(text, 2).unwrap(), 2).unwrap();
        println!("{text}: {} {:?}", m.id, m.agent.map(|a| a.index()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for inst in extra_rule_instances() {
        let s = derive_extra_rule(&inst.phi, &inst.alpha, &inst.beta, &inst.proof1, &inst.proof2, 2).unwrap();
        let rejected = (0..50).filter(|_| mutate(&s, &mut rng).script.check(2).is_err()).count();
        println!(
            "\n{} ({} lines, checks: {}), mutants rejected: {rejected}/50",
            s.conclusion().unwrap(),
            s.len(),
            s.check(2).is_ok()
        );
    }
}
