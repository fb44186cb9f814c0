//! Filtrates random premodels through a closure set and checks that the
//! quotient is again a premodel satisfying the same closure formulas.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dtds::premodel::{random_premodel, RandomPremodel};
use dtds::syntax::{closure, parse};
use dtds::transforms::{commutes, filtrate};

fn main() {
    let f = parse("O1 [2] p -> X U(q, dia [1] p)", 2).unwrap();
    let sigma = closure(&f);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for round in 0..5 {
        let m = random_premodel(&mut rng, &RandomPremodel::new(8, 2, &["p", "q"]));
        let out = filtrate(&m, &sigma).unwrap();
        let clean = out.model.audit().is_clean();
        let agree = (0..m.len()).all(|s| {
            let c = out.classes.block_of(s);
            sigma.iter().all(|g| m.eval(s, g).unwrap() == out.model.eval(c, g).unwrap())
        });
        println!(
            "round {round}: {} states -> {}, audit clean {clean}, commutes {}, closure preserved {agree}",
            m.len(),
            out.model.len(),
            commutes(&m, &out.classes)
        );
    }
}
