//! Loads a premodel, audits its structural conditions, and shows how a
//! broken temporal relation is reported.

use dtds::premodel::PremodelFile;
use dtds::syntax::{closure, parse};
use dtds::Premodel;

fn main() {
    let text = include_str!("data/offer.json");
    let m = Premodel::from_json(text, false).expect("valid");
    println!("offer model: {} states, {} agents", m.len(), m.agents());
    print!("audit: {}", m.audit());

    let f = parse("U(q, O1 [1] p) | X p", 2).unwrap();
    let failures = m.check_side_conditions(&closure(&f)).unwrap();
    println!("side conditions for {f}: {} failures", failures.len());
    println!("extension: {:?}", m.extension(&f).unwrap().ones().map(|s| m.name(s)).collect::<Vec<_>>());

    // Dropping the only successor of `free` breaks seriality of next.
    let mut file: PremodelFile = serde_json::from_str(text).unwrap();
    file.next.retain(|(a, _)| a != "free");
    let broken = file.into_premodel().unwrap();
    print!("without a successor for free:\n{}", broken.audit());
    assert!(Premodel::from_json(&serde_json::to_string(&broken.to_file()).unwrap(), false).is_err());
}
