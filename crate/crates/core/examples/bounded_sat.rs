//! Bounded satisfiability and validity search with re-verified witnesses.

use dtds::decide::{find_countermodel, sat, SatOptions, Verdict};
use dtds::syntax::parse;

fn main() {
    let cases = [
        ("dia [1] X (O1 [1] p & O2 [2] q)", 2),
        ("O1 p & O1 ~p", 1),
        ("p & ~p", 1),
        ("X p & X ~p", 1),
        ("~[1] p & [2] p & dia [1] ~p", 2),
    ];
    for (text, agents) in cases {
        let f = parse(text, agents).unwrap();
        let r = sat(&f, &SatOptions::new(4, agents)).unwrap();
        match &r.verdict {
            Verdict::Sat(w) => println!(
                "{text}: SAT on {} states at {} ({:?})",
                w.model.len(),
                w.model.name(w.state),
                w.report
            ),
            Verdict::UnsatUpTo { bound, exhaustive_up_to } => println!(
                "{text}: UNSAT up to {bound} states (exhaustive to {exhaustive_up_to}, {} explored)",
                r.explored
            ),
        }
    }
    let x = parse("X p -> p", 1).unwrap();
    let r = find_countermodel(&x, &SatOptions::new(4, 1)).unwrap();
    let w = r.witness().unwrap();
    println!("\ncountermodel to X p -> p:\n{}", w.model.to_json());
}
