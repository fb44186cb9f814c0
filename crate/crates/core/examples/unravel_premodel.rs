//! Unravels a premodel into an interpreted system and checks that every
//! closure formula keeps its truth value along the unraveled histories.

use dtds::syntax::{closure, parse};
use dtds::transforms::{make_acceptable, unravel, UnravelOptions};
use dtds::Premodel;

fn main() {
    let m = Premodel::from_json(include_str!("data/offer.json"), false).unwrap();
    let f = parse("dia [1] X (O1 [1] p & O2 [2] q) & U(p, true) | X q", 2).unwrap();
    let sigma = closure(&f);
    assert!(m.check_side_conditions(&sigma).unwrap().is_empty());

    let path = make_acceptable(&m, m.state("accept").unwrap(), &sigma).unwrap();
    println!("acceptable path from accept: stem {:?} loop {:?}", path.stem(), path.cycle());

    let seeds: Vec<usize> = (0..m.len()).collect();
    let sys = unravel(&m, &sigma, &seeds, UnravelOptions::with_horizon(3)).unwrap();
    println!("{} histories up to horizon {}", sys.len(), sys.horizon());
    print!("audit: {}", sys.audit_window());
    let mut checked = 0;
    for g in &sigma {
        for h in 0..sys.len() {
            for t in 0..=sys.horizon() {
                let premodel = m.eval(sys.state(h, t), g).unwrap();
                assert_eq!(sys.eval_at(h, t, g).unwrap(), premodel, "{g}");
                checked += 1;
            }
        }
    }
    println!("{checked} closure evaluations agree with the premodel");
}
