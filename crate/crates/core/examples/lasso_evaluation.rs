//! Evaluates formulas on an ultimately periodic system built from a
//! premodel, far beyond the stored prefix for purely temporal formulas.

use std::path::Path;

use dtds::syntax::parse;
use dtds::system::{LassoSystem, RelTag};

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data");
    let text = std::fs::read_to_string(dir.join("fork_lasso.json")).unwrap();
    let sys = LassoSystem::from_json(&text, Some(&dir), false).expect("valid lasso file");
    println!("{} histories, horizon {}", sys.len(), sys.horizon());
    print!("window audit: {}", sys.audit_window());

    for t in 0..3 {
        let p = sys.classes(RelTag::Box, t);
        println!("t={t}: moments {:?}", p.blocks());
    }
    for text in ["X p", "O1 X p", "dia X p", "X G ~p", "F p"] {
        let f = parse(text, 1).unwrap();
        let row: Vec<bool> = (0..sys.len()).map(|h| sys.eval_at(h, 0, &f).unwrap()).collect();
        println!("{text:<10} at t=0: {row:?}");
    }
    let g = parse("G ~p", 1).unwrap();
    println!("G ~p at t=1000 on h0: {}", sys.eval_at(0, 1000, &g).unwrap());
    let boxed = parse("box p", 1).unwrap();
    println!("box p at t=1000: {}", sys.eval_at(0, 1000, &boxed).unwrap_err());
}
