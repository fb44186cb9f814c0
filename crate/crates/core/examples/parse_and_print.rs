//! Parses formulas, prints them in abbreviated and primitive form, and
//! lists the closure used by the decision procedure.

use dtds::syntax::{closure, parse, render, render_with, RenderOptions};

fn main() {
    let inputs = [
        "dia [1] X (O1 [1] p & O2 [2] q)",
        "U(q, O1 [1] p)",
        "box G ([1] r -> X O2 [2] s)",
        "M1 p <-> ~O1 ~p",
    ];
    for text in inputs {
        let f = parse(text, 2).expect("valid formula");
        let raw = render_with(&f, RenderOptions { abbreviate: false });
        let sigma = closure(&f);
        println!("{}", render(&f));
        println!("  primitive: {raw}");
        println!("  size {}, closure {}", f.size(), sigma.len());
        assert_eq!(parse(&render(&f), 2).unwrap(), f);
    }

    let f = parse("O1 (p & X q)", 2).unwrap();
    println!("\nclosure of {f}:");
    for g in closure(&f).iter() {
        println!("  {g}");
    }

    match parse("[3] p", 2) {
        Err(e) => println!("\n[3] p with two agents: {e}"),
        Ok(_) => unreachable!(),
    }
}
