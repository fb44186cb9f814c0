//! Evaluates the bundled legal positions on a small offer scenario: agent 1
//! either accepts or declines, and accepting binds both agents next.

use dtds::corpus::hohfeld;
use dtds::Premodel;

fn main() {
    let text = include_str!("data/offer.json");
    let m = Premodel::from_json(text, false).expect("offer model is valid");
    print!("{:<18}", "");
    for s in 0..m.len() {
        print!("{:>9}", m.name(s));
    }
    println!();
    for (position, f) in hohfeld() {
        print!("{:<18}", position.name);
        for s in 0..m.len() {
            let v = m.eval(s, &f).expect("agents in range");
            print!("{:>9}", if v { "yes" } else { "-" });
        }
        println!();
    }
}
