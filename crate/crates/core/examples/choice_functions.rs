//! Builds the choice functions used to refine joint actions and checks that
//! fixing any one coordinate still leaves every value reachable.

use dtds::transforms::build_choice;

fn main() {
    let f = build_choice(3, 2).unwrap();
    println!("|X| = 3, two agents (sum mod 3):");
    for a in 0..3 {
        let row: Vec<usize> = (0..3).map(|b| f.apply(&[a, b])).collect();
        println!("  {row:?}");
    }
    for x in 1..=5 {
        for i in 2..=4 {
            let g = build_choice(x, i).unwrap();
            assert!(g.is_coordinate_surjective());
        }
    }
    println!("all |X| in 1..=5 and |I| in 2..=4 are onto per coordinate");
    let vote = build_choice(3, 3).unwrap();
    println!("majority vote: F(2,2,0) = {}, F(0,1,2) = {}", vote.apply(&[2, 2, 0]), vote.apply(&[0, 1, 2]));
    println!("single agent, |X| = 2: {}", build_choice(2, 1).unwrap_err());
}
