//! Turns a super-additive system, where the group can split a joint action
//! cell, into an additive one and certifies the projection back.

use dtds::syntax::parse;
use dtds::system::WindowSystem;
use dtds::transforms::{check_pmorphism, check_transfer, to_additive, DEFAULT_REFINEMENT_BUDGET};
use dtds::Condition;

fn main() {
    let w = WindowSystem::from_json(include_str!("data/split_grid.json")).unwrap();
    println!("input: {} histories over {} times", w.len(), w.horizon() + 1);
    println!("super-additive audit clean: {}", w.audit(false).is_clean());
    println!("additive audit fails (D3): {}", w.audit(true).has(Condition::D3));

    let out = to_additive(&w, DEFAULT_REFINEMENT_BUDGET).unwrap();
    println!("output: {} histories", out.system.len());
    print!("additive audit: {}", out.system.audit(true));
    let witness = check_pmorphism(&out.system, &w, &out.projection).unwrap();
    println!(
        "p-morphism: {} relations checked up to t={}, surjective {}",
        witness.checked_ops.len(),
        witness.horizon,
        witness.surjective
    );
    let formulas: Vec<_> = ["[*] p", "[1] p | [2] p", "dia ([1] ~p & [2] ~p)", "<*> X q"]
        .iter()
        .map(|s| parse(s, 2).unwrap())
        .collect();
    let mismatches = check_transfer(&out.system, &w, &out.projection, &formulas).unwrap();
    println!("truth transfer mismatches: {}", mismatches.len());
}
