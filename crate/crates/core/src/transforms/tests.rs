use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::audit::Condition;
use crate::premodel::{random_premodel, Premodel, PremodelParts, RandomPremodel};
use crate::relation::{Partition, Relation, StateSet};
use crate::syntax::{closure, parse, ClosureSet, Formula};
use crate::system::{RelTag, Slice, WindowSystem};

fn f(s: &str) -> Formula {
    parse(s, 2).unwrap()
}

/// A window with ought equal to the box relation. Each time is given as box
/// labels, one label vector per agent, group labels and the true atoms.
type TimeSpec<'a> = (&'a [usize], Vec<&'a [usize]>, &'a [usize], Vec<(&'a str, &'a [usize])>);

fn window(agents: usize, times: &[TimeSpec]) -> WindowSystem {
    let m = times[0].0.len();
    let slices = times
        .iter()
        .map(|(b, stit, agt, atoms)| {
            let boxp = Partition::from_labels(b);
            Slice {
                ought: vec![boxp.to_relation(); agents],
                stit: stit.iter().map(|l| Partition::from_labels(l)).collect(),
                agt: Partition::from_labels(agt),
                valuation: atoms
                    .iter()
                    .map(|(p, hs)| {
                        let mut set = FixedBitSet::with_capacity(m);
                        for &h in *hs {
                            set.insert(h);
                        }
                        (p.to_string(), set)
                    })
                    .collect(),
                boxp,
            }
        })
        .collect();
    WindowSystem::new(agents, (0..m).map(|h| format!("h{h}")).collect(), slices).unwrap()
}

/// Two agents at one moment with a 2x2 action grid whose last joint cell
/// is split by the group relation; the histories separate afterwards.
fn split_grid() -> WindowSystem {
    let discrete: &[usize] = &[0, 1, 2, 3, 4];
    window(
        2,
        &[
            (
                &[0, 0, 0, 0, 0],
                vec![&[0, 0, 1, 1, 1], &[0, 1, 0, 1, 1]],
                &[0, 1, 2, 3, 4],
                vec![("p", &[3])],
            ),
            (discrete, vec![discrete, discrete], discrete, vec![("q", &[4])]),
        ],
    )
}

#[test]
fn singleton_filtrates_to_itself() {
    let m = Premodel::singleton(2, &["p"]);
    let out = filtrate(&m, &closure(&f("O1 p & X p"))).unwrap();
    assert_eq!(out.model.len(), 1);
    assert!(out.model.audit().is_clean());
    assert!(out.model.eval(0, &f("p & box p")).unwrap());
}

/// Brute-force version of the merging relation.
fn naive_equivalent(m: &Premodel, sigma: &ClosureSet, a: usize, b: usize) -> bool {
    let truth = |s: usize| -> Vec<bool> { sigma.iter().map(|g| m.eval(s, g).unwrap()).collect() };
    let around = |s: usize| -> Vec<Vec<bool>> {
        let mut v: Vec<Vec<bool>> = (0..m.len())
            .filter(|&x| m.box_partition().same(s, x))
            .map(truth)
            .collect();
        v.sort();
        v.dedup();
        v
    };
    truth(a) == truth(b) && around(a) == around(b)
}

#[test]
fn equal_profiles_in_one_moment_merge() {
    let n = 3;
    let mut p = StateSet::with_capacity(n);
    p.insert(0);
    p.insert(1);
    let m = Premodel::new(PremodelParts {
        names: vec!["a".into(), "b".into(), "c".into()],
        agents: 1,
        boxp: Partition::from_blocks(n, &[vec![0, 1], vec![2]]).unwrap(),
        stit: vec![Partition::discrete(n)],
        agt: Partition::discrete(n),
        ought: vec![Relation::from_pairs(n, &[(0, 0), (0, 1), (1, 0), (1, 1), (2, 2)]).unwrap()],
        next: Relation::from_pairs(n, &[(0, 2), (1, 2), (2, 2)]).unwrap(),
        valuation: BTreeMap::from([("p".to_string(), p)]),
    })
    .unwrap();
    assert!(m.audit().is_clean());
    let sigma = closure(&f("box p & X ~p"));
    let out = filtrate(&m, &sigma).unwrap();
    assert_eq!(out.model.len(), 2);
    assert!(out.classes.same(0, 1));
    for a in 0..n {
        for b in 0..n {
            assert_eq!(out.classes.same(a, b), naive_equivalent(&m, &sigma, a, b));
        }
    }
    assert!(commutes(&m, &out.classes));
    assert!(out.model.audit().is_clean());
}

#[test]
fn filtration_of_random_premodels_is_a_premodel() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let sigma = closure(&f("O1 [2] p -> X U(q, dia [1] p)"));
    for _ in 0..30 {
        let m = random_premodel(&mut rng, &RandomPremodel::new(6, 2, &["p", "q"]));
        let out = filtrate(&m, &sigma).unwrap();
        assert!(out.model.audit().is_clean(), "{}", out.model.audit());
        assert!(commutes(&m, &out.classes));
        for a in 0..m.len() {
            for b in 0..m.len() {
                assert_eq!(out.classes.same(a, b), naive_equivalent(&m, &sigma, a, b));
            }
        }
    }
}

#[test]
fn singleton_unravels_to_one_constant_history() {
    let m = Premodel::singleton(2, &["p"]);
    let sigma = closure(&f("G p & O1 [1] p"));
    let sys = unravel(&m, &sigma, &[0], UnravelOptions::default()).unwrap();
    assert_eq!(sys.len(), 1);
    for g in &sigma {
        for t in 0..=sys.horizon() {
            assert_eq!(sys.eval_at(0, t, g).unwrap(), m.eval(0, g).unwrap(), "{g}");
        }
    }
}

fn assert_transfer(m: &Premodel, sigma: &ClosureSet, horizon: usize) {
    let seeds: Vec<usize> = (0..m.len()).collect();
    let sys = unravel(m, sigma, &seeds, UnravelOptions::with_horizon(horizon)).unwrap();
    let report = sys.audit_window();
    assert!(report.is_clean(), "{report}");
    for g in sigma {
        for h in 0..sys.len() {
            for t in 0..=horizon {
                assert_eq!(
                    sys.eval_at(h, t, g).unwrap(),
                    m.eval(sys.state(h, t), g).unwrap(),
                    "{g} at h{h}, t{t}"
                );
            }
        }
    }
}

#[test]
fn unraveling_transfers_the_closure() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let sigma = closure(&f("U(p, q) & dia [1] X p & O2 q"));
    let mut checked = 0;
    while checked < 25 {
        let m = random_premodel(&mut rng, &RandomPremodel::new(4, 2, &["p", "q"]).functional());
        assert!(m.check_side_conditions(&sigma).unwrap().is_empty());
        assert_transfer(&m, &sigma, 2);
        checked += 1;
    }
}

#[test]
fn branching_premodels_with_side_conditions_transfer() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let sigma = closure(&f("U(p, q) & [*] p"));
    let mut checked = 0;
    while checked < 15 {
        let m = random_premodel(&mut rng, &RandomPremodel::new(4, 2, &["p", "q"]));
        if m.check_side_conditions(&sigma).unwrap().is_empty() {
            assert_transfer(&m, &sigma, 2);
            checked += 1;
        }
    }
}

#[test]
fn unravel_budget_is_enforced() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let m = random_premodel(&mut rng, &RandomPremodel::new(6, 2, &["p"]).functional());
    let opts = UnravelOptions {
        horizon: 4,
        margin: Some(0),
        history_budget: 1,
    };
    let seeds: Vec<usize> = (0..m.len()).collect();
    assert!(matches!(
        unravel(&m, &closure(&f("p")), &seeds, opts),
        Err(TransformError::Budget { .. })
    ));
}

#[test]
fn lookahead_counts_steps_to_relational_operators() {
    assert_eq!(relational_lookahead(&f("X X p")), None);
    assert_eq!(relational_lookahead(&f("box p")), Some(0));
    assert_eq!(relational_lookahead(&f("X (p & X O1 q)")), Some(2));
}

#[test]
fn identity_is_a_pmorphism() {
    let w = split_grid();
    let id: Vec<usize> = (0..w.len()).collect();
    let witness = check_pmorphism(&w, &w, &id).unwrap();
    assert!(witness.surjective);
    assert_eq!(witness.checked_ops.len(), 2 * 2 + 2);
}

#[test]
fn collapsing_separate_moments_breaks_the_forward_condition() {
    let w = window(1, &[(&[0, 1, 1], vec![&[0, 1, 1]], &[0, 1, 1], vec![])]);
    match check_pmorphism(&w, &w, &[0, 0, 2]) {
        Err(TransformError::PMorphism(failures)) => {
            let first = &failures[0];
            assert_eq!(first.tag, RelTag::Box);
            assert_eq!(first.direction, Direction::Forward);
            assert_eq!((first.source, first.other), (1, 2));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn split_group_cell_becomes_additive() {
    let w = split_grid();
    assert!(w.audit(false).is_clean());
    assert!(w.audit(true).has(Condition::D3));
    let out = to_additive(&w, DEFAULT_REFINEMENT_BUDGET).unwrap();
    let report = out.system.audit(true);
    assert!(report.is_clean(), "{report}");
    let witness = check_pmorphism(&out.system, &w, &out.projection).unwrap();
    assert!(witness.surjective);
    let formulas: Vec<Formula> = ["[*] p", "[1] p | [2] p", "dia ([1] ~p & [2] ~p)", "X q", "O1 [1] p", "<*> X q"]
        .iter()
        .map(|s| f(s))
        .collect();
    assert!(check_transfer(&out.system, &w, &out.projection, &formulas)
        .unwrap()
        .is_empty());
}

#[test]
fn additive_input_stays_additive() {
    let w = window(
        2,
        &[
            (&[0, 0, 0, 0], vec![&[0, 0, 1, 1], &[0, 1, 0, 1]], &[0, 1, 2, 3], vec![("p", &[0])]),
            (&[0, 1, 2, 3], vec![&[0, 1, 2, 3], &[0, 1, 2, 3]], &[0, 1, 2, 3], vec![]),
        ],
    );
    assert!(w.audit(true).is_clean());
    let out = to_additive(&w, DEFAULT_REFINEMENT_BUDGET).unwrap();
    assert!(out.system.audit(true).is_clean());
    assert!(check_pmorphism(&out.system, &w, &out.projection).unwrap().surjective);
}

#[test]
fn single_agent_strict_super_additivity_is_rejected() {
    let w = window(1, &[(&[0, 0], vec![&[0, 0]], &[0, 1], vec![])]);
    assert!(matches!(
        to_additive(&w, DEFAULT_REFINEMENT_BUDGET),
        Err(TransformError::SingleAgentSuperAdditive { time: 0, .. })
    ));
}

#[test]
fn refinement_budget_is_enforced() {
    assert!(matches!(
        to_additive(&split_grid(), 10),
        Err(TransformError::Budget { .. })
    ));
}
