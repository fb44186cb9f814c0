use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::audit::Condition;
use crate::premodel::{random_premodel, PremodelParts, RandomPremodel};
use crate::relation::{Relation, StateSet};
use crate::syntax::parse;

fn f(s: &str) -> Formula {
    parse(s, 2).unwrap()
}

fn set(n: usize, members: &[usize]) -> StateSet {
    let mut s = StateSet::with_capacity(n);
    for &m in members {
        s.insert(m);
    }
    s
}

/// r branches to a or b, which share a moment but differ in agent 1's
/// action; a and b then settle in c and d.
fn fork() -> Premodel {
    let n = 5;
    let (r, a, b, c, d) = (0, 1, 2, 3, 4);
    Premodel::new(PremodelParts {
        names: ["r", "a", "b", "c", "d"].iter().map(|s| s.to_string()).collect(),
        agents: 1,
        boxp: Partition::from_blocks(n, &[vec![r], vec![a, b], vec![c], vec![d]]).unwrap(),
        stit: vec![Partition::discrete(n)],
        agt: Partition::discrete(n),
        ought: vec![Relation::from_pairs(n, &[(r, r), (a, a), (b, a), (c, c), (d, d)]).unwrap()],
        next: Relation::from_pairs(n, &[(r, a), (r, b), (a, c), (b, d), (c, c), (d, d)]).unwrap(),
        valuation: BTreeMap::from([("p".to_string(), set(n, &[a]))]),
    })
    .unwrap()
}

fn fork_system() -> LassoSystem {
    let histories = vec![
        LassoHistory::new(vec![0, 1], vec![3]).unwrap(),
        LassoHistory::new(vec![0, 2], vec![4]).unwrap(),
    ];
    LassoSystem::new(fork(), histories, 4).unwrap()
}

#[test]
fn constant_loop_validates_always() {
    let sys = LassoSystem::new(
        Premodel::singleton(1, &["p"]),
        vec![LassoHistory::new(vec![0], vec![0]).unwrap()],
        3,
    )
    .unwrap();
    assert!(sys.eval_at(0, 0, &f("G p")).unwrap());
    assert!(sys.eval_at(0, 1000, &f("G p")).unwrap());
}

#[test]
fn eventually_on_a_stem_and_loop() {
    let n = 2;
    let m = Premodel::new(PremodelParts {
        names: vec!["s0".into(), "s1".into()],
        agents: 1,
        boxp: Partition::discrete(n),
        stit: vec![Partition::discrete(n)],
        agt: Partition::discrete(n),
        ought: vec![Relation::identity(n)],
        next: Relation::from_pairs(n, &[(0, 1), (1, 1)]).unwrap(),
        valuation: BTreeMap::from([("p".to_string(), set(n, &[1]))]),
    })
    .unwrap();
    let sys = LassoSystem::new(m, vec![LassoHistory::new(vec![0], vec![1]).unwrap()], 2).unwrap();
    assert!(sys.eval_at(0, 0, &f("U(p, true)")).unwrap());
    assert!(!sys.eval_at(0, 0, &f("p")).unwrap());
    assert!(sys.eval_at(0, 0, &f("X G p")).unwrap());
}

#[test]
fn forked_histories_share_a_moment_after_the_split_point() {
    let sys = fork_system();
    assert!(sys.box_related(0, 1, 0));
    assert!(sys.box_related(0, 1, 1));
    assert!(!sys.box_related(0, 1, 2));
    assert!(!sys.related(RelTag::Stit(AgentId::from_slot(0)), 0, 1, 1));

    assert!(sys.eval_at(1, 1, &f("dia [1] p")).unwrap());
    assert!(!sys.eval_at(1, 1, &f("[1] p")).unwrap());
    assert!(!sys.eval_at(0, 0, &f("dia [1] p")).unwrap());
    assert!(sys.eval_at(1, 1, &f("O1 p")).unwrap());
    assert!(sys.eval_at(0, 0, &f("X p")).unwrap());
    assert!(!sys.eval_at(1, 0, &f("X p")).unwrap());
    assert!(sys.eval_at(0, 0, &f("dia X p & dia X ~p")).unwrap());
}

#[test]
fn relational_queries_beyond_the_horizon_are_refused() {
    let sys = fork_system();
    assert!(matches!(
        sys.eval_at(0, 5, &f("box p")),
        Err(SystemError::BeyondHorizon { t: 5, horizon: 4 })
    ));
    assert!(!sys.eval_at(0, 5, &f("F p")).unwrap());
}

#[test]
fn unrolled_until_agrees_with_the_period_analysis() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let alpha = f("p");
    let beta = f("q");
    let u = Formula::until(alpha.clone(), beta.clone());
    for _ in 0..100 {
        let m = random_premodel(&mut rng, &RandomPremodel::new(5, 1, &["p", "q"]));
        let walk = |rng: &mut ChaCha8Rng, start: usize, len: usize| {
            let mut seq = vec![start];
            while seq.len() < len {
                let succ: Vec<usize> = m.next().successors(*seq.last().unwrap()).ones().collect();
                seq.push(succ[rng.gen_range(0..succ.len())]);
            }
            seq
        };
        // A random walk until it revisits a state gives a lasso.
        let start = rng.gen_range(0..m.len());
        let mut seq = walk(&mut rng, start, 1);
        loop {
            let next = walk(&mut rng, *seq.last().unwrap(), 2)[1];
            if let Some(k) = seq.iter().position(|&s| s == next) {
                let (stem, cycle) = if k == 0 {
                    let mut rotated = seq[1..].to_vec();
                    rotated.push(seq[0]);
                    (vec![seq[0]], rotated)
                } else {
                    (seq[..k].to_vec(), seq[k..].to_vec())
                };
                let h = LassoHistory::new(stem, cycle).unwrap();
                let sys = LassoSystem::new(m.clone(), vec![h.clone()], 0).unwrap();
                let bound = h.stem().len() + 2 * h.cycle().len();
                for t in 0..bound {
                    let unrolled = (t..t + bound).find_map(|k| {
                        let s = h.state_at(k);
                        if m.eval(s, &alpha).unwrap() {
                            Some(true)
                        } else if !m.eval(s, &beta).unwrap() {
                            Some(false)
                        } else {
                            None
                        }
                    });
                    assert_eq!(sys.eval_at(0, t, &u).unwrap(), unrolled == Some(true));
                }
                break;
            }
            seq.push(next);
        }
    }
}

#[test]
fn window_audit_of_an_induced_system() {
    let sys = fork_system();
    assert!(sys.audit_window().is_clean(), "{}", sys.audit_window());
    assert!(sys.window(4).audit(true).is_clean());
}

#[test]
fn merged_moment_without_a_shared_group_action_is_d4() {
    let two = || Partition::trivial(2);
    let slice = |agt: Partition| Slice {
        boxp: two(),
        stit: vec![two()],
        agt,
        ought: vec![two().to_relation()],
        valuation: BTreeMap::new(),
    };
    let w = WindowSystem::new(
        1,
        vec!["h1".into(), "h2".into()],
        vec![slice(Partition::discrete(2)), slice(two())],
    )
    .unwrap();
    let report = w.audit(false);
    assert_eq!(report.conditions(), vec![Condition::D4]);
    assert_eq!(report.violations[0].time, Some(0));
    assert_eq!(report.violations[0].witness, vec![0, 1]);
    // The group relation at time 0 is finer than the meet.
    assert!(w.audit(true).has(Condition::D3));
}

#[test]
fn window_evaluation_is_three_valued() {
    let w = fork_system().window(2);
    assert_eq!(w.eval_window(0, 0, &f("X p")).unwrap(), Some(true));
    assert_eq!(w.eval_window(0, 2, &f("X p")).unwrap(), None);
    assert_eq!(w.eval_window(0, 0, &f("F p")).unwrap(), Some(true));
    assert_eq!(w.eval_window(1, 0, &f("F p")).unwrap(), None);
    assert_eq!(w.eval_window(1, 0, &f("G ~p")).unwrap(), None);
    assert_eq!(w.eval_window(1, 1, &f("dia [1] p")).unwrap(), Some(true));
}

#[test]
fn lasso_and_window_files_roundtrip() {
    let sys = fork_system();
    let again = LassoSystem::from_json(&sys.to_json(), None, false).unwrap();
    assert_eq!(again.histories(), sys.histories());
    assert_eq!(again.horizon(), 4);
    let w = sys.window(3);
    assert_eq!(WindowSystem::from_json(&w.to_json()).unwrap(), w);
}

#[test]
fn lasso_files_can_reference_a_premodel_path() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("fork.json"), fork().to_json()).unwrap();
    let text = r#"{"base": "fork.json", "histories": [{"stem": ["r", "a"], "loop": ["c"]}], "horizon": 2}"#;
    let sys = LassoSystem::from_json(text, Some(dir.path()), false).unwrap();
    assert_eq!(sys.len(), 1);
    let bad = text.replace(r#""loop": ["c"]"#, r#""loop": ["d"]"#);
    assert!(matches!(
        LassoSystem::from_json(&bad, Some(dir.path()), false),
        Err(SystemError::NotAnEdge { .. })
    ));
}
