use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::relation::{Partition, Relation, StateSet};

use super::{Premodel, PremodelParts};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NextShape {
    /// Random serial successor sets, repaired until (D4*) holds.
    Branching,
    /// Every state has exactly one successor.
    Functional,
}

/// Parameters for [`random_premodel`].
#[derive(Debug, Clone)]
pub struct RandomPremodel {
    pub states: usize,
    pub agents: usize,
    pub atoms: Vec<String>,
    pub next: NextShape,
    /// Upper bound on the number of actions per agent and moment.
    pub max_actions: usize,
    /// Probability that a joint-action cell is split by the group relation.
    pub split_agt: f64,
}

impl RandomPremodel {
    pub fn new(states: usize, agents: usize, atoms: &[&str]) -> RandomPremodel {
        RandomPremodel {
            states,
            agents,
            atoms: atoms.iter().map(|s| s.to_string()).collect(),
            next: NextShape::Branching,
            max_actions: 2,
            split_agt: 0.3,
        }
    }

    pub fn functional(mut self) -> RandomPremodel {
        self.next = NextShape::Functional;
        self
    }
}

/// A random premodel satisfying every structural condition.
///
/// Choice structure is built from joint action profiles, so (D2) and (D3*)
/// hold by construction, and obligations pick a nonempty set of allowed
/// actions per moment, so (D5) to (D8) hold too. Branching temporal
/// relations are repaired edge by edge until (D4*) holds. Functional ones
/// map each group-choice cell onto a union of whole box blocks, which is
/// exactly (D4*) for functions; choice structures that admit no such map
/// are redrawn.
pub fn random_premodel<R: Rng + ?Sized>(rng: &mut R, cfg: &RandomPremodel) -> Premodel {
    assert!(cfg.states >= 1 && cfg.agents >= 1);
    loop {
        let choice = random_choice_structure(rng, cfg);
        let next = match cfg.next {
            NextShape::Branching => Some(branching_next(rng, &choice)),
            NextShape::Functional => functional_next(rng, &choice),
        };
        if let Some(next) = next {
            let n = cfg.states;
            let mut valuation = BTreeMap::new();
            for p in &cfg.atoms {
                let mut set = StateSet::with_capacity(n);
                for s in 0..n {
                    if rng.gen_bool(0.5) {
                        set.insert(s);
                    }
                }
                valuation.insert(p.clone(), set);
            }
            return Premodel::new(PremodelParts {
                names: (0..n).map(|s| format!("s{s}")).collect(),
                agents: cfg.agents,
                boxp: choice.boxp,
                stit: choice.stit,
                agt: choice.agt,
                ought: choice.ought,
                next,
                valuation,
            })
            .expect("generator produces well-shaped parts");
        }
    }
}

struct Choice {
    boxp: Partition,
    stit: Vec<Partition>,
    agt: Partition,
    ought: Vec<Relation>,
}

fn random_choice_structure<R: Rng + ?Sized>(rng: &mut R, cfg: &RandomPremodel) -> Choice {
    let n = cfg.states;
    let k = rng.gen_range(1..=n);
    let box_labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
    let boxp = Partition::from_labels(&box_labels);

    // action[s][i] is agent i's action at s, local to the box block.
    let mut action = vec![vec![0usize; cfg.agents]; n];
    let mut extra = vec![0usize; n];
    let mut allowed: Vec<Vec<Vec<bool>>> = Vec::new();
    for block in boxp.blocks() {
        let m = block.len();
        let mut counts: Vec<usize> = (0..cfg.agents)
            .map(|_| rng.gen_range(1..=cfg.max_actions.max(1)))
            .collect();
        while counts.iter().product::<usize>() > m {
            let big: Vec<usize> = (0..counts.len()).filter(|&i| counts[i] > 1).collect();
            let i = *big.choose(rng).expect("product above 1 has a factor above 1");
            counts[i] -= 1;
        }
        let mut profiles = Vec::new();
        let mut pick = vec![0usize; cfg.agents];
        loop {
            profiles.push(pick.clone());
            if !crate::premodel::check::advance(&mut pick, &counts) {
                break;
            }
        }
        profiles.shuffle(rng);
        let mut members = block.clone();
        members.shuffle(rng);
        for (j, &s) in members.iter().enumerate() {
            action[s] = if j < profiles.len() {
                profiles[j].clone()
            } else {
                profiles.choose(rng).expect("at least one profile").clone()
            };
            if rng.gen_bool(cfg.split_agt) {
                extra[s] = rng.gen_range(0..2);
            }
        }
        allowed.push(
            counts
                .iter()
                .map(|&c| {
                    let mut ok: Vec<bool> = (0..c).map(|_| rng.gen_bool(0.5)).collect();
                    if !ok.iter().any(|&b| b) {
                        ok[rng.gen_range(0..c)] = true;
                    }
                    ok
                })
                .collect(),
        );
    }
    let stit: Vec<Partition> = (0..cfg.agents)
        .map(|i| {
            let labels: Vec<(usize, usize)> =
                (0..n).map(|s| (boxp.block_of(s), action[s][i])).collect();
            Partition::from_labels(&labels)
        })
        .collect();
    let agt_labels: Vec<(usize, Vec<usize>, usize)> = (0..n)
        .map(|s| (boxp.block_of(s), action[s].clone(), extra[s]))
        .collect();
    let agt = Partition::from_labels(&agt_labels);
    let ought = (0..cfg.agents)
        .map(|i| {
            let mut r = Relation::empty(n);
            for x in 0..n {
                let b = boxp.block_of(x);
                for &y in boxp.block(b) {
                    if allowed[b][i][action[y][i]] {
                        r.insert(x, y);
                    }
                }
            }
            r
        })
        .collect();
    Choice {
        boxp,
        stit,
        agt,
        ought,
    }
}

fn branching_next<R: Rng + ?Sized>(rng: &mut R, c: &Choice) -> Relation {
    let n = c.boxp.states();
    let mut next = Relation::empty(n);
    for x in 0..n {
        let fanout = if rng.gen_bool(0.7) { 1 } else { 2 };
        for _ in 0..fanout {
            next.insert(x, rng.gen_range(0..n));
        }
    }
    // Repair (D4*): for x -> z with z box y, some group-mate of x must reach y.
    loop {
        let mut repaired = false;
        for x in 0..n {
            let mut reach = StateSet::with_capacity(n);
            for &m in c.agt.class(x) {
                reach.union_with(next.successors(m));
            }
            let mut need = StateSet::with_capacity(n);
            for z in next.successors(x).ones() {
                for &y in c.boxp.class(z) {
                    need.insert(y);
                }
            }
            need.difference_with(&reach);
            for y in need.ones().collect::<Vec<_>>() {
                let mate = *c.agt.class(x).choose(rng).expect("classes are nonempty");
                next.insert(mate, y);
                repaired = true;
            }
        }
        if !repaired {
            return next;
        }
    }
}

fn functional_next<R: Rng + ?Sized>(rng: &mut R, c: &Choice) -> Option<Relation> {
    let n = c.boxp.states();
    let mut next = Relation::empty(n);
    for cell in c.agt.blocks() {
        // Random subset of box blocks whose sizes fit in the cell.
        let mut order: Vec<usize> = (0..c.boxp.len()).collect();
        order.shuffle(rng);
        let mut targets: Vec<usize> = Vec::new();
        let mut room = cell.len();
        for b in order {
            let size = c.boxp.block(b).len();
            if size <= room && (targets.is_empty() || rng.gen_bool(0.5)) {
                targets.extend_from_slice(c.boxp.block(b));
                room -= size;
            }
        }
        if targets.is_empty() {
            return None;
        }
        let mut sources = cell.clone();
        sources.shuffle(rng);
        for (j, &x) in sources.iter().enumerate() {
            let y = if j < targets.len() {
                targets[j]
            } else {
                *targets.choose(rng).expect("nonempty")
            };
            next.insert(x, y);
        }
    }
    Some(next)
}
