use std::collections::{HashMap, VecDeque};

use crate::premodel::Premodel;
use crate::relation::StateSet;
use crate::syntax::{ClosureSet, Dag, Formula};
use crate::system::LassoHistory;

use super::TransformError;

/// Distance tables for the until formulas of a closure set, in the
/// closure's syntactic order.
pub(crate) struct Obligations {
    formulas: Vec<Formula>,
    holds: Vec<StateSet>,
    alpha: Vec<StateSet>,
    /// Steps to the nearest `alpha` state through `beta` states.
    distance: Vec<Vec<Option<usize>>>,
}

impl Obligations {
    pub(crate) fn new(m: &Premodel, sigma: &ClosureSet) -> Result<Obligations, TransformError> {
        let untils: Vec<(Formula, Formula, Formula)> = sigma
            .untils()
            .map(|(u, a, b)| (u.clone(), a.clone(), b.clone()))
            .collect();
        let dag = Dag::of(untils.iter().flat_map(|(u, a, b)| [u, a, b]));
        let ext = m.extensions(&dag)?;
        let get = |f: &Formula| ext[dag.id(f).expect("interned")].clone();
        let mut out = Obligations {
            formulas: Vec::new(),
            holds: Vec::new(),
            alpha: Vec::new(),
            distance: Vec::new(),
        };
        for (u, a, b) in &untils {
            let (alpha, beta) = (get(a), get(b));
            let mut distance = vec![None; m.len()];
            let mut queue: VecDeque<usize> = alpha.ones().collect();
            for s in alpha.ones() {
                distance[s] = Some(0);
            }
            while let Some(v) = queue.pop_front() {
                let d = distance[v].expect("queued states have a distance");
                for p in m.prev().successors(v).ones() {
                    if beta.contains(p) && distance[p].is_none() {
                        distance[p] = Some(d + 1);
                        queue.push_back(p);
                    }
                }
            }
            out.formulas.push(u.clone());
            out.holds.push(get(u));
            out.alpha.push(alpha);
            out.distance.push(distance);
        }
        Ok(out)
    }

    /// Drops fulfilled obligations at `s`, queues the newly true ones and
    /// checks that every pending obligation still holds.
    fn visit(&self, queue: &mut Vec<usize>, s: usize) -> Result<(), TransformError> {
        queue.retain(|&k| !self.alpha[k].contains(s));
        if let Some(&k) = queue.iter().find(|&&k| !self.holds[k].contains(s)) {
            return Err(TransformError::Unfulfillable {
                state: s,
                formula: self.formulas[k].clone(),
            });
        }
        for k in 0..self.formulas.len() {
            if self.holds[k].contains(s) && !self.alpha[k].contains(s) && !queue.contains(&k) {
                queue.push(k);
            }
        }
        Ok(())
    }

    /// The successor that brings the oldest obligation closest to fulfilment.
    fn step(&self, m: &Premodel, queue: &[usize], s: usize) -> usize {
        let succ = m.next().successors(s);
        match queue.first() {
            Some(&k) => succ
                .ones()
                .filter_map(|v| self.distance[k][v].map(|d| (d, v)))
                .min()
                .map(|(_, v)| v)
                .unwrap_or_else(|| succ.minimum().expect("next is serial")),
            None => succ.minimum().expect("next is serial"),
        }
    }
}

/// An acceptable lasso from `start`: every until formula of `sigma` true at
/// a point is fulfilled later on the path. Pending formulas are served
/// oldest first, and the loop closes when a state recurs with the same
/// pending queue.
pub fn make_acceptable(m: &Premodel, start: usize, sigma: &ClosureSet) -> Result<LassoHistory, TransformError> {
    make_acceptable_from_prefix(m, &[start], sigma)
}

/// Like [`make_acceptable`], but the path first follows `prefix`.
pub fn make_acceptable_from_prefix(
    m: &Premodel,
    prefix: &[usize],
    sigma: &ClosureSet,
) -> Result<LassoHistory, TransformError> {
    let obligations = Obligations::new(m, sigma)?;
    extend(m, &obligations, prefix)
}

pub(crate) fn extend(m: &Premodel, ob: &Obligations, prefix: &[usize]) -> Result<LassoHistory, TransformError> {
    let (&first, rest) = prefix
        .split_first()
        .ok_or_else(|| TransformError::Shape("a path prefix needs a state".into()))?;
    if let Some(&bad) = prefix.iter().find(|&&s| s >= m.len()) {
        return Err(TransformError::Shape(format!("state {bad} is out of range")));
    }
    let mut path = vec![first];
    let mut queue = Vec::new();
    ob.visit(&mut queue, first)?;
    for &s in rest {
        let last = *path.last().expect("nonempty");
        if !m.next().contains(last, s) {
            return Err(TransformError::Shape(format!(
                "{} -> {} is not a temporal edge",
                m.name(last),
                m.name(s)
            )));
        }
        path.push(s);
        ob.visit(&mut queue, s)?;
    }
    let mut seen: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
    seen.insert((*path.last().expect("nonempty"), queue.clone()), path.len() - 1);
    loop {
        let s = ob.step(m, &queue, *path.last().expect("nonempty"));
        ob.visit(&mut queue, s)?;
        if let Some(&k) = seen.get(&(s, queue.clone())) {
            if k == 0 {
                // The loop starts at the first state: rotate it by one.
                let mut cycle = path[1..].to_vec();
                cycle.push(path[0]);
                return Ok(LassoHistory::new(vec![path[0]], cycle).expect("nonempty parts"));
            }
            let (stem, cycle) = path.split_at(k);
            return Ok(LassoHistory::new(stem.to_vec(), cycle.to_vec()).expect("nonempty parts"));
        }
        path.push(s);
        seen.insert((s, queue.clone()), path.len() - 1);
    }
}
