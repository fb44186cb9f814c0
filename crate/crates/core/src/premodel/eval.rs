use serde::Serialize;

use crate::relation::{Partition, Relation, StateSet};
use crate::syntax::{ClosureSet, Dag, Formula, Node};

use super::{ModelError, Premodel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SideKind {
    XFunc,
    UFix,
}

/// A state where a required biconditional fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SideFailure {
    pub kind: SideKind,
    pub state: usize,
    pub instance: Formula,
}

impl Premodel {
    fn check_agents(&self, max_agent: usize) -> Result<(), ModelError> {
        if max_agent > self.agents {
            Err(ModelError::AgentOutOfRange {
                agent: max_agent,
                agents: self.agents,
            })
        } else {
            Ok(())
        }
    }

    /// Extensions of every node of `dag`, indexed like the dag.
    pub fn extensions(&self, dag: &Dag) -> Result<Vec<StateSet>, ModelError> {
        self.check_agents(dag.max_agent())?;
        let n = self.len();
        let mut ext: Vec<StateSet> = Vec::with_capacity(dag.len());
        for node in dag.nodes() {
            let set = match node {
                Node::Atom(p) => self.atom_states(p),
                Node::Top => full(n),
                Node::Bottom => StateSet::with_capacity(n),
                Node::Not(a) => complement(&ext[*a]),
                Node::And(a, b) => {
                    let mut s = ext[*a].clone();
                    s.intersect_with(&ext[*b]);
                    s
                }
                Node::Nec(a) => boxed(&self.boxp, &ext[*a]),
                Node::Stit(i, a) => boxed(&self.stit[i.slot()], &ext[*a]),
                Node::GroupStit(a) => boxed(&self.agt, &ext[*a]),
                Node::Ought(i, a) => universal(&self.ought[i.slot()], &ext[*a]),
                Node::Next(a) => universal(&self.next, &ext[*a]),
                Node::Until(a, b) => self.until(&ext[*a], &ext[*b]),
            };
            ext.push(set);
        }
        Ok(ext)
    }

    /// Least set containing `alpha` and every `beta` state with a successor in it.
    pub fn until(&self, alpha: &StateSet, beta: &StateSet) -> StateSet {
        let mut set = alpha.clone();
        let mut stack: Vec<usize> = alpha.ones().collect();
        while let Some(v) = stack.pop() {
            for u in self.prev.successors(v).ones() {
                if beta.contains(u) && !set.contains(u) {
                    set.insert(u);
                    stack.push(u);
                }
            }
        }
        set
    }

    pub fn extension(&self, f: &Formula) -> Result<StateSet, ModelError> {
        let mut dag = Dag::new();
        let root = dag.intern(f);
        Ok(self.extensions(&dag)?.swap_remove(root))
    }

    pub fn eval(&self, s: usize, f: &Formula) -> Result<bool, ModelError> {
        Ok(self.extension(f)?.contains(s))
    }

    /// True at every state.
    pub fn validates(&self, f: &Formula) -> Result<bool, ModelError> {
        Ok(self.extension(f)?.count_ones(..) == self.len())
    }

    /// Every state where an (XFunc) instance for some `X f` in `sigma`, or an
    /// (UFix) instance for some `U(a,b)` in `sigma`, is false.
    pub fn check_side_conditions(&self, sigma: &ClosureSet) -> Result<Vec<SideFailure>, ModelError> {
        let mut instances = Vec::new();
        for (_, body) in sigma.nexts() {
            instances.push((SideKind::XFunc, xfunc_instance(body)));
        }
        for (u, a, b) in sigma.untils() {
            instances.push((SideKind::UFix, ufix_instance(u, a, b)));
        }
        let dag = Dag::of(instances.iter().map(|(_, f)| f));
        let ext = self.extensions(&dag)?;
        let mut out = Vec::new();
        for (kind, f) in instances {
            let holds = &ext[dag.id(&f).expect("interned")];
            for s in complement(holds).ones() {
                out.push(SideFailure {
                    kind,
                    state: s,
                    instance: f.clone(),
                });
            }
        }
        Ok(out)
    }
}

/// `X f <-> ~X ~f`.
pub fn xfunc_instance(body: &Formula) -> Formula {
    Formula::iff(
        Formula::next(body.clone()),
        Formula::not(Formula::next(Formula::not(body.clone()))),
    )
}

/// `U(a,b) <-> (a | (b & X U(a,b)))`.
pub fn ufix_instance(u: &Formula, a: &Formula, b: &Formula) -> Formula {
    Formula::iff(
        u.clone(),
        Formula::or(a.clone(), Formula::and(b.clone(), Formula::next(u.clone()))),
    )
}

fn full(n: usize) -> StateSet {
    let mut s = StateSet::with_capacity(n);
    s.insert_range(..);
    s
}

fn complement(set: &StateSet) -> StateSet {
    let mut s = set.clone();
    s.toggle_range(..);
    s
}

fn boxed(p: &Partition, inner: &StateSet) -> StateSet {
    let mut out = StateSet::with_capacity(p.states());
    for block in p.blocks() {
        if block.iter().all(|&s| inner.contains(s)) {
            for &s in block {
                out.insert(s);
            }
        }
    }
    out
}

fn universal(r: &Relation, inner: &StateSet) -> StateSet {
    let mut out = StateSet::with_capacity(r.states());
    for s in 0..r.states() {
        if r.successors(s).is_subset(inner) {
            out.insert(s);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::premodel::PremodelParts;
    use crate::syntax::{closure, parse};
    use std::collections::BTreeMap;

    fn set(n: usize, members: &[usize]) -> StateSet {
        let mut s = StateSet::with_capacity(n);
        for &m in members {
            s.insert(m);
        }
        s
    }

    /// Temporal-only model: singleton blocks everywhere.
    fn chain(n: usize, next: &[(usize, usize)], atoms: &[(&str, &[usize])]) -> Premodel {
        Premodel::new(PremodelParts {
            names: (0..n).map(|s| format!("s{s}")).collect(),
            agents: 1,
            boxp: Partition::discrete(n),
            stit: vec![Partition::discrete(n)],
            agt: Partition::discrete(n),
            ought: vec![Relation::identity(n)],
            next: Relation::from_pairs(n, next).unwrap(),
            valuation: atoms
                .iter()
                .map(|(p, s)| (p.to_string(), set(n, s)))
                .collect::<BTreeMap<_, _>>(),
        })
        .unwrap()
    }

    fn f(s: &str) -> Formula {
        parse(s, 2).unwrap()
    }

    #[test]
    fn top_holds_everywhere() {
        let m = chain(3, &[(0, 1), (1, 2), (2, 2)], &[]);
        assert!(m.validates(&Formula::Top).unwrap());
        assert!(!m.eval(0, &f("nowhere")).unwrap());
    }

    #[test]
    fn until_on_a_chain() {
        let m = chain(3, &[(0, 1), (1, 2), (2, 2)], &[("p", &[2]), ("q", &[0, 1])]);
        assert!(m.audit().is_clean());
        assert!(m.eval(0, &f("U(p, q)")).unwrap());
        assert!(!m.eval(0, &f("U(p, ~q)")).unwrap());
        assert!(m.eval(2, &f("U(p, ~q)")).unwrap());
    }

    #[test]
    fn branching_next_breaks_xfunc() {
        let m = chain(3, &[(0, 1), (0, 2), (1, 1), (2, 2)], &[("p", &[1])]);
        assert!(m.audit().is_clean());
        assert!(!m.eval(0, &f("X p")).unwrap());
        assert!(m.eval(0, &f("~X ~p")).unwrap());
        let failures = m.check_side_conditions(&closure(&f("X p"))).unwrap();
        assert!(failures
            .iter()
            .any(|fl| fl.kind == SideKind::XFunc && fl.state == 0));
        assert!(failures.iter().all(|fl| fl.state == 0));
    }

    #[test]
    fn deterministic_next_satisfies_xfunc() {
        let m = chain(3, &[(0, 1), (1, 2), (2, 0)], &[("p", &[1])]);
        let sigma = closure(&f("X p & X U(p, ~p)"));
        assert!(m.check_side_conditions(&sigma).unwrap().is_empty());
    }

    #[test]
    fn agents_beyond_the_model_are_rejected() {
        let m = Premodel::singleton(1, &[]);
        assert!(matches!(
            m.eval(0, &f("[2] p")),
            Err(ModelError::AgentOutOfRange { agent: 2, agents: 1 })
        ));
    }
}
