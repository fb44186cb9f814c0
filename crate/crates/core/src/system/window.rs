use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;

use crate::audit::{AuditReport, Condition, Violation};
use crate::premodel::check::{composition_failures, independence_failures, refinement_failures};
use crate::premodel::ModelError;
use crate::relation::{Partition, Relation};
use crate::syntax::{AgentId, Dag, Formula, Node};

use super::{LassoSystem, RelTag, SystemError};

/// The relations of an interpreted system restricted to one time, as
/// relations between histories.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slice {
    pub boxp: Partition,
    pub stit: Vec<Partition>,
    pub agt: Partition,
    pub ought: Vec<Relation>,
    /// Histories where each atom holds at this time; other atoms are false.
    pub valuation: BTreeMap<String, FixedBitSet>,
}

impl Slice {
    pub fn partition(&self, tag: RelTag) -> Option<&Partition> {
        match tag {
            RelTag::Box => Some(&self.boxp),
            RelTag::Stit(i) => Some(&self.stit[i.slot()]),
            RelTag::Agt => Some(&self.agt),
            RelTag::Ought(_) => None,
        }
    }

    pub fn related(&self, tag: RelTag, h: usize, g: usize) -> bool {
        match tag {
            RelTag::Ought(i) => self.ought[i.slot()].contains(h, g),
            other => self.partition(other).expect("equivalence tag").same(h, g),
        }
    }

    pub fn holds(&self, atom: &str, h: usize) -> bool {
        self.valuation.get(atom).is_some_and(|s| s.contains(h))
    }
}

/// An interpreted system given explicitly on the times `0..=horizon`.
///
/// Relations never link different times, so (D0) holds by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowSystem {
    pub(super) agents: usize,
    pub(super) names: Vec<String>,
    pub(super) slices: Vec<Slice>,
}

impl WindowSystem {
    pub fn new(agents: usize, names: Vec<String>, slices: Vec<Slice>) -> Result<WindowSystem, SystemError> {
        if agents == 0 {
            return Err(ModelError::NoAgents.into());
        }
        if names.is_empty() {
            return Err(SystemError::NoHistories);
        }
        if slices.is_empty() {
            return Err(SystemError::Shape("a window needs at least one time".into()));
        }
        let m = names.len();
        for (t, s) in slices.iter().enumerate() {
            let sizes_ok = s.boxp.states() == m
                && s.agt.states() == m
                && s.stit.iter().all(|p| p.states() == m)
                && s.ought.iter().all(|r| r.states() == m)
                && s.valuation.values().all(|v| v.len() == m);
            if !sizes_ok {
                return Err(SystemError::Shape(format!("time {t}: relations must cover {m} histories")));
            }
            if s.stit.len() != agents || s.ought.len() != agents {
                return Err(SystemError::Shape(format!("time {t}: expected relations for {agents} agents")));
            }
        }
        Ok(WindowSystem { agents, names, slices })
    }

    pub(crate) fn from_lasso(sys: &LassoSystem, horizon: usize) -> WindowSystem {
        let m = sys.len();
        let base = sys.base();
        let slices = (0..=horizon)
            .map(|t| {
                let mut ought = Vec::with_capacity(sys.agents());
                for i in AgentId::all(sys.agents()) {
                    let mut r = Relation::empty(m);
                    for h in 0..m {
                        for g in 0..m {
                            if sys.related(RelTag::Ought(i), h, g, t) {
                                r.insert(h, g);
                            }
                        }
                    }
                    ought.push(r);
                }
                let valuation = base
                    .valuation()
                    .iter()
                    .map(|(p, states)| {
                        let mut set = FixedBitSet::with_capacity(m);
                        for h in 0..m {
                            if states.contains(sys.state(h, t)) {
                                set.insert(h);
                            }
                        }
                        (p.clone(), set)
                    })
                    .collect();
                Slice {
                    boxp: sys.classes(RelTag::Box, t),
                    stit: AgentId::all(sys.agents())
                        .map(|i| sys.classes(RelTag::Stit(i), t))
                        .collect(),
                    agt: sys.classes(RelTag::Agt, t),
                    ought,
                    valuation,
                }
            })
            .collect();
        WindowSystem {
            agents: sys.agents(),
            names: (0..m).map(|h| format!("h{h}")).collect(),
            slices,
        }
    }

    pub fn agents(&self) -> usize {
        self.agents
    }

    /// Number of histories.
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn horizon(&self) -> usize {
        self.slices.len() - 1
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn slices(&self) -> &[Slice] {
        &self.slices
    }

    pub fn slice(&self, t: usize) -> &Slice {
        &self.slices[t]
    }

    pub fn related(&self, tag: RelTag, h: usize, g: usize, t: usize) -> bool {
        self.slices[t].related(tag, h, g)
    }

    /// Checks (D1) to (D8) at every time of the window. With `additive`,
    /// (D3) is the equality of the group relation with the meet of the
    /// individual ones; otherwise only the inclusion (D3*) is required.
    pub fn audit(&self, additive: bool) -> AuditReport {
        let mut report = AuditReport::default();
        for (t, s) in self.slices.iter().enumerate() {
            let at = |v: Violation| v.at_time(t);
            for i in AgentId::all(self.agents) {
                for (a, b) in refinement_failures(&s.stit[i.slot()], &s.boxp) {
                    report.push(at(Violation::new(Condition::D1, vec![a, b]).for_agent(i)));
                }
            }
            for w in independence_failures(&s.boxp, &s.stit) {
                report.push(at(Violation::new(Condition::D2, w)));
            }
            if additive {
                let meet = s
                    .stit
                    .iter()
                    .skip(1)
                    .fold(s.stit[0].clone(), |acc, p| acc.meet(p));
                let mut pairs = refinement_failures(&s.agt, &meet);
                pairs.extend(refinement_failures(&meet, &s.agt));
                pairs.sort_unstable();
                for (a, b) in pairs {
                    report.push(at(Violation::new(Condition::D3, vec![a, b])));
                }
            } else {
                for i in AgentId::all(self.agents) {
                    for (a, b) in refinement_failures(&s.agt, &s.stit[i.slot()]) {
                        report.push(at(Violation::new(Condition::D3Star, vec![a, b]).for_agent(i)));
                    }
                }
            }
            if let Some(later) = self.slices.get(t + 1) {
                for (a, b) in refinement_failures(&later.boxp, &s.agt) {
                    report.push(at(Violation::new(Condition::D4, vec![a, b])));
                }
            }
            let boxr = s.boxp.to_relation();
            for i in AgentId::all(self.agents) {
                let ought = &s.ought[i.slot()];
                for (a, b) in ought.pairs() {
                    if !boxr.contains(a, b) {
                        report.push(at(Violation::new(Condition::D5, vec![a, b]).for_agent(i)));
                    }
                }
                for h in 0..self.len() {
                    if ought.successors(h).is_clear() {
                        report.push(at(Violation::new(Condition::D6, vec![h]).for_agent(i)));
                    }
                }
                let stitr = s.stit[i.slot()].to_relation();
                for w in composition_failures(ought, &stitr, ought) {
                    report.push(at(Violation::new(Condition::D7, w).for_agent(i)));
                }
                for w in composition_failures(&boxr, ought, ought) {
                    report.push(at(Violation::new(Condition::D8, w).for_agent(i)));
                }
            }
        }
        report
    }

    /// Three-valued truth tables, `tables[node][t][h]`. A value is `None`
    /// when it depends on times past the horizon.
    pub fn tables(&self, dag: &Dag) -> Result<Vec<Vec<Vec<Option<bool>>>>, SystemError> {
        if dag.max_agent() > self.agents {
            return Err(ModelError::AgentOutOfRange {
                agent: dag.max_agent(),
                agents: self.agents,
            }
            .into());
        }
        let m = self.len();
        let times = self.slices.len();
        let mut tables: Vec<Vec<Vec<Option<bool>>>> = Vec::with_capacity(dag.len());
        for node in dag.nodes() {
            let table = match node {
                Node::Atom(p) => (0..times)
                    .map(|t| (0..m).map(|h| Some(self.slices[t].holds(p, h))).collect())
                    .collect(),
                Node::Top => vec![vec![Some(true); m]; times],
                Node::Bottom => vec![vec![Some(false); m]; times],
                Node::Not(a) => map(&tables[*a], |v| v.map(|b| !b)),
                Node::And(a, b) => zip(&tables[*a], &tables[*b], and),
                Node::Nec(a) => self.universal(&tables[*a], RelTag::Box),
                Node::Stit(i, a) => self.universal(&tables[*a], RelTag::Stit(*i)),
                Node::GroupStit(a) => self.universal(&tables[*a], RelTag::Agt),
                Node::Ought(i, a) => self.universal(&tables[*a], RelTag::Ought(*i)),
                Node::Next(a) => (0..times)
                    .map(|t| match tables[*a].get(t + 1) {
                        Some(row) => row.clone(),
                        None => vec![None; m],
                    })
                    .collect(),
                Node::Until(a, b) => {
                    let mut u = vec![vec![None; m]; times];
                    for t in (0..times).rev() {
                        for h in 0..m {
                            let later = if t + 1 < times { u[t + 1][h] } else { None };
                            u[t][h] = or(tables[*a][t][h], and(tables[*b][t][h], later));
                        }
                    }
                    u
                }
            };
            tables.push(table);
        }
        Ok(tables)
    }

    fn universal(&self, inner: &[Vec<Option<bool>>], tag: RelTag) -> Vec<Vec<Option<bool>>> {
        let m = self.len();
        (0..self.slices.len())
            .map(|t| {
                (0..m)
                    .map(|h| {
                        (0..m)
                            .filter(|&g| self.related(tag, h, g, t))
                            .map(|g| inner[t][g])
                            .reduce(and)
                            .unwrap_or(Some(true))
                    })
                    .collect()
            })
            .collect()
    }

    /// Truth of `f` at `(h, t)`, or `None` when the window does not decide it.
    pub fn eval_window(&self, h: usize, t: usize, f: &Formula) -> Result<Option<bool>, SystemError> {
        if h >= self.len() {
            return Err(SystemError::UnknownHistory(h));
        }
        if t > self.horizon() {
            return Ok(None);
        }
        let mut dag = Dag::new();
        let root = dag.intern(f);
        Ok(self.tables(&dag)?[root][t][h])
    }
}

fn and(a: Option<bool>, b: Option<bool>) -> Option<bool> {
    match (a, b) {
        (Some(false), _) | (_, Some(false)) => Some(false),
        (Some(true), Some(true)) => Some(true),
        _ => None,
    }
}

fn or(a: Option<bool>, b: Option<bool>) -> Option<bool> {
    match (a, b) {
        (Some(true), _) | (_, Some(true)) => Some(true),
        (Some(false), Some(false)) => Some(false),
        _ => None,
    }
}

fn map(t: &[Vec<Option<bool>>], f: impl Fn(Option<bool>) -> Option<bool>) -> Vec<Vec<Option<bool>>> {
    t.iter().map(|row| row.iter().map(|&v| f(v)).collect()).collect()
}

fn zip(
    a: &[Vec<Option<bool>>],
    b: &[Vec<Option<bool>>],
    f: impl Fn(Option<bool>, Option<bool>) -> Option<bool>,
) -> Vec<Vec<Option<bool>>> {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(&p, &q)| f(p, q)).collect())
        .collect()
}
