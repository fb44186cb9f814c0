//! Interpreted systems whose histories are eventually periodic paths of a
//! premodel, and explicit finite windows of interpreted systems.

mod json;
mod window;

use std::fmt;

use fixedbitset::FixedBitSet;
use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::audit::AuditReport;
use crate::premodel::{ModelError, Premodel};
use crate::relation::Partition;
use crate::syntax::{AgentId, Dag, Formula, Node};

pub use json::{BaseRef, HistoryFile, LassoFile, SliceFile, WindowFile};
pub use window::{Slice, WindowSystem};

/// Default cap on `stem + period` positions tracked during evaluation.
pub const DEFAULT_PERIOD_BUDGET: usize = 4096;

#[derive(Debug, Error)]
pub enum SystemError {
    #[error("a history needs a nonempty stem and a nonempty loop")]
    EmptyHistory,
    #[error("a system needs at least one history")]
    NoHistories,
    #[error("history {history}: {from} -> {to} is not a temporal edge of the base premodel")]
    NotAnEdge {
        history: usize,
        from: String,
        to: String,
    },
    #[error("state index {0} is out of range")]
    StateOutOfRange(usize),
    #[error("time {t} is beyond the horizon {horizon} for a formula with relational operators")]
    BeyondHorizon { t: usize, horizon: usize },
    #[error("history {0} does not exist")]
    UnknownHistory(usize),
    #[error("the histories need {needed} tracked positions, over the budget of {budget}")]
    PeriodBudget { needed: usize, budget: usize },
    #[error("window shape: {0}")]
    Shape(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// The relations a p-morphism or audit quantifies over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelTag {
    Box,
    Stit(AgentId),
    Agt,
    Ought(AgentId),
}

impl RelTag {
    pub fn all(agents: usize) -> Vec<RelTag> {
        let mut tags = vec![RelTag::Box];
        tags.extend(AgentId::all(agents).map(RelTag::Stit));
        tags.push(RelTag::Agt);
        tags.extend(AgentId::all(agents).map(RelTag::Ought));
        tags
    }
}

impl Serialize for RelTag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Display for RelTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelTag::Box => write!(f, "box"),
            RelTag::Stit(i) => write!(f, "[{i}]"),
            RelTag::Agt => write!(f, "[*]"),
            RelTag::Ought(i) => write!(f, "O{i}"),
        }
    }
}

/// An eventually periodic path: the stem, then the loop repeated forever.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LassoHistory {
    stem: Vec<usize>,
    cycle: Vec<usize>,
}

impl LassoHistory {
    pub fn new(stem: Vec<usize>, cycle: Vec<usize>) -> Result<LassoHistory, SystemError> {
        if stem.is_empty() || cycle.is_empty() {
            return Err(SystemError::EmptyHistory);
        }
        Ok(LassoHistory { stem, cycle })
    }

    pub fn stem(&self) -> &[usize] {
        &self.stem
    }

    pub fn cycle(&self) -> &[usize] {
        &self.cycle
    }

    pub fn state_at(&self, t: usize) -> usize {
        if t < self.stem.len() {
            self.stem[t]
        } else {
            self.cycle[(t - self.stem.len()) % self.cycle.len()]
        }
    }

    /// The first `len` states.
    pub fn prefix(&self, len: usize) -> Vec<usize> {
        (0..len).map(|t| self.state_at(t)).collect()
    }

    /// Consecutive pairs, including the stem-to-loop step and the wrap-around.
    fn steps(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let seq: Vec<usize> = self.stem.iter().chain(&self.cycle).copied().collect();
        let wrap = (*self.cycle.last().expect("nonempty"), self.cycle[0]);
        (0..seq.len() - 1)
            .map(move |k| (seq[k], seq[k + 1]))
            .chain(std::iter::once(wrap))
    }
}

/// A finite set of lasso histories over a premodel, with the relations the
/// premodel induces on points: `(h,t)` and `(g,t)` are box-related when
/// `h(t) box g(t)` and `h`, `g` are group-related at every earlier time, and
/// the other relations additionally require the premodel relation at `t`.
#[derive(Debug, Clone)]
pub struct LassoSystem {
    base: Premodel,
    histories: Vec<LassoHistory>,
    horizon: usize,
    /// First time two histories leave a common group-choice cell.
    split: Vec<Vec<Option<usize>>>,
    /// From `settle` on, the whole system repeats with `period`.
    settle: usize,
    period: usize,
}

impl LassoSystem {
    pub fn new(
        base: Premodel,
        histories: Vec<LassoHistory>,
        horizon: usize,
    ) -> Result<LassoSystem, SystemError> {
        LassoSystem::with_budget(base, histories, horizon, DEFAULT_PERIOD_BUDGET)
    }

    pub fn with_budget(
        base: Premodel,
        histories: Vec<LassoHistory>,
        horizon: usize,
        budget: usize,
    ) -> Result<LassoSystem, SystemError> {
        if histories.is_empty() {
            return Err(SystemError::NoHistories);
        }
        let n = base.len();
        for (k, h) in histories.iter().enumerate() {
            for (a, b) in h.steps() {
                if a >= n {
                    return Err(SystemError::StateOutOfRange(a));
                }
                if b >= n {
                    return Err(SystemError::StateOutOfRange(b));
                }
                if !base.next().contains(a, b) {
                    return Err(SystemError::NotAnEdge {
                        history: k,
                        from: base.name(a).to_string(),
                        to: base.name(b).to_string(),
                    });
                }
            }
        }
        let mut period = 1usize;
        for h in &histories {
            period = period.lcm(&h.cycle.len());
            if period > budget {
                return Err(SystemError::PeriodBudget {
                    needed: period,
                    budget,
                });
            }
        }
        let max_stem = histories.iter().map(|h| h.stem.len()).max().unwrap_or(0);
        let agt = base.agt();
        let m = histories.len();
        let mut split = vec![vec![None; m]; m];
        let mut settle = max_stem;
        for a in 0..m {
            for b in a + 1..m {
                let (ha, hb) = (&histories[a], &histories[b]);
                let scan = ha.stem.len().max(hb.stem.len()) + ha.cycle.len().lcm(&hb.cycle.len());
                let d = (0..scan).find(|&t| !agt.same(ha.state_at(t), hb.state_at(t)));
                if let Some(d) = d {
                    settle = settle.max(d + 1);
                }
                split[a][b] = d;
                split[b][a] = d;
            }
        }
        if settle + period > budget {
            return Err(SystemError::PeriodBudget {
                needed: settle + period,
                budget,
            });
        }
        Ok(LassoSystem {
            base,
            histories,
            horizon,
            split,
            settle,
            period,
        })
    }

    pub fn base(&self) -> &Premodel {
        &self.base
    }

    pub fn histories(&self) -> &[LassoHistory] {
        &self.histories
    }

    pub fn history(&self, h: usize) -> &LassoHistory {
        &self.histories[h]
    }

    pub fn len(&self) -> usize {
        self.histories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.histories.is_empty()
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn agents(&self) -> usize {
        self.base.agents()
    }

    /// Number of distinct time positions: times at or after `settle` repeat
    /// with the global period.
    pub fn positions(&self) -> usize {
        self.settle + self.period
    }

    pub fn position(&self, t: usize) -> usize {
        if t < self.positions() {
            t
        } else {
            self.settle + (t - self.settle) % self.period
        }
    }

    fn next_position(&self, pos: usize) -> usize {
        if pos + 1 < self.positions() {
            pos + 1
        } else {
            self.settle
        }
    }

    pub fn state(&self, h: usize, t: usize) -> usize {
        self.histories[h].state_at(t)
    }

    /// `(h,t)` and `(g,t)` are box-related.
    pub fn box_related(&self, h: usize, g: usize, t: usize) -> bool {
        let agrees_before = match self.split[h][g] {
            Some(d) => t <= d,
            None => true,
        };
        agrees_before && self.base.box_partition().same(self.state(h, t), self.state(g, t))
    }

    pub fn related(&self, tag: RelTag, h: usize, g: usize, t: usize) -> bool {
        if !self.box_related(h, g, t) {
            return false;
        }
        let (s, u) = (self.state(h, t), self.state(g, t));
        match tag {
            RelTag::Box => true,
            RelTag::Stit(i) => self.base.stit(i).same(s, u),
            RelTag::Agt => self.base.agt().same(s, u),
            RelTag::Ought(i) => self.base.ought(i).contains(s, u),
        }
    }

    /// Histories partitioned by the equivalence `tag` (not an ought) at `t`.
    pub fn classes(&self, tag: RelTag, t: usize) -> Partition {
        let m = self.len();
        let mut labels = vec![usize::MAX; m];
        let mut next = 0;
        for h in 0..m {
            if labels[h] != usize::MAX {
                continue;
            }
            for (g, label) in labels.iter_mut().enumerate().skip(h) {
                if *label == usize::MAX && self.related(tag, h, g, t) {
                    *label = next;
                }
            }
            next += 1;
        }
        Partition::from_labels(&labels)
    }

    /// Truth tables for every node of `dag`: `tables[node][position]` holds
    /// the histories where the node is true at that position.
    pub fn tables(&self, dag: &Dag) -> Result<Vec<Vec<FixedBitSet>>, SystemError> {
        if dag.max_agent() > self.agents() {
            return Err(ModelError::AgentOutOfRange {
                agent: dag.max_agent(),
                agents: self.agents(),
            }
            .into());
        }
        let m = self.len();
        let positions = self.positions();
        let needs_relations = dag.nodes().iter().any(|n| {
            matches!(
                n,
                Node::Nec(_) | Node::Stit(..) | Node::GroupStit(_) | Node::Ought(..)
            )
        });
        let classes: Vec<Vec<Partition>> = if needs_relations {
            (0..positions)
                .map(|t| {
                    let mut per = vec![self.classes(RelTag::Box, t), self.classes(RelTag::Agt, t)];
                    per.extend(AgentId::all(self.agents()).map(|i| self.classes(RelTag::Stit(i), t)));
                    per
                })
                .collect()
        } else {
            Vec::new()
        };
        let empty = FixedBitSet::with_capacity(m);
        let mut tables: Vec<Vec<FixedBitSet>> = Vec::with_capacity(dag.len());
        for node in dag.nodes() {
            let table: Vec<FixedBitSet> = match node {
                Node::Atom(p) => {
                    let ext = self.base.atom_states(p);
                    (0..positions)
                        .map(|t| ones(m, |h| ext.contains(self.state(h, t))))
                        .collect()
                }
                Node::Top => (0..positions).map(|_| ones(m, |_| true)).collect(),
                Node::Bottom => vec![empty.clone(); positions],
                Node::Not(a) => tables[*a]
                    .iter()
                    .map(|s| {
                        let mut c = s.clone();
                        c.toggle_range(..);
                        c
                    })
                    .collect(),
                Node::And(a, b) => tables[*a]
                    .iter()
                    .zip(&tables[*b])
                    .map(|(x, y)| {
                        let mut c = x.clone();
                        c.intersect_with(y);
                        c
                    })
                    .collect(),
                Node::Nec(a) => (0..positions)
                    .map(|t| boxed(&classes[t][0], &tables[*a][t]))
                    .collect(),
                Node::GroupStit(a) => (0..positions)
                    .map(|t| boxed(&classes[t][1], &tables[*a][t]))
                    .collect(),
                Node::Stit(i, a) => (0..positions)
                    .map(|t| boxed(&classes[t][2 + i.slot()], &tables[*a][t]))
                    .collect(),
                Node::Ought(i, a) => (0..positions)
                    .map(|t| {
                        let inner = &tables[*a][t];
                        ones(m, |h| {
                            (0..m).all(|g| !self.related(RelTag::Ought(*i), h, g, t) || inner.contains(g))
                        })
                    })
                    .collect(),
                Node::Next(a) => (0..positions)
                    .map(|t| tables[*a][self.next_position(t)].clone())
                    .collect(),
                Node::Until(a, b) => self.until_table(&tables[*a], &tables[*b]),
            };
            tables.push(table);
        }
        Ok(tables)
    }

    /// Least solution of `u(t) = a(t) | (b(t) & u(t+1))` over the positions.
    fn until_table(&self, a: &[FixedBitSet], b: &[FixedBitSet]) -> Vec<FixedBitSet> {
        let mut u: Vec<FixedBitSet> = a.to_vec();
        loop {
            let mut changed = false;
            for t in (0..self.positions()).rev() {
                let mut step = u[self.next_position(t)].clone();
                step.intersect_with(&b[t]);
                step.union_with(&a[t]);
                if step != u[t] {
                    u[t] = step;
                    changed = true;
                }
            }
            if !changed {
                return u;
            }
        }
    }

    pub fn eval_at(&self, h: usize, t: usize, f: &Formula) -> Result<bool, SystemError> {
        if h >= self.len() {
            return Err(SystemError::UnknownHistory(h));
        }
        if t > self.horizon && f.is_relational() {
            return Err(SystemError::BeyondHorizon {
                t,
                horizon: self.horizon,
            });
        }
        let mut dag = Dag::new();
        let root = dag.intern(f);
        let tables = self.tables(&dag)?;
        Ok(tables[root][self.position(t)].contains(h))
    }

    /// The explicit window `0..=horizon` of this system.
    pub fn window(&self, horizon: usize) -> WindowSystem {
        WindowSystem::from_lasso(self, horizon)
    }

    /// Audits (D1) to (D8), with (D3*) in place of (D3), on `0..=horizon`.
    pub fn audit_window(&self) -> AuditReport {
        self.window(self.horizon).audit(false)
    }
}

fn ones(m: usize, pred: impl Fn(usize) -> bool) -> FixedBitSet {
    let mut s = FixedBitSet::with_capacity(m);
    for h in 0..m {
        if pred(h) {
            s.insert(h);
        }
    }
    s
}

fn boxed(p: &Partition, inner: &FixedBitSet) -> FixedBitSet {
    let mut out = FixedBitSet::with_capacity(p.states());
    for block in p.blocks() {
        if block.iter().all(|&h| inner.contains(h)) {
            for &h in block {
                out.insert(h);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests;
