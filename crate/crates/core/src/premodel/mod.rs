//! Finite DTDS Kripke premodels: structure, validation and satisfaction.

pub(crate) mod check;
mod eval;
mod json;
mod random;

use std::collections::{BTreeMap, HashSet};

use thiserror::Error;

use crate::audit::AuditReport;
use crate::relation::{Partition, PartitionError, Relation, StateSet};
use crate::syntax::AgentId;

pub use eval::{ufix_instance, xfunc_instance, SideFailure, SideKind};
pub use json::PremodelFile;
pub use random::{random_premodel, NextShape, RandomPremodel};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("a premodel needs at least one state")]
    NoStates,
    #[error("the agent count must be at least 1")]
    NoAgents,
    #[error("duplicate state name `{0}`")]
    DuplicateState(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("relation {relation}: {source}")]
    Malformed {
        relation: String,
        source: PartitionError,
    },
    #[error("relation {relation} ranges over {found} states, expected {expected}")]
    SizeMismatch {
        relation: String,
        found: usize,
        expected: usize,
    },
    #[error("expected {expected} {what} relations, one per agent, found {found}")]
    AgentMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("unexpected field `{0}`")]
    UnknownField(String),
    #[error("formula mentions agent {agent} but the model has {agents}")]
    AgentOutOfRange { agent: usize, agents: usize },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("premodel violates its structural conditions:\n{0}")]
    Invalid(AuditReport),
}

/// The raw ingredients of a premodel, before shape checks.
#[derive(Debug, Clone)]
pub struct PremodelParts {
    pub names: Vec<String>,
    pub agents: usize,
    pub boxp: Partition,
    pub stit: Vec<Partition>,
    pub agt: Partition,
    pub ought: Vec<Relation>,
    pub next: Relation,
    pub valuation: BTreeMap<String, StateSet>,
}

/// A finite Kripke premodel.
///
/// Construction only checks shapes (sizes, agent counts, names). The
/// structural conditions are checked separately by [`Premodel::audit`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Premodel {
    names: Vec<String>,
    agents: usize,
    boxp: Partition,
    stit: Vec<Partition>,
    agt: Partition,
    ought: Vec<Relation>,
    next: Relation,
    prev: Relation,
    valuation: BTreeMap<String, StateSet>,
}

impl Premodel {
    pub fn new(parts: PremodelParts) -> Result<Premodel, ModelError> {
        let n = parts.names.len();
        if n == 0 {
            return Err(ModelError::NoStates);
        }
        if parts.agents == 0 {
            return Err(ModelError::NoAgents);
        }
        let mut seen = HashSet::new();
        for name in &parts.names {
            if !seen.insert(name.as_str()) {
                return Err(ModelError::DuplicateState(name.clone()));
            }
        }
        let sized = |relation: String, found: usize| {
            if found == n {
                Ok(())
            } else {
                Err(ModelError::SizeMismatch {
                    relation,
                    found,
                    expected: n,
                })
            }
        };
        for (what, len) in [("stit", parts.stit.len()), ("ought", parts.ought.len())] {
            if len != parts.agents {
                return Err(ModelError::AgentMismatch {
                    what,
                    expected: parts.agents,
                    found: len,
                });
            }
        }
        sized("box".into(), parts.boxp.states())?;
        sized("agt".into(), parts.agt.states())?;
        sized("next".into(), parts.next.states())?;
        for (i, p) in parts.stit.iter().enumerate() {
            sized(format!("stit_{}", i + 1), p.states())?;
        }
        for (i, r) in parts.ought.iter().enumerate() {
            sized(format!("ought_{}", i + 1), r.states())?;
        }
        let mut valuation = parts.valuation;
        for (atom, set) in valuation.iter_mut() {
            if let Some(bad) = set.ones().find(|&s| s >= n) {
                return Err(ModelError::Malformed {
                    relation: format!("valuation of {atom}"),
                    source: PartitionError::OutOfRange(bad),
                });
            }
            set.grow(n);
        }
        let prev = parts.next.converse();
        Ok(Premodel {
            names: parts.names,
            agents: parts.agents,
            boxp: parts.boxp,
            stit: parts.stit,
            agt: parts.agt,
            ought: parts.ought,
            next: parts.next,
            prev,
            valuation,
        })
    }

    /// One state related to itself by every relation, with the given atoms true.
    pub fn singleton(agents: usize, true_atoms: &[&str]) -> Premodel {
        let mut valuation = BTreeMap::new();
        for p in true_atoms {
            let mut set = StateSet::with_capacity(1);
            set.insert(0);
            valuation.insert(p.to_string(), set);
        }
        Premodel::new(PremodelParts {
            names: vec!["s0".into()],
            agents,
            boxp: Partition::trivial(1),
            stit: vec![Partition::trivial(1); agents],
            agt: Partition::trivial(1),
            ought: vec![Relation::identity(1); agents],
            next: Relation::identity(1),
            valuation,
        })
        .expect("singleton premodel is well-shaped")
    }

    pub fn into_parts(self) -> PremodelParts {
        PremodelParts {
            names: self.names,
            agents: self.agents,
            boxp: self.boxp,
            stit: self.stit,
            agt: self.agt,
            ought: self.ought,
            next: self.next,
            valuation: self.valuation,
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn agents(&self) -> usize {
        self.agents
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, s: usize) -> &str {
        &self.names[s]
    }

    pub fn state(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn box_partition(&self) -> &Partition {
        &self.boxp
    }

    pub fn stit(&self, agent: AgentId) -> &Partition {
        &self.stit[agent.slot()]
    }

    pub fn agt(&self) -> &Partition {
        &self.agt
    }

    pub fn ought(&self, agent: AgentId) -> &Relation {
        &self.ought[agent.slot()]
    }

    pub fn next(&self) -> &Relation {
        &self.next
    }

    /// Converse of the temporal relation.
    pub fn prev(&self) -> &Relation {
        &self.prev
    }

    pub fn valuation(&self) -> &BTreeMap<String, StateSet> {
        &self.valuation
    }

    /// States where `atom` holds; unknown atoms hold nowhere.
    pub fn atom_states(&self, atom: &str) -> StateSet {
        self.valuation
            .get(atom)
            .cloned()
            .unwrap_or_else(|| StateSet::with_capacity(self.len()))
    }

    pub fn set_atom(&mut self, atom: &str, states: StateSet) {
        let mut states = states;
        states.grow(self.len());
        self.valuation.insert(atom.to_string(), states);
    }

    /// Relabels states with `perm[old] = new`.
    pub fn permuted(&self, perm: &[usize]) -> Premodel {
        let n = self.len();
        let mut names = vec![String::new(); n];
        for s in 0..n {
            names[perm[s]] = self.names[s].clone();
        }
        let part = |p: &Partition| {
            let mut labels = vec![0; n];
            for s in 0..n {
                labels[perm[s]] = p.block_of(s);
            }
            Partition::from_labels(&labels)
        };
        let rel = |r: &Relation| {
            let mut out = Relation::empty(n);
            for (a, b) in r.pairs() {
                out.insert(perm[a], perm[b]);
            }
            out
        };
        let valuation = self
            .valuation
            .iter()
            .map(|(p, set)| {
                let mut out = StateSet::with_capacity(n);
                for s in set.ones() {
                    out.insert(perm[s]);
                }
                (p.clone(), out)
            })
            .collect();
        Premodel::new(PremodelParts {
            names,
            agents: self.agents,
            boxp: part(&self.boxp),
            stit: self.stit.iter().map(part).collect(),
            agt: part(&self.agt),
            ought: self.ought.iter().map(rel).collect(),
            next: rel(&self.next),
            valuation,
        })
        .expect("permutation preserves shape")
    }
}
