//! Formulas of the temporal deontic STIT language.
//!
//! The stored tree only contains the primitive connectives. Disjunction,
//! implication, the diamonds, `M_i`, `F` and `G` are accepted by the parser and
//! produced by the printer, but never appear as nodes.

mod closure;
mod dag;
mod parser;
mod printer;

use std::collections::BTreeSet;
use std::fmt;

pub use closure::{closure, ClosureSet};
pub use dag::{Dag, Node};
pub use parser::{parse, ParseError};
pub use printer::{render, render_with, RenderOptions};

/// A 1-based agent index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AgentId(u32);

impl AgentId {
    pub fn new(index: u32) -> Option<AgentId> {
        (index >= 1).then_some(AgentId(index))
    }

    /// The 1-based index as written in formulas.
    pub fn index(self) -> u32 {
        self.0
    }

    /// The 0-based slot used for per-agent tables.
    pub fn slot(self) -> usize {
        self.0 as usize - 1
    }

    pub fn from_slot(slot: usize) -> AgentId {
        AgentId(slot as u32 + 1)
    }

    /// All agents `1..=count`.
    pub fn all(count: usize) -> impl Iterator<Item = AgentId> {
        (0..count).map(AgentId::from_slot)
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(String),
    Top,
    Bottom,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    /// Historical necessity.
    Nec(Box<Formula>),
    /// Chellas STIT for a single agent.
    Stit(AgentId, Box<Formula>),
    /// Chellas STIT for the grand coalition.
    GroupStit(Box<Formula>),
    Ought(AgentId, Box<Formula>),
    Next(Box<Formula>),
    /// `Until(left, right)`: `left` holds at some point from now on and
    /// `right` holds at every point strictly before it.
    Until(Box<Formula>, Box<Formula>),
}

#[allow(clippy::should_implement_trait)]
impl Formula {
    pub fn atom(name: impl Into<String>) -> Formula {
        Formula::Atom(name.into())
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(a, Formula::not(b)))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and(
            Formula::implies(a.clone(), b.clone()),
            Formula::implies(b, a),
        )
    }

    pub fn nec(f: Formula) -> Formula {
        Formula::Nec(Box::new(f))
    }

    pub fn poss(f: Formula) -> Formula {
        Formula::not(Formula::nec(Formula::not(f)))
    }

    pub fn stit(agent: AgentId, f: Formula) -> Formula {
        Formula::Stit(agent, Box::new(f))
    }

    pub fn can_stit(agent: AgentId, f: Formula) -> Formula {
        Formula::not(Formula::stit(agent, Formula::not(f)))
    }

    pub fn group_stit(f: Formula) -> Formula {
        Formula::GroupStit(Box::new(f))
    }

    pub fn ought(agent: AgentId, f: Formula) -> Formula {
        Formula::Ought(agent, Box::new(f))
    }

    pub fn may(agent: AgentId, f: Formula) -> Formula {
        Formula::not(Formula::ought(agent, Formula::not(f)))
    }

    pub fn next(f: Formula) -> Formula {
        Formula::Next(Box::new(f))
    }

    pub fn until(left: Formula, right: Formula) -> Formula {
        Formula::Until(Box::new(left), Box::new(right))
    }

    /// `F f`, i.e. `U(f, true)`.
    pub fn eventually(f: Formula) -> Formula {
        Formula::until(f, Formula::Top)
    }

    /// `G f`, i.e. `~U(~f, true)`.
    pub fn always(f: Formula) -> Formula {
        Formula::not(Formula::until(Formula::not(f), Formula::Top))
    }

    /// Conjunction of a non-empty list, nested to the left.
    pub fn conjunction(parts: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        parts.into_iter().reduce(Formula::and)
    }

    /// Negation that cancels a leading `~` instead of stacking one.
    pub fn dot_neg(&self) -> Formula {
        match self {
            Formula::Not(inner) => (**inner).clone(),
            other => Formula::not(other.clone()),
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + self.children().map(Formula::size).sum::<usize>()
    }

    pub fn children(&self) -> impl Iterator<Item = &Formula> {
        let (a, b): (Option<&Formula>, Option<&Formula>) = match self {
            Formula::Atom(_) | Formula::Top | Formula::Bottom => (None, None),
            Formula::Not(f)
            | Formula::Nec(f)
            | Formula::Stit(_, f)
            | Formula::GroupStit(f)
            | Formula::Ought(_, f)
            | Formula::Next(f) => (Some(f), None),
            Formula::And(l, r) | Formula::Until(l, r) => (Some(l), Some(r)),
        };
        a.into_iter().chain(b)
    }

    /// All subformulas, including the formula itself.
    pub fn subformulas(&self) -> BTreeSet<Formula> {
        let mut out = BTreeSet::new();
        self.collect_subformulas(&mut out);
        out
    }

    fn collect_subformulas(&self, out: &mut BTreeSet<Formula>) {
        if out.insert(self.clone()) {
            for child in self.children() {
                child.collect_subformulas(out);
            }
        }
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| {
            if let Formula::Atom(name) = f {
                out.insert(name.clone());
            }
        });
        out
    }

    /// Largest agent index mentioned, or 0 when the formula mentions none.
    pub fn max_agent(&self) -> usize {
        let mut max = 0;
        self.walk(&mut |f| {
            if let Formula::Stit(a, _) | Formula::Ought(a, _) = f {
                max = max.max(a.index() as usize);
            }
        });
        max
    }

    /// True when the formula contains a non-temporal modality.
    pub fn is_relational(&self) -> bool {
        match self {
            Formula::Nec(_) | Formula::Stit(..) | Formula::GroupStit(_) | Formula::Ought(..) => {
                true
            }
            other => other.children().any(Formula::is_relational),
        }
    }

    /// Pre-order traversal.
    pub fn walk(&self, visit: &mut impl FnMut(&Formula)) {
        visit(self);
        for child in self.children() {
            child.walk(visit);
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

impl std::str::FromStr for Formula {
    type Err = ParseError;

    /// Parses without an agent bound; agents are only required to be positive.
    fn from_str(s: &str) -> Result<Formula, ParseError> {
        parse(s, u32::MAX as usize)
    }
}

impl serde::Serialize for AgentId {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_u32(self.0)
    }
}

impl serde::Serialize for Formula {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&render(self))
    }
}

impl<'de> serde::Deserialize<'de> for Formula {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Formula, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}
