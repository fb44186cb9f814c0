//! Structural condition reports shared by premodels and window systems.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::syntax::AgentId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Condition {
    /// Relations only link points at the same time.
    D0,
    /// Every individual choice partition refines historical necessity.
    D1,
    /// Independence of agents: every joint selection of choices is realised.
    D2,
    /// Group choice is exactly the intersection of individual choices.
    D3,
    /// Group choice refines every individual choice.
    #[serde(rename = "D3*")]
    D3Star,
    /// No choice between undivided histories.
    D4,
    /// `next ; box` is contained in `agt ; next`.
    #[serde(rename = "D4*")]
    D4Star,
    D5,
    D6,
    D7,
    D8,
    /// The temporal successor relation is serial.
    #[serde(rename = "serial")]
    NextSerial,
}

impl Condition {
    pub fn as_str(self) -> &'static str {
        match self {
            Condition::D0 => "D0",
            Condition::D1 => "D1",
            Condition::D2 => "D2",
            Condition::D3 => "D3",
            Condition::D3Star => "D3*",
            Condition::D4 => "D4",
            Condition::D4Star => "D4*",
            Condition::D5 => "D5",
            Condition::D6 => "D6",
            Condition::D7 => "D7",
            Condition::D8 => "D8",
            Condition::NextSerial => "serial",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One failing instance of a condition.
///
/// `witness` lists states (for premodels) or history indices (for window
/// systems) in the order the condition quantifies them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub condition: Condition,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agent: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time: Option<usize>,
    pub witness: Vec<usize>,
}

impl Violation {
    pub fn new(condition: Condition, witness: Vec<usize>) -> Violation {
        Violation {
            condition,
            agent: None,
            time: None,
            witness,
        }
    }

    pub fn for_agent(mut self, agent: AgentId) -> Violation {
        self.agent = Some(agent.index());
        self
    }

    pub fn at_time(mut self, t: usize) -> Violation {
        self.time = Some(t);
        self
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.condition)?;
        if let Some(a) = self.agent {
            write!(f, " agent {a}")?;
        }
        if let Some(t) = self.time {
            write!(f, " at t={t}")?;
        }
        write!(f, " witness {:?}", self.witness)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub violations: Vec<Violation>,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, v: Violation) {
        self.violations.push(v);
    }

    pub fn has(&self, condition: Condition) -> bool {
        self.violations.iter().any(|v| v.condition == condition)
    }

    pub fn conditions(&self) -> Vec<Condition> {
        let mut out: Vec<Condition> = self.violations.iter().map(|v| v.condition).collect();
        out.sort();
        out.dedup();
        out
    }
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return writeln!(f, "ok: no violations");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}
