//! Bounded satisfiability search over premodels.
//!
//! A formula satisfiable in some interpreted system has a premodel of size
//! at most doubly exponential in the formula; this module only searches
//! small premodels. Up to three states, two agents and two atoms the search
//! is exhaustive; beyond that it samples random premodels, so an
//! unsatisfiable verdict is only relative to what was explored.

mod enumerate;

use std::ops::ControlFlow;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::premodel::{random_premodel, ModelError, NextShape, Premodel, RandomPremodel};
use crate::syntax::{closure, ClosureSet, Dag, Formula};
use crate::system::LassoSystem;
use crate::transforms::{unravel, TransformError, UnravelOptions};

pub use enumerate::{for_each_premodel, Footprint};

/// Largest size searched exhaustively.
pub const EXHAUSTIVE_STATES: usize = 3;

#[derive(Debug, Error)]
pub enum DecideError {
    #[error("the formula names agent {agent} but the search has {agents} agents")]
    AgentOutOfRange { agent: usize, agents: usize },
    #[error("the search needs at least one state and one agent")]
    EmptyBound,
    #[error("a candidate passed the search but failed re-verification: {0}")]
    Unverified(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Transform(#[from] TransformError),
}

#[derive(Debug, Clone)]
pub struct SatOptions {
    pub max_states: usize,
    pub agents: usize,
    pub seed: u64,
    /// Random premodels tried per size beyond the exhaustive range.
    pub samples: usize,
    /// Unraveling used to re-verify a witness.
    pub unravel: UnravelOptions,
}

impl SatOptions {
    pub fn new(max_states: usize, agents: usize) -> SatOptions {
        SatOptions {
            max_states,
            agents,
            seed: 0,
            samples: 2000,
            unravel: UnravelOptions::with_horizon(2),
        }
    }
}

/// Outcome of each re-verification step of a witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessReport {
    pub audit_clean: bool,
    pub side_conditions_clean: bool,
    pub eval: bool,
    pub histories: usize,
    pub eval_at: bool,
}

impl WitnessReport {
    pub fn verified(&self) -> bool {
        self.audit_clean && self.side_conditions_clean && self.eval && self.eval_at
    }
}

#[derive(Debug, Clone)]
pub struct Witness {
    pub model: Premodel,
    pub state: usize,
    /// The unraveled system; history 0 starts at `state`.
    pub system: LassoSystem,
    pub report: WitnessReport,
}

#[derive(Debug, Clone)]
pub enum Verdict {
    Sat(Box<Witness>),
    /// Nothing found with at most `bound` states; sizes up to
    /// `exhaustive_up_to` were searched completely.
    UnsatUpTo { bound: usize, exhaustive_up_to: usize },
}

#[derive(Debug, Clone)]
pub struct SatResult {
    pub formula: Formula,
    pub verdict: Verdict,
    pub explored: usize,
    pub seed: u64,
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        matches!(self.verdict, Verdict::Sat(_))
    }

    pub fn witness(&self) -> Option<&Witness> {
        match &self.verdict {
            Verdict::Sat(w) => Some(w),
            Verdict::UnsatUpTo { .. } => None,
        }
    }
}

/// A candidate checker compiled once per formula.
struct Target {
    dag: Dag,
    root: usize,
    sigma: ClosureSet,
}

impl Target {
    fn new(f: &Formula) -> Target {
        let mut dag = Dag::new();
        let root = dag.intern(f);
        Target {
            dag,
            root,
            sigma: closure(f),
        }
    }

    /// The lowest state satisfying the formula, provided the side
    /// conditions hold.
    fn check(&self, m: &Premodel) -> Result<Option<usize>, DecideError> {
        let ext = m.extensions(&self.dag)?;
        let Some(state) = ext[self.root].minimum() else {
            return Ok(None);
        };
        if m.check_side_conditions(&self.sigma)?.is_empty() {
            Ok(Some(state))
        } else {
            Ok(None)
        }
    }
}

/// Re-verifies a witness from scratch: audit, side conditions, premodel
/// evaluation, unraveling, and evaluation on the unraveled system.
pub fn verify_witness(
    f: &Formula,
    model: &Premodel,
    state: usize,
    opts: UnravelOptions,
) -> Result<Witness, DecideError> {
    let sigma = closure(f);
    let audit_clean = model.audit().is_clean();
    let side_conditions_clean = model.check_side_conditions(&sigma)?.is_empty();
    let eval = model.eval(state, f)?;
    let system = unravel(model, &sigma, &[state], opts)?;
    let eval_at = system.eval_at(0, 0, f).map_err(TransformError::from)?;
    Ok(Witness {
        model: model.clone(),
        state,
        report: WitnessReport {
            audit_clean,
            side_conditions_clean,
            eval,
            histories: system.len(),
            eval_at,
        },
        system,
    })
}

pub fn sat(f: &Formula, opts: &SatOptions) -> Result<SatResult, DecideError> {
    if opts.max_states == 0 || opts.agents == 0 {
        return Err(DecideError::EmptyBound);
    }
    if f.max_agent() > opts.agents {
        return Err(DecideError::AgentOutOfRange {
            agent: f.max_agent(),
            agents: opts.agents,
        });
    }
    let target = Target::new(f);
    let fp = Footprint::of(f, opts.agents);
    let exhaustive = opts.agents <= 2 && fp.atoms.len() <= 2;
    let exhaustive_up_to = if exhaustive {
        opts.max_states.min(EXHAUSTIVE_STATES)
    } else {
        0
    };
    let mut explored = 0usize;
    let mut found: Option<(Premodel, usize)> = None;
    let mut failure: Option<DecideError> = None;

    for n in 1..=exhaustive_up_to {
        let flow = for_each_premodel(n, &fp, &mut |m| {
            explored += 1;
            match target.check(m) {
                Ok(Some(s)) => {
                    found = Some((m.clone(), s));
                    ControlFlow::Break(())
                }
                Ok(None) => ControlFlow::Continue(()),
                Err(e) => {
                    failure = Some(e);
                    ControlFlow::Break(())
                }
            }
        });
        if flow.is_break() {
            break;
        }
    }
    if let Some(e) = failure {
        return Err(e);
    }

    if found.is_none() {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let atoms: Vec<&str> = fp.atoms.iter().map(String::as_str).collect();
        let first = if exhaustive { exhaustive_up_to + 1 } else { 1 };
        'sizes: for n in first..=opts.max_states {
            for k in 0..opts.samples {
                let mut cfg = RandomPremodel::new(n, opts.agents, &atoms);
                if k % 2 == 1 {
                    cfg.next = NextShape::Functional;
                }
                let m = random_premodel(&mut rng, &cfg);
                explored += 1;
                if let Some(s) = target.check(&m)? {
                    found = Some((m, s));
                    break 'sizes;
                }
            }
        }
    }

    let verdict = match found {
        Some((model, state)) => {
            let witness = verify_witness(f, &model, state, opts.unravel)?;
            if !witness.report.verified() {
                return Err(DecideError::Unverified(format!("{:?}", witness.report)));
            }
            Verdict::Sat(Box::new(witness))
        }
        None => Verdict::UnsatUpTo {
            bound: opts.max_states,
            exhaustive_up_to,
        },
    };
    Ok(SatResult {
        formula: f.clone(),
        verdict,
        explored,
        seed: opts.seed,
    })
}

/// Searches for a model of `~f`; none found means `f` is valid up to the bound.
pub fn find_countermodel(f: &Formula, opts: &SatOptions) -> Result<SatResult, DecideError> {
    sat(&Formula::not(f.clone()), opts)
}
