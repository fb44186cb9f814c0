//! Model transformations: choice functions, acceptable paths and
//! unraveling, filtration, and conversion of super-additive systems into
//! additive ones with p-morphism checking.

mod acceptable;
mod additive;
mod choice;
mod filtrate;
mod pmorphism;
mod unravel;

use thiserror::Error;

use crate::audit::AuditReport;
use crate::premodel::ModelError;
use crate::syntax::Formula;
use crate::system::SystemError;

pub use acceptable::{make_acceptable, make_acceptable_from_prefix};
pub use additive::{to_additive, AdditiveConversion, RefinedAction, DEFAULT_REFINEMENT_BUDGET};
pub use choice::{build_choice, ChoiceFunction};
pub use filtrate::{commutes, filtrate, merging_equivalence, profiles, Filtration};
pub use pmorphism::{
    check_pmorphism, check_transfer, Direction, PMorphismFailure, PMorphismWitness, TransferMismatch,
};
pub use unravel::{relational_lookahead, unravel, UnravelOptions};

#[derive(Debug, Error)]
pub enum TransformError {
    #[error("no choice function exists for |X| = {x_size} and |I| = {i_size}")]
    ChoiceArity { x_size: usize, i_size: usize },
    #[error("{what} need {needed}, over the budget of {budget}")]
    Budget {
        what: &'static str,
        needed: usize,
        budget: usize,
    },
    #[error("the input is not a super-additive system:\n{0}")]
    NotSuperAdditive(AuditReport),
    #[error(
        "time {time}: histories {witness:?} share the only agent's choice but not the group choice, \
         which no single-agent additive system can reproduce"
    )]
    SingleAgentSuperAdditive { time: usize, witness: Vec<usize> },
    #[error("{formula} is pending at state {state} but false there; the (UFix) side condition fails")]
    Unfulfillable { state: usize, formula: Formula },
    #[error("filtration: {0}")]
    Filtration(String),
    #[error("not a p-morphism: {}", .0.iter().map(|f| f.to_string()).collect::<Vec<_>>().join("; "))]
    PMorphism(Vec<PMorphismFailure>),
    #[error("{0}")]
    Shape(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    System(#[from] SystemError),
}

#[cfg(test)]
mod tests;
