//! Hilbert-style proof checking: axiom schema matching, the rules (MP),
//! (Nec) and (UInd), and a macro emitting proofs for the derived
//! until-introduction rule.
//!
//! Scripts are line oriented:
//!
//! ```text
//! # U(p, q) -> (p | q)
//! 1. U(p, q) <-> p | q & X U(p, q) ; UFix
//! 2. (U(p, q) <-> p | q & X U(p, q)) -> U(p, q) -> p | q ; PC
//! 3. U(p, q) -> p | q ; MP 1 2
//! ```

mod derive;
mod mutate;
mod schema;
mod script;

use thiserror::Error;

use crate::syntax::Formula;

pub use derive::{derive_extra_rule, first_premise, second_premise};
pub use mutate::{mutate, Mutation, MutationKind};
pub use schema::{
    bind, is_tautology, match_axiom, match_schema, schemas, substitute, Schema, SchemaMatch, PC_VARIABLE_LIMIT,
    SCHEMA_IDS,
};
pub use script::{CheckFailure, Justification, Modality, ProofLine, ProofScript};

#[derive(Debug, Error)]
pub enum ProofError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{0}")]
    Shape(String),
    #[error("premise {which} should conclude {expected}, found {}", .found.as_ref().map_or("an empty script".to_string(), |f| f.to_string()))]
    PremiseShape {
        which: usize,
        expected: Formula,
        found: Option<Formula>,
    },
    #[error("premise {which} does not check: {failure}")]
    PremiseInvalid { which: usize, failure: CheckFailure },
}
