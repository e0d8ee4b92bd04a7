use serde::Serialize;
use thiserror::Error;

use crate::semantics::SemanticsError;

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "kind")]
pub enum EquivalenceError {
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error("relation over {pairs} state pairs exceeds the bound of {cap}")]
    TooManyPairs { pairs: u128, cap: u128 },
    #[error("isomorphism search exceeded {cap} steps")]
    SearchBoundExceeded { cap: u64 },
    #[error("not a simulation: {reason}")]
    NotASimulation { reason: String },
}
