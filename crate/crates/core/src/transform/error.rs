use serde::Serialize;
use thiserror::Error;

use crate::equivalence::EquivalenceError;
use crate::model::ModelError;
use crate::semantics::SemanticsError;

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "kind")]
pub enum TransformError {
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Equivalence(#[from] EquivalenceError),
    #[error("reachable state {state} has no step under the strict policy; the sequential form cannot reproduce it")]
    StuckSource { state: String },
    #[error("generated name `{name}` is ambiguous")]
    NameCollision { name: String },
    #[error("constructed model is invalid: {}", errors.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidOutput { errors: Vec<ModelError> },
    #[error("certification failed: {reason}")]
    CertificationFailed { reason: String },
}
