use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "kind")]
pub enum SemanticsError {
    #[error("state exploration exceeded the bound of {cap} states")]
    ResourceBoundExceeded { cap: usize },
    #[error("run enumeration exceeded the bound of {max_runs} runs")]
    TooManyRuns { max_runs: usize },
    #[error("`{value}` is not in the input domain")]
    NotAnInput { value: String },
}
