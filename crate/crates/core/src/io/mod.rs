//! Model documents, Graphviz export and analysis reports.

pub mod dot;
pub mod format;
pub mod report;

pub use dot::{model_to_dot, state_graph_to_dot};
pub use format::{parse_model, serialize_model, serialize_raw, ParseError};
pub use report::{AnalysisReport, ModelDigest};
