//! Step functions, state graphs, runs and computed functions.

pub mod analysis;
pub mod error;
pub mod graph;
pub mod runs;
pub mod step;

pub use analysis::{
    computed_function, divergence_analysis, ComputedFunction, DivergenceReport, Entry,
    UndefinedReason,
};
pub use error::SemanticsError;
pub use graph::{build_state_graph, StateGraph, DEFAULT_STATE_CAP};
pub use runs::{enumerate_runs, output_value, Run, Terminal};
pub use step::{algorithmic_step, computational_step, step, Variant};
