//! Static objects: alphabets, component graphs, interpretations,
//! proto-algorithms and states, with their validators.

pub mod alphabet;
pub mod error;
pub mod graph;
pub mod interp;
pub mod proto;
pub mod raw;
pub mod state;

pub use alphabet::{validate_alphabet, Alphabet, Symbol, SymbolKind, FIN, INI};
pub use error::{GraphClause, LawKind, ModelError};
pub use graph::{validate_component_graph, ComponentGraph, Vertex};
pub use interp::{validate_interpretation, CheckedInterpretation, Interpretation, Slot, Value};
pub use proto::{validate_proto_algorithm, ProtoAlgorithm};
pub use raw::{
    BottomPolicy, RawAlphabet, RawCell, RawControl, RawDomains, RawEdge, RawGraph,
    RawInterpretation, RawModel, RawState, RawTable, RawVertex, ValidationLevel, BOT_TOKEN,
};
pub use state::{classify_state, Control, State, StateKind};
