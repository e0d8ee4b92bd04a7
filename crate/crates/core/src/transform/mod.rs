//! Compilation of a concurrent proto-algorithm into an equivalent
//! non-deterministic sequential one over a classical alphabet.

pub mod error;
pub mod sequential;

pub use error::TransformError;
pub use sequential::{
    build_sequential, check_theorem3, named_function, sequentialize, Certificate, ProductVertex,
    NamedEntry, SequentializationResult, Theorem3Report,
};
