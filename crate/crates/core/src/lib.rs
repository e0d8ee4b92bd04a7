pub mod model;
pub mod semantics;
pub mod gen;
pub mod equivalence;
pub mod transform;
pub mod io;
pub mod cli;
