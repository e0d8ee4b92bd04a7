//! Isomorphism, simulations and equivalences between proto-algorithms, with
//! executable checks of their consequences for runs and computed functions.

pub mod error;
pub mod iso;
pub mod lemma;
pub mod simulation;

pub use error::EquivalenceError;
pub use iso::{check_isomorphism, check_isomorphism_bounded, verify_isomorphism, IsomorphismWitness};
pub use lemma::{lift_run, verify_theorem1, ClauseStatus, Theorem1Report};
pub use simulation::{
    check_equivalence, greatest_simulation, relate, translations, verify_equivalence,
    verify_simulation, Check, CoverageFailure, EquivalenceReport, Side, SimulationRelation,
    ValueMap, DEFAULT_PAIR_CAP,
};
