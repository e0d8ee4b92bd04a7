//! Reference models, equivalence-preserving variants and random models.

mod build;
pub mod families;
pub mod fixtures;
pub mod random;

pub use families::{redundant_test, rename, unroll};
pub use fixtures::{countdown, countdown_double_test, countdown_unrolled, handoff, with_policy};
pub use random::{random_model, RandomSpec};
