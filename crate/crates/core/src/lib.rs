//! Skew Bollobás set-pair systems.
//!
//! A set-pair system is an ordered list of disjoint pairs `(A_i, B_i)`; it
//! is skew when `A_i ∩ B_j ≠ ∅` for every `i < j`. With caps `|A_i| ≤ a`,
//! `|B_i| ≤ b` the largest possible `|∪ A_i|` is `C(a+b+1, a) − 1` and the
//! largest `|∪ B_i|` is `C(a+b+1, a+1) − 1`. This crate builds systems that
//! reach those values, peels exact-size systems into checkable certificates
//! of the upper bound, and confirms everything on small ground sets with an
//! exhaustive search.

pub mod bounds;
pub mod cli;
pub mod construct;
pub mod format;
pub mod peel;
pub mod search;
pub mod set;
pub mod system;

pub use bounds::{binomial, binomial_checked, bound_table, identity_check, BoundTable, Count};
pub use construct::{construction_trace, extremal_system};
pub use format::{parse_certificate, render_certificate, ParseError, SystemFile};
pub use peel::{minimal_union_subset, peel, verify_certificate, PeelCertificate, PeelError};
pub use search::{
    enumerate_systems, max_objective, Mode, Objective, SearchOptions, SearchProblem, SearchResult,
};
pub use set::ElementSet;
pub use system::{SetPair, SetPairSystem, SystemError, SystemReport};

/// Exact integer used for every closed-form value.
pub type Exact = num_bigint::BigUint;

/// Bound table in exact arithmetic.
pub type ExactBoundTable = BoundTable<Exact>;

/// Bound table in 64-bit arithmetic; building one reports overflow.
pub type BoundTable64 = BoundTable<u64>;
