//! Online min-sum set cover at desk scale: a deterministic lazy move-to-front
//! algorithm with exact rational budgets, potential-function auditors that
//! mechanically check its amortized guarantees on live traces, brute-force
//! offline oracles, and the adaptive adversary that pins its competitive
//! ratio from below.
//!
//! The cost model: a list of `n` elements is maintained as a permutation;
//! serving a request (a set of at most `r` elements) costs the position of
//! its front-most element, and reordering afterwards costs one per adjacent
//! swap (equivalently, the inversion distance between consecutive lists).

pub mod adversary;
pub mod dlm;
pub mod error;
pub mod instance;
pub mod offline;
pub mod perm;
pub mod potentials;
pub mod rational;

pub use error::{Error, Result};
pub use instance::{access_cost, Instance, Request, StepCost};
pub use perm::{position_decompose, ElementId, Permutation};
pub use rational::Ratio;
