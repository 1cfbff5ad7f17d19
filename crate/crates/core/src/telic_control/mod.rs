//! Reachability of telic states under a per-update complexity budget, the
//! controllability predicate, and goal refinement by state splitting.
//!
//! The algorithms are written against [`Backend`]; [`DiscreteBackend`] covers
//! finite experience distributions and
//! [`GaussianBackend`](crate::gaussian_nav::GaussianBackend) the navigation task.

mod backend;
mod discrete;
mod reach;
mod refine;

pub use backend::Backend;
pub use discrete::DiscreteBackend;
pub use reach::{
    find_reachable_states, is_telic_controllable, verify_witnesses, ChainStep, Reachability, ReachabilityReport,
    StateReport, CHAIN_TOL,
};
pub use refine::{
    budget_limited_point, refine_goal, split_unreachable_state, RefineFailure, RefineOutcome, Refinement, SplitOf,
    SplitResult, SPLIT_TOL,
};
