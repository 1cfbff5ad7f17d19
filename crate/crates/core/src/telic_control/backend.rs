use std::fmt::Debug;

use crate::error::Result;
use crate::scalar::Scalar;

/// Operations the reachability and refinement algorithms need from a setting.
///
/// States are addressed by label. Divergences and budgets are in nats.
pub trait Backend {
    type Real: Scalar;
    type Policy: Clone + Debug + PartialEq;
    type Goal: Clone + Debug;

    /// All telic states of `goal`, in a fixed order.
    fn states(&self, goal: &Self::Goal) -> Vec<String>;

    /// Label of the state `policy` falls in.
    fn classify(&self, goal: &Self::Goal, policy: &Self::Policy) -> String;

    /// Least-complexity member of `state` relative to `policy`, with its complexity.
    fn project(&self, goal: &Self::Goal, policy: &Self::Policy, state: &str) -> Result<(Self::Policy, Self::Real)>;

    /// A policy within `budget` of `policy` that moves toward `state`, landing
    /// inside it when the budget allows.
    fn constrained_improve(
        &self,
        goal: &Self::Goal,
        policy: &Self::Policy,
        state: &str,
        budget: Self::Real,
    ) -> Result<Self::Policy>;

    /// `D(policy || reference)`.
    fn complexity(&self, policy: &Self::Policy, reference: &Self::Policy) -> Self::Real;

    /// Point at fraction `t` of the way from `a` to `b`.
    fn interpolate(&self, a: &Self::Policy, b: &Self::Policy, t: Self::Real) -> Self::Policy;

    /// Adds a state around `midpoint`, ordered between the state of `reference`
    /// and `target`. Returns the new goal and the new state's label.
    fn insert_intermediate(
        &self,
        goal: &Self::Goal,
        target: &str,
        reference: &Self::Policy,
        midpoint: &Self::Policy,
    ) -> Result<(Self::Goal, String)>;

    /// JSON description of a policy for reports.
    fn describe(&self, policy: &Self::Policy) -> serde_json::Value;
}
