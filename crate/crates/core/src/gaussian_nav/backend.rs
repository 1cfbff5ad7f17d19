use std::marker::PhantomData;

use serde_json::json;

use super::model::{classify_policy, complexity_nats};
use super::search::{insert_region_at, nearest_policy_within_budget, project_policy_to_state};
use super::task::{GaussianPolicy, NavTask};
use crate::error::Result;
use crate::scalar::Scalar;
use crate::telic_control::Backend;

/// Navigation task as a reachability backend. Interpolation is linear in
/// `(mu, sigma)`, so every intermediate point is itself a Gaussian policy.
#[derive(Debug, Clone, Copy, Default)]
pub struct GaussianBackend<T>(PhantomData<T>);

impl<T> GaussianBackend<T> {
    pub fn new() -> Self {
        Self(PhantomData)
    }
}

impl<T: Scalar> Backend for GaussianBackend<T> {
    type Real = T;
    type Policy = GaussianPolicy<T>;
    type Goal = NavTask<T>;

    fn states(&self, goal: &NavTask<T>) -> Vec<String> {
        goal.state_labels()
    }

    fn classify(&self, goal: &NavTask<T>, policy: &GaussianPolicy<T>) -> String {
        classify_policy(policy, goal)
    }

    fn project(&self, goal: &NavTask<T>, policy: &GaussianPolicy<T>, state: &str) -> Result<(GaussianPolicy<T>, T)> {
        project_policy_to_state(policy, state, goal).map(|(p, c)| (p, c.nats()))
    }

    /// The projection when it fits the budget, else the budget-bounded policy
    /// with the largest margin toward the state.
    fn constrained_improve(
        &self,
        goal: &NavTask<T>,
        policy: &GaussianPolicy<T>,
        state: &str,
        budget: T,
    ) -> Result<GaussianPolicy<T>> {
        let (p, c) = self.project(goal, policy, state)?;
        if c <= budget {
            return Ok(p);
        }
        nearest_policy_within_budget(policy, state, goal, budget)
    }

    fn complexity(&self, policy: &GaussianPolicy<T>, reference: &GaussianPolicy<T>) -> T {
        complexity_nats(policy, reference)
    }

    fn interpolate(&self, a: &GaussianPolicy<T>, b: &GaussianPolicy<T>, t: T) -> GaussianPolicy<T> {
        GaussianPolicy {
            mu: a.mu + t * (b.mu - a.mu),
            sigma: a.sigma + t * (b.sigma - a.sigma),
        }
    }

    fn insert_intermediate(
        &self,
        goal: &NavTask<T>,
        target: &str,
        _reference: &GaussianPolicy<T>,
        midpoint: &GaussianPolicy<T>,
    ) -> Result<(NavTask<T>, String)> {
        insert_region_at(goal, target, midpoint)
    }

    fn describe(&self, policy: &GaussianPolicy<T>) -> serde_json::Value {
        json!({ "mu": policy.mu.as_f64(), "sigma": policy.sigma.as_f64() })
    }
}
