//! Recursive search for telic states reachable through budget-bounded updates.

use std::collections::BTreeMap;

use num_traits::{Float, Zero};
use serde::{Deserialize, Serialize};

use super::backend::Backend;
use crate::error::{Result, TelicError};
use crate::info_geom::{Base, DivergenceValue};
use crate::scalar::Scalar;

/// Slack on the per-step budget when checking chains.
pub const CHAIN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainStep {
    pub policy: serde_json::Value,
    pub state: String,
    /// Complexity of this policy relative to the previous one; zero at the start.
    pub step_complexity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateReport {
    pub label: String,
    pub reachable: bool,
    /// Projection divergence from the default policy; `None` when infinite or unavailable.
    pub telic_distance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReachabilityReport {
    pub base: Base,
    /// Per-step budget; `None` when unbounded.
    pub delta: Option<f64>,
    pub default_state: String,
    pub states: Vec<StateReport>,
    /// Witness chain per reachable state, starting at the default policy.
    pub chains: BTreeMap<String, Vec<ChainStep>>,
    pub unreachable: Vec<String>,
}

impl ReachabilityReport {
    pub fn is_controllable(&self) -> bool {
        self.unreachable.is_empty()
    }

    /// Number of updates `N` in the chain to `state`.
    pub fn chain_length(&self, state: &str) -> Option<usize> {
        self.chains.get(state).map(|c| c.len() - 1)
    }
}

/// Report plus the typed policies of every chain.
#[derive(Debug, Clone)]
pub struct Reachability<P> {
    pub report: ReachabilityReport,
    pub witnesses: BTreeMap<String, Vec<P>>,
}

type Chain<P, T> = Vec<(P, String, T)>;

struct Sweep<'a, B: Backend> {
    backend: &'a B,
    goal: &'a B::Goal,
    budget: B::Real,
    labels: Vec<String>,
    reached: BTreeMap<String, Chain<B::Policy, B::Real>>,
    diagnostics: BTreeMap<String, String>,
}

impl<B: Backend> Sweep<'_, B> {
    fn explore(&mut self, chain: Chain<B::Policy, B::Real>) {
        let current = chain.last().expect("chain is never empty").0.clone();
        let mut order: Vec<(B::Real, String)> = self
            .labels
            .iter()
            .filter(|l| !self.reached.contains_key(*l))
            .map(|l| {
                let d = self
                    .backend
                    .project(self.goal, &current, l)
                    .map(|(_, d)| d)
                    .unwrap_or_else(|_| B::Real::infinity());
                (d, l.clone())
            })
            .collect();
        order.sort_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| a.1.cmp(&b.1))
        });

        for (_, label) in order {
            if self.reached.contains_key(&label) {
                continue;
            }
            let next = match self
                .backend
                .constrained_improve(self.goal, &current, &label, self.budget)
            {
                Ok(p) => p,
                Err(e) => {
                    self.diagnostics.insert(label, e.to_string());
                    continue;
                }
            };
            let step = self.backend.complexity(&next, &current);
            if !(step <= self.budget + B::Real::lit(CHAIN_TOL)) {
                self.diagnostics.insert(
                    label,
                    format!("optimizer returned a step of complexity {step} over budget"),
                );
                continue;
            }
            let landed = self.backend.classify(self.goal, &next);
            if self.reached.contains_key(&landed) {
                continue;
            }
            let mut extended = chain.clone();
            extended.push((next, landed.clone(), step));
            self.reached.insert(landed, extended.clone());
            self.explore(extended);
        }
    }
}

fn finite_or_none<T: Scalar>(x: T) -> Option<f64> {
    x.is_finite().then(|| x.as_f64())
}

/// Every state reachable from `pi0` by a chain of updates each within `delta`.
///
/// From each newly reached policy the remaining states are attempted in order
/// of projection divergence (ties by label); every attempt that lands in a new
/// state extends the chain and recurses. Optimizer failures are recorded as
/// diagnostics on the state.
pub fn find_reachable_states<B: Backend>(
    pi0: &B::Policy,
    goal: &B::Goal,
    delta: DivergenceValue<B::Real>,
    backend: &B,
) -> Result<Reachability<B::Policy>> {
    if !(delta.value >= B::Real::zero()) {
        return Err(TelicError::InvalidArgument(format!(
            "budget {} is negative",
            delta.value
        )));
    }
    let base = delta.base;
    let factor = base.from_nats_factor::<B::Real>();
    let labels = backend.states(goal);
    let start = backend.classify(goal, pi0);
    let mut sweep = Sweep {
        backend,
        goal,
        budget: delta.nats(),
        labels: labels.clone(),
        reached: BTreeMap::new(),
        diagnostics: BTreeMap::new(),
    };
    let root = vec![(pi0.clone(), start.clone(), B::Real::zero())];
    sweep.reached.insert(start.clone(), root.clone());
    sweep.explore(root);

    let states = labels
        .iter()
        .map(|l| {
            let reachable = sweep.reached.contains_key(l);
            let telic_distance = match backend.project(goal, pi0, l) {
                Ok((_, d)) => finite_or_none(d * factor),
                Err(_) => None,
            };
            let diagnostic = (!reachable).then(|| {
                sweep
                    .diagnostics
                    .get(l)
                    .cloned()
                    .unwrap_or_else(|| "no budget-bounded chain lands in this state".to_string())
            });
            StateReport {
                label: l.clone(),
                reachable,
                telic_distance,
                diagnostic,
            }
        })
        .collect();
    let unreachable = labels
        .iter()
        .filter(|l| !sweep.reached.contains_key(*l))
        .cloned()
        .collect();
    let chains = sweep
        .reached
        .iter()
        .map(|(l, c)| {
            let steps = c
                .iter()
                .map(|(p, s, d)| ChainStep {
                    policy: backend.describe(p),
                    state: s.clone(),
                    step_complexity: (*d * factor).as_f64(),
                })
                .collect();
            (l.clone(), steps)
        })
        .collect();
    let witnesses = sweep
        .reached
        .into_iter()
        .map(|(l, c)| (l, c.into_iter().map(|(p, _, _)| p).collect()))
        .collect();
    Ok(Reachability {
        report: ReachabilityReport {
            base,
            delta: finite_or_none(delta.value),
            default_state: start,
            states,
            chains,
            unreachable,
        },
        witnesses,
    })
}

/// Whether every state of `goal` is reachable, with the report either way.
pub fn is_telic_controllable<B: Backend>(
    pi0: &B::Policy,
    goal: &B::Goal,
    delta: DivergenceValue<B::Real>,
    backend: &B,
) -> Result<(bool, Reachability<B::Policy>)> {
    let r = find_reachable_states(pi0, goal, delta, backend)?;
    Ok((r.report.is_controllable(), r))
}

/// Re-checks every witness chain against the controllability conditions: it
/// starts at `pi0`, each policy lies in its recorded state, each update stays
/// within `delta`, and it ends in the state it is filed under.
pub fn verify_witnesses<B: Backend>(
    reach: &Reachability<B::Policy>,
    pi0: &B::Policy,
    goal: &B::Goal,
    delta: DivergenceValue<B::Real>,
    backend: &B,
) -> std::result::Result<(), String> {
    let budget = delta.nats() + B::Real::lit(CHAIN_TOL);
    for (label, policies) in &reach.witnesses {
        let steps = reach
            .report
            .chains
            .get(label)
            .ok_or_else(|| format!("no reported chain for `{label}`"))?;
        if steps.len() != policies.len() {
            return Err(format!("chain for `{label}` has mismatched lengths"));
        }
        if policies.first() != Some(pi0) {
            return Err(format!("chain for `{label}` does not start at the default policy"));
        }
        for (t, (p, step)) in policies.iter().zip(steps).enumerate() {
            let s = backend.classify(goal, p);
            if s != step.state {
                return Err(format!(
                    "`{label}` step {t}: policy is in `{s}`, recorded `{}`",
                    step.state
                ));
            }
            if t > 0 {
                let c = backend.complexity(p, &policies[t - 1]);
                if !(c <= budget) {
                    return Err(format!("`{label}` step {t}: complexity {c} exceeds the budget"));
                }
            }
        }
        if steps.last().map(|s| s.state.as_str()) != Some(label.as_str()) {
            return Err(format!("chain for `{label}` ends elsewhere"));
        }
    }
    Ok(())
}
