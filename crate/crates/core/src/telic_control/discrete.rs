//! Backend over finite experience distributions.
//!
//! Every distribution is treated as realizable, so policies are identified
//! with their pushforwards. Moves toward a state follow the exponential
//! family through the current distribution, along which the complexity is
//! the binary KL of the feature probability.

use std::marker::PhantomData;

use serde_json::json;

use super::backend::Backend;
use crate::error::{Result, TelicError};
use crate::exp_dist::{
    feature_probability, state_of_feature_probability, Bin, ExperienceDistribution, Goal, TelicState,
};
use crate::info_geom::{binary_kl, kl_nats, tilt};
use crate::numeric::bisect_last_feasible;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, Default)]
pub struct DiscreteBackend<T>(PhantomData<T>);

impl<T> DiscreteBackend<T> {
    pub fn new() -> Self {
        Self(PhantomData)
    }
}

fn state<T: Scalar>(goal: &Goal<T>, label: &str) -> Result<TelicState<T>> {
    goal.state_by_label(label)
        .ok_or_else(|| TelicError::UnknownState(label.to_string()))
}

/// Tilt of `q` to feature probability `c`, moved inward until it classifies
/// into `s` (bin edges are half-open and rounding can land on the wrong side).
fn tilt_into<T: Scalar>(
    q: &ExperienceDistribution<T>,
    goal: &Goal<T>,
    s: &TelicState<T>,
    c: T,
) -> Result<ExperienceDistribution<T>> {
    let mid = (s.lo + s.hi) * T::lit(0.5);
    let mut step = T::epsilon();
    let mut x = c;
    for _ in 0..64 {
        let p = tilt(q, goal.features(), x)?;
        if s.contains(goal, feature_probability(&p, goal.features())) {
            return Ok(p);
        }
        x = if c < mid {
            (c + step).min(mid)
        } else {
            (c - step).max(mid)
        };
        step = step + step;
    }
    Err(TelicError::StateNotFound(s.label.clone()))
}

fn fresh_label<T: Scalar>(goal: &Goal<T>, stem: &str) -> String {
    let taken = |l: &str| goal.bins().iter().any(|b| b.label == l);
    if !taken(stem) {
        return stem.to_string();
    }
    (2..).map(|k| format!("{stem}{k}")).find(|l| !taken(l)).unwrap()
}

impl<T: Scalar> Backend for DiscreteBackend<T> {
    type Real = T;
    type Policy = ExperienceDistribution<T>;
    type Goal = Goal<T>;

    fn states(&self, goal: &Goal<T>) -> Vec<String> {
        goal.bins().iter().map(|b| b.label.clone()).collect()
    }

    fn classify(&self, goal: &Goal<T>, policy: &ExperienceDistribution<T>) -> String {
        state_of_feature_probability(feature_probability(policy, goal.features()), goal).label
    }

    fn project(
        &self,
        goal: &Goal<T>,
        policy: &ExperienceDistribution<T>,
        label: &str,
    ) -> Result<(ExperienceDistribution<T>, T)> {
        let s = state(goal, label)?;
        let f = feature_probability(policy, goal.features());
        if s.contains(goal, f) {
            return Ok((policy.clone(), T::zero()));
        }
        let p = tilt_into(policy, goal, &s, s.nearest_point(f)).map_err(|_| TelicError::AbsoluteContinuity {
            state: label.to_string(),
        })?;
        let c = feature_probability(&p, goal.features());
        Ok((p, binary_kl(c, f)))
    }

    fn constrained_improve(
        &self,
        goal: &Goal<T>,
        policy: &ExperienceDistribution<T>,
        label: &str,
        budget: T,
    ) -> Result<ExperienceDistribution<T>> {
        let (target, cost) = self.project(goal, policy, label)?;
        if cost <= budget {
            return Ok(target);
        }
        let f = feature_probability(policy, goal.features());
        let c_target = feature_probability(&target, goal.features());
        let s = bisect_last_feasible(T::zero(), T::one(), T::lit(1e-12), |s| {
            binary_kl(f + s * (c_target - f), f) <= budget
        })?;
        tilt(policy, goal.features(), f + s * (c_target - f))
    }

    fn complexity(&self, policy: &ExperienceDistribution<T>, reference: &ExperienceDistribution<T>) -> T {
        kl_nats(policy, reference)
    }

    fn interpolate(
        &self,
        a: &ExperienceDistribution<T>,
        b: &ExperienceDistribution<T>,
        t: T,
    ) -> ExperienceDistribution<T> {
        a.mix(b, t)
    }

    /// Carves `[f_M - epsilon, lo)` out of the bin below `target` when moving
    /// up (mirrored when moving down), where `f_M` is the midpoint's feature
    /// probability.
    fn insert_intermediate(
        &self,
        goal: &Goal<T>,
        target: &str,
        _reference: &ExperienceDistribution<T>,
        midpoint: &ExperienceDistribution<T>,
    ) -> Result<(Goal<T>, String)> {
        let s = state(goal, target)?;
        let f_m = feature_probability(midpoint, goal.features());
        let eps = goal.epsilon();
        let label = fresh_label(goal, "M");
        let mut bins: Vec<Bin<T>> = goal.bins().to_vec();
        let collapsed = || TelicError::SplitCollapsed(target.to_string());
        if f_m < s.lo {
            let k = s.index.checked_sub(1).ok_or_else(collapsed)?;
            let nb = bins[k].clone();
            let lo = (f_m - eps).max(nb.lo);
            if lo - nb.lo < eps || s.lo - lo < eps {
                return Err(collapsed());
            }
            bins[k].hi = lo;
            bins.insert(
                k + 1,
                Bin {
                    lo,
                    hi: s.lo,
                    label: label.clone(),
                },
            );
        } else if f_m >= s.hi && !s.is_last(goal) {
            let k = s.index + 1;
            let nb = bins[k].clone();
            let hi = (f_m + eps).min(nb.hi);
            if nb.hi - hi < eps || hi - s.hi < eps {
                return Err(collapsed());
            }
            bins[k].lo = hi;
            bins.insert(
                k,
                Bin {
                    lo: s.hi,
                    hi,
                    label: label.clone(),
                },
            );
        } else {
            return Err(TelicError::NoSplitNeeded(target.to_string()));
        }
        let out = goal.with_bins(bins)?;
        if self.classify(&out, midpoint) != label {
            return Err(collapsed());
        }
        Ok((out, label))
    }

    fn describe(&self, policy: &ExperienceDistribution<T>) -> serde_json::Value {
        let entries: Vec<_> = policy
            .entries()
            .iter()
            .map(|(h, m)| json!({ "experience": h.to_string(), "mass": m.as_f64() }))
            .collect();
        json!({ "distribution": entries })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exp_dist::{Experience, FeatureSet};
    use crate::info_geom::{Base, DivergenceValue};
    use crate::telic_control::{find_reachable_states, refine_goal, split_unreachable_state, verify_witnesses};

    fn binary(q: f64, edges: &[f64], eps: f64) -> (ExperienceDistribution<f64>, Goal<f64>) {
        let (a, b) = (Experience::new(vec![(0, 1)]), Experience::new(vec![(0, 0)]));
        let d = ExperienceDistribution::new(vec![(a.clone(), q), (b, 1.0 - q)]).unwrap();
        (d, Goal::from_edges(FeatureSet::from_members([a]), eps, edges).unwrap())
    }

    fn nats(x: f64) -> DivergenceValue<f64> {
        DivergenceValue::from_nats(x, Base::Nats)
    }

    #[test]
    fn zero_budget_reaches_only_own_state() {
        let (q, g) = binary(0.3, &[0.0, 0.5, 0.9, 1.0], 0.05);
        let r = find_reachable_states(&q, &g, nats(0.0), &DiscreteBackend::new()).unwrap();
        assert_eq!(r.report.chains.keys().collect::<Vec<_>>(), vec!["S0"]);
        assert_eq!(r.report.unreachable, vec!["S1", "S2"]);
    }

    #[test]
    fn unbounded_budget_reaches_all() {
        let (q, g) = binary(0.3, &[0.0, 0.5, 0.9, 1.0], 0.05);
        let be = DiscreteBackend::new();
        let r = find_reachable_states(&q, &g, DivergenceValue::infinite(Base::Nats), &be).unwrap();
        assert!(r.report.is_controllable());
        assert!(r.report.chains.values().all(|c| c.len() <= 3));
        verify_witnesses(&r, &q, &g, DivergenceValue::infinite(Base::Nats), &be).unwrap();
    }

    #[test]
    fn chain_passes_through_middle_bin() {
        let (q, g) = binary(0.3, &[0.0, 0.5, 0.9, 1.0], 0.05);
        let be = DiscreteBackend::new();
        let r = find_reachable_states(&q, &g, nats(0.4), &be).unwrap();
        assert!(r.report.is_controllable());
        assert_eq!(r.report.chain_length("S2"), Some(2));
        verify_witnesses(&r, &q, &g, nats(0.4), &be).unwrap();
    }

    #[test]
    fn split_bisection_hits_budget() {
        let (q, g) = binary(0.3, &[0.0, 0.9, 1.0], 0.1);
        let be = DiscreteBackend::new();
        let d = binary_kl(0.9, 0.3);
        let split = split_unreachable_state(&q, &g, "S1", nats(d / 2.0), &be).unwrap();
        let c = be.complexity(&split.midpoint, &q);
        assert!((c - d / 2.0).abs() <= 1e-6);
        let beyond = be.interpolate(&q, &be.project(&g, &q, "S1").unwrap().0, split.t_star + 1e-4);
        assert!(be.complexity(&beyond, &q) > d / 2.0);
        assert_eq!(split.new_state.as_deref(), Some("M"));
    }

    #[test]
    fn split_within_budget_is_projection() {
        let (q, g) = binary(0.3, &[0.0, 0.9, 1.0], 0.1);
        let be = DiscreteBackend::new();
        let split = split_unreachable_state(&q, &g, "S1", nats(1.0), &be).unwrap();
        assert_eq!(split.t_star, 1.0);
        assert!(split.new_state.is_none());
    }

    #[test]
    fn refinement_inserts_two_states_at_a_third() {
        let (q, g) = binary(0.3, &[0.0, 0.9, 1.0], 0.1);
        let be = DiscreteBackend::new();
        let delta = nats(binary_kl(0.9, 0.3) / 3.0);
        let out = refine_goal(&q, &g, delta, &be, 5).unwrap();
        assert_eq!(out.inserted.len(), 2);
        assert_eq!(out.rounds, 2);
        assert_eq!(out.goal.n_states(), 4);
        verify_witnesses(&out.reach, &q, &out.goal, delta, &be).unwrap();
    }

    #[test]
    fn controllable_goal_is_unchanged() {
        let (q, g) = binary(0.3, &[0.0, 0.5, 1.0], 0.05);
        let out = refine_goal(&q, &g, nats(5.0), &DiscreteBackend::new(), 3).unwrap();
        assert_eq!(out.rounds, 0);
        assert_eq!(out.goal.bins(), g.bins());
    }

    #[test]
    fn oversized_epsilon_collapses() {
        let (q, g) = binary(0.3, &[0.0, 0.5, 1.0], 0.45);
        let err = refine_goal(&q, &g, nats(0.01), &DiscreteBackend::new(), 3).unwrap_err();
        assert_eq!(err.error, TelicError::SplitCollapsed("S1".into()));
    }
}
