//! Closed-form quantities of the navigation task.

use super::task::{state_label, GaussianPolicy, NavTask, Region, TimeScaling, DEFAULT_STATE};
use crate::error::Result;
use crate::info_geom::{Base, DivergenceValue};
use crate::scalar::Scalar;

/// Mean and standard deviation of `x_T` started from `x_0 = 0`.
pub fn final_position_distribution<T: Scalar>(p: &GaussianPolicy<T>, task: &NavTask<T>) -> (T, T) {
    match task.time_scaling {
        TimeScaling::Direct => (p.mu, p.sigma),
        TimeScaling::Accumulate => {
            let t = T::from_usize_lossy(task.horizon);
            (t * p.mu, t.sqrt() * p.sigma)
        }
    }
}

fn interval_probability<T: Scalar>(lo: T, hi: T, mean: T, std: T) -> T {
    let k = std * T::SQRT_2();
    let half = T::lit(0.5);
    (half * (((hi - mean) / k).erf() - ((lo - mean) / k).erf())).max(T::zero())
}

/// `P(x_T in r)` under policy `p`.
pub fn region_probability<T: Scalar>(p: &GaussianPolicy<T>, task: &NavTask<T>, r: &Region<T>) -> T {
    let (m, s) = final_position_distribution(p, task);
    interval_probability(r.lo(), r.hi(), m, s)
}

/// Probabilities of every region, in region order.
pub fn region_probabilities<T: Scalar>(p: &GaussianPolicy<T>, task: &NavTask<T>) -> Vec<T> {
    let (m, s) = final_position_distribution(p, task);
    task.regions
        .iter()
        .map(|r| interval_probability(r.lo(), r.hi(), m, s))
        .collect()
}

/// Each region's probability minus the largest probability among the others.
pub fn delta_p_all<T: Scalar>(p: &GaussianPolicy<T>, task: &NavTask<T>) -> Vec<T> {
    delta_from_probabilities(&region_probabilities(p, task))
}

pub(crate) fn delta_from_probabilities<T: Scalar>(probs: &[T]) -> Vec<T> {
    (0..probs.len())
        .map(|i| {
            let rival = probs
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, q)| *q)
                .fold(T::zero(), T::max);
            probs[i] - rival
        })
        .collect()
}

/// `Delta P` toward the region labelled `region`.
pub fn delta_p<T: Scalar>(p: &GaussianPolicy<T>, task: &NavTask<T>, region: &str) -> Result<T> {
    let i = task
        .regions
        .iter()
        .position(|r| r.label == region)
        .ok_or_else(|| crate::TelicError::UnknownRegion(region.to_string()))?;
    Ok(delta_p_all(p, task)[i])
}

pub(crate) fn classify_from_deltas<T: Scalar>(deltas: &[T], task: &NavTask<T>) -> String {
    deltas
        .iter()
        .position(|d| *d >= task.epsilon)
        .map(|i| state_label(&task.regions[i].label))
        .unwrap_or_else(|| DEFAULT_STATE.to_string())
}

/// Telic state of a policy: the first region with `Delta P >= epsilon`, else `S_0`.
pub fn classify_policy<T: Scalar>(p: &GaussianPolicy<T>, task: &NavTask<T>) -> String {
    classify_from_deltas(&delta_p_all(p, task), task)
}

/// Signed slack of the membership condition for `state`: non-negative inside
/// a region state, positive inside `S_0`.
pub fn state_margin<T: Scalar>(p: &GaussianPolicy<T>, task: &NavTask<T>, state: &str) -> Result<T> {
    let deltas = delta_p_all(p, task);
    Ok(match task.region_of_state(state)? {
        Some(i) => deltas[i] - task.epsilon,
        None => task.epsilon - deltas.iter().copied().fold(T::neg_infinity(), T::max),
    })
}

/// Per-step `D(p || reference)` in nats.
pub fn complexity_nats<T: Scalar>(p: &GaussianPolicy<T>, reference: &GaussianPolicy<T>) -> T {
    let half = T::lit(0.5);
    let d = p.mu - reference.mu;
    let r2 = reference.sigma * reference.sigma;
    ((reference.sigma / p.sigma).ln() + (p.sigma * p.sigma + d * d) / (r2 + r2) - half).max(T::zero())
}

/// Policy complexity `D(p || reference)` in the requested base.
pub fn policy_complexity<T: Scalar>(
    p: &GaussianPolicy<T>,
    reference: &GaussianPolicy<T>,
    base: Base,
) -> DivergenceValue<T> {
    DivergenceValue::from_nats(complexity_nats(p, reference), base)
}
