//! Goal-complexity and granularity-complexity curves.

use rayon::prelude::*;
use serde::Serialize;

use super::model::delta_p_all;
use super::search::{nearest_policy_within_budget, project_policy_to_state};
use super::task::{state_label, GaussianPolicy, NavTask, DEFAULT_STATE};
use crate::error::{Result, TelicError};
use crate::info_geom::Base;
use crate::scalar::Scalar;

/// One curve: a value per x position, `None` where absent.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct CurveSeries<T> {
    pub state: String,
    pub values: Vec<Option<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct CurveFamily<T> {
    pub x_label: String,
    pub x: Vec<T>,
    pub base: Base,
    pub series: Vec<CurveSeries<T>>,
}

/// A pair of neighbouring points (in `x` order) where the expected order
/// fails; `index` is the position of the first one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub state: String,
    pub index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    NonDecreasing,
    NonIncreasing,
}

/// Neighbouring present entries of `series`, taken in increasing `x`, that
/// break `trend` by more than `tol`.
pub fn monotonicity_violations<T: Scalar>(x: &[T], series: &CurveSeries<T>, trend: Trend, tol: T) -> Vec<Violation> {
    let mut present: Vec<(usize, T)> = series
        .values
        .iter()
        .enumerate()
        .filter_map(|(k, v)| v.map(|v| (k, v)))
        .collect();
    present.sort_by(|a, b| x[a.0].partial_cmp(&x[b.0]).unwrap_or(std::cmp::Ordering::Equal));
    present
        .windows(2)
        .filter(|w| match trend {
            Trend::NonDecreasing => w[1].1 < w[0].1 - tol,
            Trend::NonIncreasing => w[1].1 > w[0].1 + tol,
        })
        .map(|w| Violation {
            state: series.state.clone(),
            index: w[0].0,
        })
        .collect()
}

/// Best `Delta P` toward each region state as the budget grows.
///
/// `budgets` are in `base` and must be sorted ascending and non-negative.
pub fn goal_complexity_curve<T: Scalar>(
    task: &NavTask<T>,
    reference: &GaussianPolicy<T>,
    budgets: &[T],
    base: Base,
) -> Result<CurveFamily<T>> {
    if budgets.iter().any(|b| !(*b >= T::zero())) || budgets.windows(2).any(|w| w[1] < w[0]) {
        return Err(TelicError::InvalidArgument(
            "budgets must be non-negative and ascending".into(),
        ));
    }
    let to_nats = T::one() / base.from_nats_factor::<T>();
    let mut series = Vec::with_capacity(task.regions.len());
    for (i, r) in task.regions.iter().enumerate() {
        let label = state_label(&r.label);
        let values = budgets
            .par_iter()
            .map(|b| {
                let p = nearest_policy_within_budget(reference, &label, task, *b * to_nats)?;
                Ok(Some(delta_p_all(&p, task)[i]))
            })
            .collect::<Result<Vec<_>>>()?;
        series.push(CurveSeries { state: label, values });
    }
    Ok(CurveFamily {
        x_label: format!("policy complexity ({base})"),
        x: budgets.to_vec(),
        base,
        series,
    })
}

/// Complexity needed to reach each state as the sensitivity varies, against
/// `-ln(epsilon)`. States absent from the search box are `None`.
pub fn granularity_complexity_curve<T: Scalar>(
    task: &NavTask<T>,
    reference: &GaussianPolicy<T>,
    epsilons: &[T],
    base: Base,
) -> Result<CurveFamily<T>> {
    if epsilons.iter().any(|e| !(*e > T::zero() && *e < T::one())) {
        return Err(TelicError::InvalidArgument("epsilons must lie in (0, 1)".into()));
    }
    let factor = base.from_nats_factor::<T>();
    let mut series = Vec::new();
    for label in task.state_labels() {
        let values = epsilons
            .par_iter()
            .map(
                |e| match project_policy_to_state(reference, &label, &task.with_epsilon(*e)) {
                    Ok((_, c)) => Ok(Some(c.nats() * factor)),
                    Err(TelicError::StateNotFound(_)) => Ok(None),
                    Err(err) => Err(err),
                },
            )
            .collect::<Result<Vec<_>>>()?;
        series.push(CurveSeries { state: label, values });
    }
    Ok(CurveFamily {
        x_label: "-ln(epsilon)".into(),
        x: epsilons.iter().map(|e| -e.ln()).collect(),
        base,
        series,
    })
}

/// Trend each granularity curve must follow given how its state nests in
/// `epsilon`: `S_0` grows with `epsilon`, region states shrink.
pub fn granularity_trend(state: &str) -> Trend {
    if state == DEFAULT_STATE {
        Trend::NonDecreasing
    } else {
        Trend::NonIncreasing
    }
}
