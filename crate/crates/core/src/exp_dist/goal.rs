//! Feature sets, goals and the goal-induced telic partition.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::experience::{Experience, ExperienceDistribution};
use super::tabular::{policy_pushforward, TabularEnvironment, TabularPolicy};
use crate::error::{Result, TelicError};
use crate::scalar::Scalar;

/// Slack allowed when comparing bin widths against the sensitivity.
const WIDTH_TOL: f64 = 1e-12;

/// Membership test over experiences: the desired-property set `Phi_g`.
#[derive(Clone)]
pub enum FeatureSet {
    Members(BTreeSet<Experience>),
    Predicate(Arc<dyn Fn(&Experience) -> bool + Send + Sync>),
}

impl FeatureSet {
    pub fn from_members(members: impl IntoIterator<Item = Experience>) -> Self {
        Self::Members(members.into_iter().collect())
    }

    pub fn from_predicate(f: impl Fn(&Experience) -> bool + Send + Sync + 'static) -> Self {
        Self::Predicate(Arc::new(f))
    }

    pub fn contains(&self, h: &Experience) -> bool {
        match self {
            Self::Members(m) => m.contains(h),
            Self::Predicate(f) => f(h),
        }
    }

    /// Explicit member list, when materialized.
    pub fn members(&self) -> Option<&BTreeSet<Experience>> {
        match self {
            Self::Members(m) => Some(m),
            Self::Predicate(_) => None,
        }
    }
}

impl fmt::Debug for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Members(m) => f.debug_tuple("Members").field(m).finish(),
            Self::Predicate(_) => f.write_str("Predicate(..)"),
        }
    }
}

/// One feature-probability interval `[lo, hi)`; the last bin also holds `hi = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
pub struct Bin<T> {
    pub lo: T,
    pub hi: T,
    pub label: String,
}

impl<T: Scalar> Bin<T> {
    pub fn width(&self) -> T {
        self.hi - self.lo
    }
}

/// A goal: feature set, sensitivity and an ordered partition of `[0, 1]`.
///
/// Bins are ordered by feature probability, which is also the preference
/// order: a later bin is strictly preferred to an earlier one.
#[derive(Debug, Clone)]
pub struct Goal<T> {
    features: FeatureSet,
    epsilon: T,
    bins: Vec<Bin<T>>,
}

impl<T: Scalar> Goal<T> {
    pub fn new(features: FeatureSet, epsilon: T, bins: Vec<Bin<T>>) -> Result<Self> {
        validate_bins(epsilon, &bins)?;
        Ok(Self {
            features,
            epsilon,
            bins,
        })
    }

    /// Bins between consecutive `edges`, labelled `S0, S1, ...`.
    pub fn from_edges(features: FeatureSet, epsilon: T, edges: &[T]) -> Result<Self> {
        let bins = edges
            .windows(2)
            .enumerate()
            .map(|(i, w)| Bin {
                lo: w[0],
                hi: w[1],
                label: format!("S{i}"),
            })
            .collect();
        Self::new(features, epsilon, bins)
    }

    pub fn features(&self) -> &FeatureSet {
        &self.features
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn bins(&self) -> &[Bin<T>] {
        &self.bins
    }

    pub fn n_states(&self) -> usize {
        self.bins.len()
    }

    pub fn state(&self, index: usize) -> Option<TelicState<T>> {
        self.bins.get(index).map(|b| TelicState {
            index,
            lo: b.lo,
            hi: b.hi,
            label: b.label.clone(),
        })
    }

    pub fn states(&self) -> Vec<TelicState<T>> {
        (0..self.bins.len()).filter_map(|i| self.state(i)).collect()
    }

    pub fn state_by_label(&self, label: &str) -> Option<TelicState<T>> {
        self.bins
            .iter()
            .position(|b| b.label == label)
            .and_then(|i| self.state(i))
    }

    /// Bin containing feature probability `f` under the `[lo, hi)` convention.
    pub fn bin_index_of(&self, f: T) -> usize {
        let last = self.bins.len() - 1;
        self.bins.iter().position(|b| f < b.hi).unwrap_or(last)
    }

    /// Copy of this goal with a different bin layout.
    pub fn with_bins(&self, bins: Vec<Bin<T>>) -> Result<Self> {
        Self::new(self.features.clone(), self.epsilon, bins)
    }
}

fn validate_bins<T: Scalar>(epsilon: T, bins: &[Bin<T>]) -> Result<()> {
    if !(epsilon >= T::zero() && epsilon <= T::one()) {
        return Err(TelicError::InvalidGoal(format!("sensitivity {epsilon} outside [0, 1]")));
    }
    let (first, last) = match (bins.first(), bins.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(TelicError::InvalidGoal("no bins".into())),
    };
    if first.lo != T::zero() || last.hi != T::one() {
        return Err(TelicError::InvalidGoal("bins must cover [0, 1]".into()));
    }
    for w in bins.windows(2) {
        if w[0].hi != w[1].lo {
            return Err(TelicError::InvalidGoal(format!(
                "bins `{}` and `{}` are not contiguous",
                w[0].label, w[1].label
            )));
        }
    }
    for b in bins {
        if b.width() + T::lit(WIDTH_TOL) < epsilon || b.width() <= T::zero() {
            return Err(TelicError::InvalidGoal(format!(
                "bin `{}` of width {} is narrower than the sensitivity {epsilon}",
                b.label,
                b.width()
            )));
        }
    }
    let labels: BTreeSet<&str> = bins.iter().map(|b| b.label.as_str()).collect();
    if labels.len() != bins.len() {
        return Err(TelicError::InvalidGoal("duplicate bin labels".into()));
    }
    Ok(())
}

/// An equivalence class of the telic partition: one bin of a goal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TelicState<T> {
    pub index: usize,
    pub lo: T,
    pub hi: T,
    pub label: String,
}

impl<T: Scalar> TelicState<T> {
    /// Point of the closed bin nearest to `f`.
    pub fn nearest_point(&self, f: T) -> T {
        f.max(self.lo).min(self.hi)
    }

    pub fn is_last(&self, goal: &Goal<T>) -> bool {
        self.index + 1 == goal.n_states()
    }

    pub fn contains(&self, goal: &Goal<T>, f: T) -> bool {
        goal.bin_index_of(f) == self.index
    }
}

/// Outcome of comparing two experience distributions under a goal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preference {
    /// First argument strictly preferred.
    First,
    /// Second argument strictly preferred.
    Second,
    /// Indistinguishable at the goal's sensitivity.
    Equivalent,
}

/// `sum_{h in Phi} P(h)`.
pub fn feature_probability<T: Scalar>(p: &ExperienceDistribution<T>, phi: &FeatureSet) -> T {
    p.entries()
        .iter()
        .filter(|(h, _)| phi.contains(h))
        .map(|(_, m)| *m)
        .sum::<T>()
        .min(T::one())
}

/// Pairwise sensitivity-limited preference.
pub fn prefers<T: Scalar>(a: &ExperienceDistribution<T>, b: &ExperienceDistribution<T>, goal: &Goal<T>) -> Preference {
    compare_feature_probabilities(
        feature_probability(a, goal.features()),
        feature_probability(b, goal.features()),
        goal.epsilon(),
    )
}

pub fn compare_feature_probabilities<T: Scalar>(fa: T, fb: T, epsilon: T) -> Preference {
    let diff = fa - fb;
    if diff.abs() <= epsilon {
        Preference::Equivalent
    } else if diff > T::zero() {
        Preference::First
    } else {
        Preference::Second
    }
}

pub fn telic_state_of<T: Scalar>(p: &ExperienceDistribution<T>, goal: &Goal<T>) -> TelicState<T> {
    state_of_feature_probability(feature_probability(p, goal.features()), goal)
}

pub fn state_of_feature_probability<T: Scalar>(f: T, goal: &Goal<T>) -> TelicState<T> {
    goal.state(goal.bin_index_of(f)).expect("bins are non-empty")
}

/// Telic state of a policy, through its length-`n` pushforward.
pub fn telic_state_of_policy<T: Scalar>(
    policy: &TabularPolicy<T>,
    env: &TabularEnvironment<T>,
    n: usize,
    goal: &Goal<T>,
) -> Result<TelicState<T>> {
    Ok(telic_state_of(&policy_pushforward(policy, env, n)?, goal))
}
