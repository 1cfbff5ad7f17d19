use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TelicError};
use crate::scalar::Scalar;

/// Observation or action identifier: an index into the corresponding alphabet.
pub type Symbol = u32;

/// Tolerance on the total mass of a distribution.
pub const NORMALIZATION_TOL: f64 = 1e-9;
/// Totals within this distance of one are renormalized; anything further is rejected.
pub const RENORMALIZE_TOL: f64 = 1e-6;

/// A finite sequence of observation-action pairs `o1,a1,...,on,an`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Experience {
    steps: Vec<(Symbol, Symbol)>,
}

impl Experience {
    pub fn new(steps: Vec<(Symbol, Symbol)>) -> Self {
        Self { steps }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn steps(&self) -> &[(Symbol, Symbol)] {
        &self.steps
    }

    /// Interleaved `o1,a1,...` symbol sequence.
    pub fn flat(&self) -> Vec<Symbol> {
        self.steps.iter().flat_map(|&(o, a)| [o, a]).collect()
    }

    pub fn push(&mut self, observation: Symbol, action: Symbol) {
        self.steps.push((observation, action));
    }
}

impl fmt::Display for Experience {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_flat(&self.flat()))
    }
}

/// Formats an interleaved prefix with generic names: `o0,a1,o0`.
pub fn format_flat(flat: &[Symbol]) -> String {
    flat.iter()
        .enumerate()
        .map(|(i, s)| if i % 2 == 0 { format!("o{s}") } else { format!("a{s}") })
        .collect::<Vec<_>>()
        .join(",")
}

/// Finite-support probability measure over experiences.
///
/// Entries are kept sorted by experience so that iteration order, and hence
/// every derived number, is deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperienceDistribution<T> {
    entries: Vec<(Experience, T)>,
}

impl<T: Scalar> ExperienceDistribution<T> {
    /// Builds a distribution, renormalizing totals within [`RENORMALIZE_TOL`] of one.
    pub fn new(pairs: impl IntoIterator<Item = (Experience, T)>) -> Result<Self> {
        let mut entries: Vec<(Experience, T)> = pairs.into_iter().collect();
        if entries.is_empty() {
            return Err(TelicError::InvalidDistribution("empty support".into()));
        }
        for (h, m) in &entries {
            if !m.is_finite() || *m < T::zero() {
                return Err(TelicError::InvalidDistribution(format!(
                    "mass {m} for experience `{h}`"
                )));
            }
        }
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(TelicError::InvalidDistribution(format!(
                "duplicate experience `{}`",
                w[0].0
            )));
        }
        let total: T = entries.iter().map(|(_, m)| *m).sum();
        let gap = (total - T::one()).abs();
        if gap > T::lit(RENORMALIZE_TOL) {
            return Err(TelicError::InvalidDistribution(format!("masses sum to {total}")));
        }
        if gap > T::zero() {
            for (_, m) in entries.iter_mut() {
                *m /= total;
            }
        }
        Ok(Self { entries })
    }

    pub fn point_mass(h: Experience) -> Self {
        Self {
            entries: vec![(h, T::one())],
        }
    }

    /// Uniform distribution over the given distinct experiences.
    pub fn uniform(support: impl IntoIterator<Item = Experience>) -> Result<Self> {
        let support: Vec<Experience> = support.into_iter().collect();
        let m = T::one() / T::from_usize_lossy(support.len());
        Self::new(support.into_iter().map(|h| (h, m)))
    }

    pub fn entries(&self) -> &[(Experience, T)] {
        &self.entries
    }

    pub fn support(&self) -> impl Iterator<Item = &Experience> {
        self.entries.iter().map(|(h, _)| h)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Mass of `h`; zero outside the support.
    pub fn mass(&self, h: &Experience) -> T {
        self.entries
            .binary_search_by(|(e, _)| e.cmp(h))
            .map(|i| self.entries[i].1)
            .unwrap_or_else(|_| T::zero())
    }

    pub fn total_mass(&self) -> T {
        self.entries.iter().map(|(_, m)| *m).sum()
    }

    /// Index of the support entry selected by a uniform draw `u` in `[0, 1)`.
    pub fn sample_index(&self, u: T) -> usize {
        let mut acc = T::zero();
        for (i, (_, m)) in self.entries.iter().enumerate() {
            acc += *m;
            if u < acc {
                return i;
            }
        }
        // u landed in the rounding slack above the last cumulative mass
        self.entries
            .iter()
            .rposition(|(_, m)| *m > T::zero())
            .unwrap_or(self.entries.len() - 1)
    }

    /// Convex combination `t * other + (1 - t) * self` over the union of supports.
    pub fn mix(&self, other: &Self, t: T) -> Self {
        let mut acc: BTreeMap<Experience, T> = BTreeMap::new();
        for (h, m) in &self.entries {
            *acc.entry(h.clone()).or_insert_with(T::zero) += (T::one() - t) * *m;
        }
        for (h, m) in &other.entries {
            *acc.entry(h.clone()).or_insert_with(T::zero) += t * *m;
        }
        Self {
            entries: acc.into_iter().collect(),
        }
    }

    /// Total variation distance.
    pub fn total_variation(&self, other: &Self) -> T {
        let mut keys: Vec<&Experience> = self.support().chain(other.support()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .map(|h| (self.mass(h) - other.mass(h)).abs())
            .sum::<T>()
            * T::lit(0.5)
    }

    /// Builds from entries that are already sorted, distinct and normalized.
    pub(crate) fn from_sorted_unchecked(entries: Vec<(Experience, T)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        Self { entries }
    }
}

/// `P(h) = |{i : h_i = h}| / N`.
pub fn empirical_distribution<T: Scalar>(samples: &[Experience]) -> Result<ExperienceDistribution<T>> {
    if samples.is_empty() {
        return Err(TelicError::NoSamples);
    }
    let mut counts: BTreeMap<&Experience, usize> = BTreeMap::new();
    for h in samples {
        *counts.entry(h).or_default() += 1;
    }
    let n = T::from_usize_lossy(samples.len());
    let entries = counts
        .into_iter()
        .map(|(h, c)| (h.clone(), T::from_usize_lossy(c) / n))
        .collect();
    Ok(ExperienceDistribution::from_sorted_unchecked(entries))
}
