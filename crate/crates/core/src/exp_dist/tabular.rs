//! History-conditioned tabular policies and environments.
//!
//! Histories are keyed by their exact interleaved prefix `o1,a1,...`: a policy
//! entry is keyed by a prefix ending in the current observation, an
//! environment entry by a prefix ending in an action (or the empty prefix).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::experience::{format_flat, Experience, ExperienceDistribution, Symbol, NORMALIZATION_TOL};
use crate::error::{Result, TelicError};
use crate::scalar::Scalar;

/// Default cap on `|O|^n * |A|^n` for exhaustive enumeration.
pub const DEFAULT_ENUMERATION_CAP: usize = 1_000_000;

/// Named observation and action alphabets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Alphabet {
    pub observations: Vec<String>,
    pub actions: Vec<String>,
}

impl Alphabet {
    pub fn new(observations: Vec<String>, actions: Vec<String>) -> Self {
        Self { observations, actions }
    }

    /// Alphabet with generic names `o0..`, `a0..`.
    pub fn generic(n_obs: usize, n_act: usize) -> Self {
        Self {
            observations: (0..n_obs).map(|i| format!("o{i}")).collect(),
            actions: (0..n_act).map(|i| format!("a{i}")).collect(),
        }
    }

    pub fn n_observations(&self) -> usize {
        self.observations.len()
    }

    pub fn n_actions(&self) -> usize {
        self.actions.len()
    }

    /// Parses an interleaved history string such as `"o0,a1,o0"`.
    pub fn parse_flat(&self, s: &str) -> Result<Vec<Symbol>> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Vec::new());
        }
        s.split(',')
            .enumerate()
            .map(|(i, tok)| {
                let tok = tok.trim();
                let table = if i % 2 == 0 { &self.observations } else { &self.actions };
                table
                    .iter()
                    .position(|x| x == tok)
                    .map(|p| p as Symbol)
                    .ok_or_else(|| TelicError::UnknownSymbol(tok.to_string()))
            })
            .collect()
    }

    pub fn parse_experience(&self, s: &str) -> Result<Experience> {
        let flat = self.parse_flat(s)?;
        if flat.len() % 2 != 0 {
            return Err(TelicError::InvalidArgument(format!(
                "experience `{s}` ends with an observation"
            )));
        }
        Ok(Experience::new(flat.chunks(2).map(|c| (c[0], c[1])).collect()))
    }

    pub fn format_flat(&self, flat: &[Symbol]) -> String {
        flat.iter()
            .enumerate()
            .map(|(i, &s)| {
                let table = if i % 2 == 0 { &self.observations } else { &self.actions };
                table.get(s as usize).cloned().unwrap_or_else(|| format!("?{s}"))
            })
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn format_experience(&self, h: &Experience) -> String {
        self.format_flat(&h.flat())
    }

    pub fn contains(&self, h: &Experience) -> bool {
        h.steps()
            .iter()
            .all(|&(o, a)| (o as usize) < self.n_observations() && (a as usize) < self.n_actions())
    }
}

fn check_prob_vector<T: Scalar>(v: &[T], width: usize, prefix: &[Symbol]) -> Result<()> {
    if v.len() != width {
        return Err(TelicError::InvalidDistribution(format!(
            "entry `{}` has {} probabilities, expected {width}",
            format_flat(prefix),
            v.len()
        )));
    }
    if v.iter().any(|p| !p.is_finite() || *p < T::zero()) {
        return Err(TelicError::InvalidDistribution(format!(
            "entry `{}` has a negative or non-finite probability",
            format_flat(prefix)
        )));
    }
    let total: T = v.iter().copied().sum();
    if (total - T::one()).abs() > T::lit(NORMALIZATION_TOL).max(T::epsilon() * T::lit(8.0)) {
        return Err(TelicError::InvalidDistribution(format!(
            "entry `{}` sums to {total}",
            format_flat(prefix)
        )));
    }
    Ok(())
}

/// `pi(a_i | o_1, a_1, ..., o_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularPolicy<T> {
    n_actions: usize,
    table: BTreeMap<Vec<Symbol>, Vec<T>>,
}

impl<T: Scalar> TabularPolicy<T> {
    pub fn new(n_actions: usize, table: BTreeMap<Vec<Symbol>, Vec<T>>) -> Result<Self> {
        for (k, v) in &table {
            if k.len() % 2 != 1 {
                return Err(TelicError::InvalidArgument(format!(
                    "policy key `{}` must end with an observation",
                    format_flat(k)
                )));
            }
            check_prob_vector(v, n_actions, k)?;
        }
        Ok(Self { n_actions, table })
    }

    /// Fills every history of length below `horizon` with `f(prefix)`.
    pub fn from_fn<F>(alphabet: &Alphabet, horizon: usize, f: F) -> Result<Self>
    where
        F: Fn(&[Symbol]) -> Vec<T>,
    {
        let mut table = BTreeMap::new();
        for prefix in enumerate_prefixes(alphabet, horizon, true)? {
            let v = f(&prefix);
            table.insert(prefix, v);
        }
        Self::new(alphabet.n_actions(), table)
    }

    /// History-independent action distribution.
    pub fn stationary(alphabet: &Alphabet, horizon: usize, probs: &[T]) -> Result<Self> {
        Self::from_fn(alphabet, horizon, |_| probs.to_vec())
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn table(&self) -> &BTreeMap<Vec<Symbol>, Vec<T>> {
        &self.table
    }

    pub fn action_probs(&self, prefix: &[Symbol]) -> Result<&[T]> {
        self.table
            .get(prefix)
            .map(Vec::as_slice)
            .ok_or_else(|| TelicError::UnknownHistory {
                prefix: format_flat(prefix),
            })
    }
}

/// `e(o_i | o_1, a_1, ..., a_{i-1})` with a fixed horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularEnvironment<T> {
    n_observations: usize,
    horizon: usize,
    table: BTreeMap<Vec<Symbol>, Vec<T>>,
}

impl<T: Scalar> TabularEnvironment<T> {
    pub fn new(n_observations: usize, horizon: usize, table: BTreeMap<Vec<Symbol>, Vec<T>>) -> Result<Self> {
        if horizon == 0 {
            return Err(TelicError::InvalidArgument(
                "environment horizon must be positive".into(),
            ));
        }
        for (k, v) in &table {
            if k.len() % 2 != 0 {
                return Err(TelicError::InvalidArgument(format!(
                    "environment key `{}` must end with an action",
                    format_flat(k)
                )));
            }
            check_prob_vector(v, n_observations, k)?;
        }
        Ok(Self {
            n_observations,
            horizon,
            table,
        })
    }

    pub fn from_fn<F>(alphabet: &Alphabet, horizon: usize, f: F) -> Result<Self>
    where
        F: Fn(&[Symbol]) -> Vec<T>,
    {
        let mut table = BTreeMap::new();
        for prefix in enumerate_prefixes(alphabet, horizon, false)? {
            let v = f(&prefix);
            table.insert(prefix, v);
        }
        Self::new(alphabet.n_observations(), horizon, table)
    }

    pub fn stationary(alphabet: &Alphabet, horizon: usize, probs: &[T]) -> Result<Self> {
        Self::from_fn(alphabet, horizon, |_| probs.to_vec())
    }

    pub fn n_observations(&self) -> usize {
        self.n_observations
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn table(&self) -> &BTreeMap<Vec<Symbol>, Vec<T>> {
        &self.table
    }

    pub fn observation_probs(&self, prefix: &[Symbol]) -> Result<&[T]> {
        self.table
            .get(prefix)
            .map(Vec::as_slice)
            .ok_or_else(|| TelicError::UnknownHistory {
                prefix: format_flat(prefix),
            })
    }
}

/// All interleaved prefixes shorter than `horizon` steps. With `policy_keys`
/// the prefixes end in an observation, otherwise in an action.
fn enumerate_prefixes(alphabet: &Alphabet, horizon: usize, policy_keys: bool) -> Result<Vec<Vec<Symbol>>> {
    let (no, na) = (alphabet.n_observations(), alphabet.n_actions());
    let per_step = (no * na) as f64;
    let count: f64 =
        (0..horizon).map(|i| per_step.powi(i as i32)).sum::<f64>() * if policy_keys { no as f64 } else { 1.0 };
    if count > DEFAULT_ENUMERATION_CAP as f64 {
        return Err(TelicError::EnumerationTooLarge {
            size: count,
            cap: DEFAULT_ENUMERATION_CAP,
        });
    }
    let mut out = Vec::new();
    let mut frontier: Vec<Vec<Symbol>> = vec![Vec::new()];
    for _ in 0..horizon {
        let mut next = Vec::with_capacity(frontier.len() * no * na);
        for p in &frontier {
            if policy_keys {
                for o in 0..no as Symbol {
                    let mut k = p.clone();
                    k.push(o);
                    out.push(k);
                }
            } else {
                out.push(p.clone());
            }
            for o in 0..no as Symbol {
                for a in 0..na as Symbol {
                    let mut k = p.clone();
                    k.extend([o, a]);
                    next.push(k);
                }
            }
        }
        frontier = next;
    }
    Ok(out)
}

/// `P_pi(h) = prod_i e(o_i | prefix) * pi(a_i | prefix, o_i)`.
///
/// A zero factor ends the product early, so histories beyond an impossible
/// prefix need no table entries.
pub fn trajectory_probability<T: Scalar>(
    policy: &TabularPolicy<T>,
    env: &TabularEnvironment<T>,
    h: &Experience,
) -> Result<T> {
    let mut prefix: Vec<Symbol> = Vec::with_capacity(2 * h.len());
    let mut p = T::one();
    for &(o, a) in h.steps() {
        let obs = env.observation_probs(&prefix)?;
        p *= obs.get(o as usize).copied().unwrap_or_else(T::zero);
        if p == T::zero() {
            return Ok(p);
        }
        prefix.push(o);
        let act = policy.action_probs(&prefix)?;
        p *= act.get(a as usize).copied().unwrap_or_else(T::zero);
        if p == T::zero() {
            return Ok(p);
        }
        prefix.push(a);
    }
    Ok(p)
}

/// Experience distribution `P_pi` over all length-`n` experiences, by enumeration.
pub fn policy_pushforward<T: Scalar>(
    policy: &TabularPolicy<T>,
    env: &TabularEnvironment<T>,
    n: usize,
) -> Result<ExperienceDistribution<T>> {
    policy_pushforward_capped(policy, env, n, DEFAULT_ENUMERATION_CAP)
}

pub fn policy_pushforward_capped<T: Scalar>(
    policy: &TabularPolicy<T>,
    env: &TabularEnvironment<T>,
    n: usize,
    cap: usize,
) -> Result<ExperienceDistribution<T>> {
    let size = ((env.n_observations() * policy.n_actions()) as f64).powi(n as i32);
    if size > cap as f64 {
        return Err(TelicError::EnumerationTooLarge { size, cap });
    }
    let mut out: Vec<(Experience, T)> = Vec::new();
    let mut stack: Vec<(Vec<Symbol>, T)> = vec![(Vec::new(), T::one())];
    while let Some((prefix, p)) = stack.pop() {
        if prefix.len() == 2 * n {
            let steps = prefix.chunks(2).map(|c| (c[0], c[1])).collect();
            out.push((Experience::new(steps), p));
            continue;
        }
        let obs = env.observation_probs(&prefix)?;
        for (o, &po) in obs.iter().enumerate() {
            if po <= T::zero() {
                continue;
            }
            let mut with_obs = prefix.clone();
            with_obs.push(o as Symbol);
            let act = policy.action_probs(&with_obs)?;
            for (a, &pa) in act.iter().enumerate() {
                if pa <= T::zero() {
                    continue;
                }
                let mut next = with_obs.clone();
                next.push(a as Symbol);
                stack.push((next, p * po * pa));
            }
        }
    }
    ExperienceDistribution::new(out)
}
