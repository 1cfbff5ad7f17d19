//! JSON form of a discrete tabular instance.
//!
//! ```json
//! {
//!   "alphabet": { "observations": ["o0"], "actions": ["a0", "a1"] },
//!   "horizon": 1,
//!   "environment": { "": [1.0] },
//!   "policy": { "o0": [0.7, 0.3] },
//!   "features": ["o0,a1"],
//!   "epsilon": 0.1,
//!   "bins": [{ "lo": 0.0, "hi": 0.6, "label": "S0" }, { "lo": 0.6, "hi": 1.0, "label": "S1" }]
//! }
//! ```
//!
//! Table keys are interleaved history strings. A `distribution` array of
//! `{"experience", "mass"}` records may be given instead of `policy` and
//! `environment`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::experience::ExperienceDistribution;
use super::goal::{Bin, FeatureSet, Goal};
use super::tabular::{policy_pushforward, Alphabet, TabularEnvironment, TabularPolicy};
use crate::error::{Result, TelicError};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MassRecord {
    pub experience: String,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscreteInstance {
    pub alphabet: Alphabet,
    pub horizon: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub environment: Option<BTreeMap<String, Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<BTreeMap<String, Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distribution: Option<Vec<MassRecord>>,
    pub features: Vec<String>,
    pub epsilon: f64,
    pub bins: Vec<Bin<f64>>,
}

impl DiscreteInstance {
    pub fn environment<T: Scalar>(&self) -> Result<Option<TabularEnvironment<T>>> {
        let Some(table) = &self.environment else {
            return Ok(None);
        };
        let mut out = BTreeMap::new();
        for (k, v) in table {
            out.insert(self.alphabet.parse_flat(k)?, v.iter().map(|&x| T::lit(x)).collect());
        }
        TabularEnvironment::new(self.alphabet.n_observations(), self.horizon.max(1), out).map(Some)
    }

    pub fn policy<T: Scalar>(&self) -> Result<Option<TabularPolicy<T>>> {
        let Some(table) = &self.policy else { return Ok(None) };
        let mut out = BTreeMap::new();
        for (k, v) in table {
            out.insert(self.alphabet.parse_flat(k)?, v.iter().map(|&x| T::lit(x)).collect());
        }
        TabularPolicy::new(self.alphabet.n_actions(), out).map(Some)
    }

    /// The default experience distribution: the explicit `distribution`, or
    /// the pushforward of `policy` through `environment`.
    pub fn default_distribution<T: Scalar>(&self) -> Result<ExperienceDistribution<T>> {
        if let Some(records) = &self.distribution {
            return decode_distribution(&self.alphabet, records);
        }
        match (self.policy::<T>()?, self.environment::<T>()?) {
            (Some(p), Some(e)) => policy_pushforward(&p, &e, self.horizon),
            _ => Err(TelicError::InvalidArgument(
                "instance needs either `distribution` or both `policy` and `environment`".into(),
            )),
        }
    }

    pub fn goal<T: Scalar>(&self) -> Result<Goal<T>> {
        let members = self
            .features
            .iter()
            .map(|s| self.alphabet.parse_experience(s))
            .collect::<Result<Vec<_>>>()?;
        let bins = self
            .bins
            .iter()
            .map(|b| Bin {
                lo: T::lit(b.lo),
                hi: T::lit(b.hi),
                label: b.label.clone(),
            })
            .collect();
        Goal::new(FeatureSet::from_members(members), T::lit(self.epsilon), bins)
    }
}

pub fn decode_distribution<T: Scalar>(
    alphabet: &Alphabet,
    records: &[MassRecord],
) -> Result<ExperienceDistribution<T>> {
    let pairs = records
        .iter()
        .map(|r| Ok((alphabet.parse_experience(&r.experience)?, T::lit(r.mass))))
        .collect::<Result<Vec<_>>>()?;
    ExperienceDistribution::new(pairs)
}

pub fn encode_distribution<T: Scalar>(alphabet: &Alphabet, p: &ExperienceDistribution<T>) -> Vec<MassRecord> {
    p.entries()
        .iter()
        .map(|(h, m)| MassRecord {
            experience: alphabet.format_experience(h),
            mass: m.as_f64(),
        })
        .collect()
}

/// Serializable view of a goal with an explicit feature list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoalRecord {
    pub features: Vec<String>,
    pub epsilon: f64,
    pub bins: Vec<Bin<f64>>,
}

impl GoalRecord {
    pub fn from_goal<T: Scalar>(alphabet: &Alphabet, goal: &Goal<T>) -> Self {
        let features = goal
            .features()
            .members()
            .map(|m| m.iter().map(|h| alphabet.format_experience(h)).collect())
            .unwrap_or_default();
        Self {
            features,
            epsilon: goal.epsilon().as_f64(),
            bins: goal
                .bins()
                .iter()
                .map(|b| Bin {
                    lo: b.lo.as_f64(),
                    hi: b.hi.as_f64(),
                    label: b.label.clone(),
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exp_dist::goal::feature_probability;

    const INSTANCE: &str = r#"{
        "alphabet": {"observations": ["o0"], "actions": ["a0", "a1"]},
        "horizon": 1,
        "environment": {"": [1.0]},
        "policy": {"o0": [0.7, 0.3]},
        "features": ["o0,a1"],
        "epsilon": 0.1,
        "bins": [{"lo": 0.0, "hi": 0.6, "label": "S0"}, {"lo": 0.6, "hi": 1.0, "label": "S1"}]
    }"#;

    #[test]
    fn decodes_instance() {
        let inst: DiscreteInstance = serde_json::from_str(INSTANCE).unwrap();
        let p = inst.default_distribution::<f64>().unwrap();
        let g = inst.goal::<f64>().unwrap();
        assert!((feature_probability(&p, g.features()) - 0.3).abs() < 1e-15);
        let back = GoalRecord::from_goal(&inst.alphabet, &g);
        assert_eq!(back.features, vec!["o0,a1".to_string()]);
        assert_eq!(back.bins, inst.bins);
    }

    #[test]
    fn rejects_unknown_fields() {
        let bad = INSTANCE.replacen("\"horizon\"", "\"horizn\": 2, \"horizon\"", 1);
        assert!(serde_json::from_str::<DiscreteInstance>(&bad).is_err());
    }

    #[test]
    fn distribution_records_round_trip() {
        let alpha = Alphabet::generic(2, 2);
        let recs = vec![
            MassRecord {
                experience: "o0,a1".into(),
                mass: 0.25,
            },
            MassRecord {
                experience: "o1,a0".into(),
                mass: 0.75,
            },
        ];
        let p = decode_distribution::<f64>(&alpha, &recs).unwrap();
        assert_eq!(encode_distribution(&alpha, &p), recs);
    }
}
