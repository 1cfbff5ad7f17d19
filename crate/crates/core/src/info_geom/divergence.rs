use std::fmt;

use serde::{Deserialize, Serialize};

use crate::exp_dist::ExperienceDistribution;
use crate::scalar::{xlogx_over_y, Scalar};

/// Logarithm base of a reported divergence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Base {
    #[default]
    Nats,
    Bits,
}

impl Base {
    /// Multiplier taking a value in nats to this base.
    pub fn from_nats_factor<T: Scalar>(self) -> T {
        match self {
            Base::Nats => T::one(),
            Base::Bits => T::LOG2_E(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Base::Nats => "nats",
            Base::Bits => "bits",
        }
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Base {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nats" => Ok(Base::Nats),
            "bits" => Ok(Base::Bits),
            other => Err(format!("unknown base `{other}` (expected nats or bits)")),
        }
    }
}

/// A non-negative divergence, possibly `+inf`, tagged with its base.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
pub struct DivergenceValue<T> {
    pub value: T,
    pub base: Base,
}

impl<T: Scalar> DivergenceValue<T> {
    pub fn from_nats(nats: T, base: Base) -> Self {
        Self {
            value: nats * base.from_nats_factor::<T>(),
            base,
        }
    }

    pub fn nats(&self) -> T {
        self.value / self.base.from_nats_factor::<T>()
    }

    pub fn to_base(&self, base: Base) -> Self {
        Self::from_nats(self.nats(), base)
    }

    pub fn infinite(base: Base) -> Self {
        Self {
            value: T::infinity(),
            base,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

/// `D_KL(P || Q)` in nats.
pub fn kl_nats<T: Scalar>(p: &ExperienceDistribution<T>, q: &ExperienceDistribution<T>) -> T {
    let mut total = T::zero();
    for (h, pm) in p.entries() {
        let term = xlogx_over_y(*pm, q.mass(h));
        if term.is_infinite() {
            return T::infinity();
        }
        total += term;
    }
    total.max(T::zero())
}

/// `D_KL(P || Q) = sum_h P(h) log(P(h)/Q(h))` in the requested base.
pub fn kl_divergence<T: Scalar>(
    p: &ExperienceDistribution<T>,
    q: &ExperienceDistribution<T>,
    base: Base,
) -> DivergenceValue<T> {
    DivergenceValue::from_nats(kl_nats(p, q), base)
}

/// Binary divergence `d(a || b)` between Bernoulli laws, in nats.
pub fn binary_kl<T: Scalar>(a: T, b: T) -> T {
    let one = T::one();
    let v = xlogx_over_y(a, b) + xlogx_over_y(one - a, one - b);
    if v.is_nan() {
        T::infinity()
    } else {
        v.max(T::zero())
    }
}
