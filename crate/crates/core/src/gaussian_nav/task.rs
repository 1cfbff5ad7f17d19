use serde::{Deserialize, Serialize};

use crate::error::{Result, TelicError};
use crate::info_geom::{Base, DivergenceValue};
use crate::scalar::Scalar;

/// Label of the state in which no region is favoured by at least `epsilon`.
pub const DEFAULT_STATE: &str = "S_0";

/// Telic-state label for a region label.
pub fn state_label(region: &str) -> String {
    format!("S_{region}")
}

/// Step distribution `N(mu, sigma)` of a one-dimensional random walk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
pub struct GaussianPolicy<T> {
    pub mu: T,
    pub sigma: T,
}

impl<T: Scalar> GaussianPolicy<T> {
    pub fn new(mu: T, sigma: T) -> Result<Self> {
        let p = Self { mu, sigma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mu.is_finite() || !self.sigma.is_finite() || !(self.sigma > T::zero()) {
            return Err(TelicError::InvalidArgument(format!(
                "policy ({}, {}) needs finite mu and sigma > 0",
                self.mu, self.sigma
            )));
        }
        Ok(())
    }
}

/// Target segment `[center - radius, center + radius]` on the line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
pub struct Region<T> {
    pub center: T,
    pub radius: T,
    pub label: String,
    /// Preference rank; the default state sits at zero.
    #[serde(default = "one")]
    pub desirability: T,
}

fn one<T: Scalar>() -> T {
    T::one()
}

impl<T: Scalar> Region<T> {
    pub fn new(center: T, radius: T, label: impl Into<String>, desirability: T) -> Self {
        Self {
            center,
            radius,
            label: label.into(),
            desirability,
        }
    }

    pub fn lo(&self) -> T {
        self.center - self.radius
    }

    pub fn hi(&self) -> T {
        self.center + self.radius
    }

    pub fn contains(&self, x: T) -> bool {
        x >= self.lo() && x <= self.hi()
    }

    pub fn overlaps(&self, other: &Self) -> bool {
        (self.center - other.center).abs() < self.radius + other.radius
    }
}

/// How the plotted `(mu, sigma)` relate to the final position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeScaling {
    /// Per-step parameters: `x_T ~ N(T mu, sqrt(T) sigma)`.
    #[default]
    Accumulate,
    /// Final-position parameters: `x_T ~ N(mu, sigma)`.
    Direct,
}

/// Rectangle of policy space scanned by grid searches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
pub struct SearchBox<T> {
    pub mu_min: T,
    pub mu_max: T,
    pub sigma_min: T,
    pub sigma_max: T,
    /// Grid points per axis.
    pub resolution: usize,
}

impl<T: Scalar> Default for SearchBox<T> {
    fn default() -> Self {
        Self {
            mu_min: T::lit(-3.0),
            mu_max: T::lit(3.0),
            sigma_min: T::lit(0.05),
            sigma_max: T::lit(3.0),
            resolution: 400,
        }
    }
}

/// One-dimensional navigation task with region goals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
pub struct NavTask<T> {
    pub horizon: usize,
    pub regions: Vec<Region<T>>,
    pub epsilon: T,
    pub default_policy: GaussianPolicy<T>,
    pub delta: DivergenceValue<T>,
    #[serde(default)]
    pub time_scaling: TimeScaling,
    #[serde(default)]
    pub search_box: SearchBox<T>,
    /// Radius of inserted regions; `None` copies the split target's radius.
    #[serde(default)]
    pub split_radius: Option<T>,
}

impl<T: Scalar> NavTask<T> {
    /// Two-region task with the default search box.
    pub fn new(
        horizon: usize,
        regions: Vec<Region<T>>,
        epsilon: T,
        default_policy: GaussianPolicy<T>,
        delta: DivergenceValue<T>,
        time_scaling: TimeScaling,
    ) -> Result<Self> {
        let task = Self {
            horizon,
            regions,
            epsilon,
            default_policy,
            delta,
            time_scaling,
            search_box: SearchBox::default(),
            split_radius: None,
        };
        task.validate()?;
        Ok(task)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(TelicError::InvalidTask(m));
        if self.horizon == 0 {
            return bad("horizon must be at least 1".into());
        }
        if !(self.epsilon > T::zero() && self.epsilon < T::one()) {
            return bad(format!("epsilon {} outside (0, 1)", self.epsilon));
        }
        if !(self.delta.value >= T::zero()) {
            return bad(format!("delta {} is negative", self.delta.value));
        }
        self.default_policy.validate()?;
        for (i, r) in self.regions.iter().enumerate() {
            if !(r.radius > T::zero()) || !r.center.is_finite() {
                return bad(format!("region `{}` needs a finite center and radius > 0", r.label));
            }
            if r.label.is_empty() || r.label == "0" {
                return bad(format!("region label `{}` is reserved", r.label));
            }
            for other in &self.regions[..i] {
                if other.label == r.label {
                    return bad(format!("duplicate region label `{}`", r.label));
                }
                if other.overlaps(r) {
                    return bad(format!("regions `{}` and `{}` overlap", other.label, r.label));
                }
            }
        }
        let b = &self.search_box;
        if !(b.mu_min < b.mu_max && b.sigma_min > T::zero() && b.sigma_min < b.sigma_max) || b.resolution < 2 {
            return bad("search box must be non-empty with sigma_min > 0 and resolution >= 2".into());
        }
        if let Some(r) = self.split_radius {
            if !(r > T::zero()) {
                return bad("split radius must be positive".into());
            }
        }
        Ok(())
    }

    pub fn region(&self, label: &str) -> Result<&Region<T>> {
        self.regions
            .iter()
            .find(|r| r.label == label)
            .ok_or_else(|| TelicError::UnknownRegion(label.to_string()))
    }

    /// Index of the region behind a state label; `None` for the default state.
    pub fn region_of_state(&self, state: &str) -> Result<Option<usize>> {
        if state == DEFAULT_STATE {
            return Ok(None);
        }
        state
            .strip_prefix("S_")
            .and_then(|l| self.regions.iter().position(|r| r.label == l))
            .map(Some)
            .ok_or_else(|| TelicError::UnknownState(state.to_string()))
    }

    /// `S_0` followed by one state per region, in region order.
    pub fn state_labels(&self) -> Vec<String> {
        std::iter::once(DEFAULT_STATE.to_string())
            .chain(self.regions.iter().map(|r| state_label(&r.label)))
            .collect()
    }

    pub fn delta_nats(&self) -> T {
        self.delta.nats()
    }

    pub fn base(&self) -> Base {
        self.delta.base
    }

    pub fn with_epsilon(&self, epsilon: T) -> Self {
        Self {
            epsilon,
            ..self.clone()
        }
    }

    pub fn with_default_policy(&self, p: GaussianPolicy<T>) -> Self {
        Self {
            default_policy: p,
            ..self.clone()
        }
    }

    /// Moves the center of region `label`.
    pub fn with_region_center(&self, label: &str, center: T) -> Result<Self> {
        let mut t = self.clone();
        let i = t
            .regions
            .iter()
            .position(|r| r.label == label)
            .ok_or_else(|| TelicError::UnknownRegion(label.to_string()))?;
        t.regions[i].center = center;
        t.validate()?;
        Ok(t)
    }
}
