//! Monte Carlo estimate of the large-deviation rate at which empirical
//! distributions land in a telic state.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::divergence::Base;
use super::projection::telic_distance;
use crate::error::{Result, TelicError};
use crate::exp_dist::{ExperienceDistribution, Goal, TelicState};
use crate::numeric::weighted_linear_fit;
use crate::rng::stream_rng;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SanovRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub hits: u64,
    pub trials: u64,
    /// `-(1/N) ln(hits / trials)`.
    pub rate_estimate: f64,
    pub telic_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SanovReport {
    pub rows: Vec<SanovRow>,
    /// Sample sizes with zero hits; their rows are omitted.
    pub absent: Vec<usize>,
    pub telic_distance: f64,
    pub base: Base,
    pub seed: u64,
}

impl SanovReport {
    /// Decay rate fitted across the present rows, see [`fit_decay_rate`].
    pub fn fitted_rate(&self) -> Option<f64> {
        fit_decay_rate(&self.rows, self.telic_distance > 0.0).map(|r| r * self.base.from_nats_factor::<f64>())
    }

    pub fn warning(&self) -> Option<String> {
        (!self.absent.is_empty()).then(|| format!("no hits at N = {:?}; entries omitted", self.absent))
    }

    /// CSV with columns `N,hits,trials,rate_estimate,telic_distance`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("N,hits,trials,rate_estimate,telic_distance\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{:.12e},{:.12e}\n",
                r.n, r.hits, r.trials, r.rate_estimate, r.telic_distance
            ));
        }
        s
    }
}

/// For each sample size `N`, draws `trials` empirical distributions of `N`
/// samples from `q` and records how often they fall in `state`.
pub fn sanov_rate_estimate<T: Scalar>(
    q: &ExperienceDistribution<T>,
    goal: &Goal<T>,
    state: &TelicState<T>,
    sample_sizes: &[usize],
    trials: u64,
    seed: u64,
    base: Base,
) -> Result<SanovReport> {
    if trials == 0 {
        return Err(TelicError::InvalidArgument("trials must be positive".into()));
    }
    if sample_sizes.contains(&0) {
        return Err(TelicError::InvalidArgument("sample sizes must be positive".into()));
    }
    let distance = telic_distance(q, goal, state, Base::Nats).value.as_f64();
    let cumulative: Vec<f64> = q
        .entries()
        .iter()
        .scan(0.0, |acc, (_, m)| {
            *acc += m.as_f64();
            Some(*acc)
        })
        .collect();
    let in_phi: Vec<bool> = q.entries().iter().map(|(h, _)| goal.features().contains(h)).collect();
    let last_positive = q.entries().iter().rposition(|(_, m)| *m > T::zero()).unwrap_or(0);
    let factor = base.from_nats_factor::<f64>();

    let mut rows = Vec::new();
    let mut absent = Vec::new();
    for &n in sample_sizes {
        let hits: u64 = (0..trials)
            .into_par_iter()
            .map(|trial| {
                let mut rng = stream_rng(seed, n as u64, trial);
                let mut count = 0usize;
                for _ in 0..n {
                    let u: f64 = rng.gen();
                    let idx = cumulative.partition_point(|&c| c <= u).min(last_positive);
                    count += in_phi[idx] as usize;
                }
                let f = T::from_usize_lossy(count) / T::from_usize_lossy(n);
                u64::from(state.contains(goal, f))
            })
            .sum();
        if hits == 0 {
            absent.push(n);
            continue;
        }
        let freq = hits as f64 / trials as f64;
        rows.push(SanovRow {
            n,
            hits,
            trials,
            rate_estimate: -freq.ln() / n as f64 * factor,
            telic_distance: distance * factor,
        });
    }
    Ok(SanovReport {
        rows,
        absent,
        telic_distance: distance * factor,
        base,
        seed,
    })
}

/// Slope of `-ln(frequency)` against `N`, weighted by hit counts.
///
/// With `prefactor_correction`, `0.5 ln N` is subtracted first: the hitting
/// probability of a state at positive distance decays like
/// `exp(-N R) / sqrt(N)`, and removing the polynomial factor leaves the
/// exponent alone. The slope is in nats.
pub fn fit_decay_rate(rows: &[SanovRow], prefactor_correction: bool) -> Option<f64> {
    if rows.len() < 2 {
        return None;
    }
    let x: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let y: Vec<f64> = rows
        .iter()
        .map(|r| {
            let neg_log = -(r.hits as f64 / r.trials as f64).ln();
            if prefactor_correction {
                neg_log - 0.5 * (r.n as f64).ln()
            } else {
                neg_log
            }
        })
        .collect();
    let w: Vec<f64> = rows.iter().map(|r| r.hits as f64).collect();
    weighted_linear_fit(&x, &y, &w).map(|(_, slope)| slope)
}
