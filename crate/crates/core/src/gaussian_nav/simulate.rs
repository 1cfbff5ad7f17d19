use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use super::task::{GaussianPolicy, NavTask, TimeScaling};
use crate::error::{Result, TelicError};
use crate::rng::stream_rng;
use crate::scalar::Scalar;

/// RNG domain for trajectory streams.
const SIM_DOMAIN: u64 = 0x5157_0001;

/// Label recorded for trajectories ending outside every region.
pub const NO_REGION: &str = "none";

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct Trajectories<T> {
    /// One row of `T + 1` positions per trajectory, starting at 0.
    pub positions: Vec<Vec<T>>,
    /// Region containing each terminal position, or [`NO_REGION`].
    pub terminal: Vec<String>,
}

/// Simulates `n` walks of `task.horizon` steps from `x_0 = 0`.
///
/// In direct mode each step is drawn from `N(mu / T, sigma / sqrt(T))` so that
/// the terminal law is `N(mu, sigma)`. Trajectory `i` uses its own stream, so
/// the output does not depend on thread count.
pub fn simulate_trajectories<T: Scalar>(
    p: &GaussianPolicy<T>,
    task: &NavTask<T>,
    n: usize,
    seed: u64,
) -> Result<Trajectories<T>> {
    if n == 0 {
        return Err(TelicError::InvalidArgument("trajectory count must be positive".into()));
    }
    let (step_mu, step_sigma) = step_parameters(p, task);
    let positions: Vec<Vec<T>> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, SIM_DOMAIN, i);
            let mut x = T::zero();
            let mut row = Vec::with_capacity(task.horizon + 1);
            row.push(x);
            for _ in 0..task.horizon {
                let z: f64 = rng.sample(StandardNormal);
                x += step_mu + step_sigma * T::lit(z);
                row.push(x);
            }
            row
        })
        .collect();
    let terminal = positions
        .iter()
        .map(|row| terminal_label(*row.last().unwrap(), task))
        .collect();
    Ok(Trajectories { positions, terminal })
}

/// Terminal positions only, without storing paths.
pub fn simulate_terminal_positions<T: Scalar>(p: &GaussianPolicy<T>, task: &NavTask<T>, n: usize, seed: u64) -> Vec<T> {
    let (step_mu, step_sigma) = step_parameters(p, task);
    (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, SIM_DOMAIN, i);
            let mut x = T::zero();
            for _ in 0..task.horizon {
                let z: f64 = rng.sample(StandardNormal);
                x += step_mu + step_sigma * T::lit(z);
            }
            x
        })
        .collect()
}

fn step_parameters<T: Scalar>(p: &GaussianPolicy<T>, task: &NavTask<T>) -> (T, T) {
    match task.time_scaling {
        TimeScaling::Accumulate => (p.mu, p.sigma),
        TimeScaling::Direct => {
            let t = T::from_usize_lossy(task.horizon);
            (p.mu / t, p.sigma / t.sqrt())
        }
    }
}

pub fn terminal_label<T: Scalar>(x: T, task: &NavTask<T>) -> String {
    task.regions
        .iter()
        .find(|r| r.contains(x))
        .map(|r| r.label.clone())
        .unwrap_or_else(|| NO_REGION.to_string())
}
