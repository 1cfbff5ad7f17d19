//! Dense policy-space grids and iso-complexity contours.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use super::model::{classify_from_deltas, complexity_nats, delta_from_probabilities, region_probabilities};
use super::task::{GaussianPolicy, NavTask};
use crate::error::{Result, TelicError};
use crate::numeric::linspace;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct PolicyGridCell<T> {
    pub mu: T,
    pub sigma: T,
    /// `Delta P` per region, in region order.
    pub delta_p: Vec<T>,
    /// Complexity relative to the task's default policy, in the task's base.
    pub complexity: T,
    pub state: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct PhaseGrid<T> {
    pub mu: Vec<T>,
    pub sigma: Vec<T>,
    /// Row-major with `sigma` as the outer index.
    pub cells: Vec<PolicyGridCell<T>>,
    /// Polylines of complexity equal to the task's budget.
    pub delta_contour: Vec<Vec<(T, T)>>,
}

impl<T: Scalar> PhaseGrid<T> {
    pub fn cell(&self, i_mu: usize, i_sigma: usize) -> &PolicyGridCell<T> {
        &self.cells[i_sigma * self.mu.len() + i_mu]
    }

    /// Iso-lines of the complexity field at `level` (task base).
    pub fn contour(&self, level: T) -> Vec<Vec<(T, T)>> {
        let field: Vec<T> = self.cells.iter().map(|c| c.complexity).collect();
        iso_lines(&self.mu, &self.sigma, &field, level)
    }
}

/// Evaluates every cell of a `resolution.0 x resolution.1` grid.
pub fn phase_plot_grid<T: Scalar>(
    task: &NavTask<T>,
    mu_range: (T, T),
    sigma_range: (T, T),
    resolution: (usize, usize),
) -> Result<PhaseGrid<T>> {
    if resolution.0 < 2 || resolution.1 < 2 {
        return Err(TelicError::InvalidArgument(
            "grid resolution must be at least 2 per axis".into(),
        ));
    }
    if !(sigma_range.0 > T::zero() && sigma_range.1 > sigma_range.0 && mu_range.1 > mu_range.0) {
        return Err(TelicError::InvalidArgument(
            "grid ranges must be increasing with sigma > 0".into(),
        ));
    }
    let mu = linspace(mu_range.0, mu_range.1, resolution.0);
    let sigma = linspace(sigma_range.0, sigma_range.1, resolution.1);
    let factor = task.base().from_nats_factor::<T>();
    let reference = task.default_policy;
    let cells: Vec<PolicyGridCell<T>> = (0..mu.len() * sigma.len())
        .into_par_iter()
        .map(|k| {
            let p = GaussianPolicy {
                mu: mu[k % mu.len()],
                sigma: sigma[k / mu.len()],
            };
            let delta_p = delta_from_probabilities(&region_probabilities(&p, task));
            PolicyGridCell {
                mu: p.mu,
                sigma: p.sigma,
                state: classify_from_deltas(&delta_p, task),
                delta_p,
                complexity: complexity_nats(&p, &reference) * factor,
            }
        })
        .collect();
    let field: Vec<T> = cells.iter().map(|c| c.complexity).collect();
    let delta_contour = iso_lines(&mu, &sigma, &field, task.delta.value);
    Ok(PhaseGrid {
        mu,
        sigma,
        cells,
        delta_contour,
    })
}

/// Grid edge identity: `(i, j, vertical)`. A horizontal edge joins `(i, j)`
/// and `(i + 1, j)`; a vertical one joins `(i, j)` and `(i, j + 1)`.
type EdgeId = (usize, usize, bool);

/// Marching squares over a field sampled at `xs x ys` (row-major, `ys` outer),
/// with segments joined into polylines.
pub fn iso_lines<T: Scalar>(xs: &[T], ys: &[T], field: &[T], level: T) -> Vec<Vec<(T, T)>> {
    let nx = xs.len();
    let at = |i: usize, j: usize| field[j * nx + i];
    let above = |i: usize, j: usize| at(i, j) >= level;
    let crossing = |e: EdgeId| -> (T, T) {
        let (i, j, vertical) = e;
        let (i2, j2) = if vertical { (i, j + 1) } else { (i + 1, j) };
        let (a, b) = (at(i, j), at(i2, j2));
        let t = if a == b { T::lit(0.5) } else { (level - a) / (b - a) };
        (xs[i] + t * (xs[i2] - xs[i]), ys[j] + t * (ys[j2] - ys[j]))
    };

    let mut segments: Vec<(EdgeId, EdgeId)> = Vec::new();
    for j in 0..ys.len().saturating_sub(1) {
        for i in 0..nx.saturating_sub(1) {
            // corners counter-clockwise from bottom-left, edges between them
            let corners = [above(i, j), above(i + 1, j), above(i + 1, j + 1), above(i, j + 1)];
            let edges: [EdgeId; 4] = [(i, j, false), (i + 1, j, true), (i, j + 1, false), (i, j, true)];
            let crossed: Vec<usize> = (0..4).filter(|&k| corners[k] != corners[(k + 1) % 4]).collect();
            match crossed.len() {
                2 => segments.push((edges[crossed[0]], edges[crossed[1]])),
                4 => {
                    let center = (at(i, j) + at(i + 1, j) + at(i + 1, j + 1) + at(i, j + 1)) * T::lit(0.25);
                    if (center >= level) == corners[0] {
                        // corners 0 and 2 connected: cut off corners 1 and 3
                        segments.push((edges[0], edges[1]));
                        segments.push((edges[2], edges[3]));
                    } else {
                        segments.push((edges[3], edges[0]));
                        segments.push((edges[1], edges[2]));
                    }
                }
                _ => {}
            }
        }
    }

    let mut by_edge: HashMap<EdgeId, Vec<usize>> = HashMap::new();
    for (k, (a, b)) in segments.iter().enumerate() {
        by_edge.entry(*a).or_default().push(k);
        by_edge.entry(*b).or_default().push(k);
    }
    let mut used = vec![false; segments.len()];
    let mut lines = Vec::new();
    // open chains start at edges used once; closed loops are picked up after
    let starts: Vec<usize> = (0..segments.len())
        .filter(|&k| by_edge[&segments[k].0].len() == 1 || by_edge[&segments[k].1].len() == 1)
        .chain(0..segments.len())
        .collect();
    for s in starts {
        if used[s] {
            continue;
        }
        used[s] = true;
        let (a, b) = segments[s];
        let (first, mut cur) = if by_edge[&b].len() == 1 && by_edge[&a].len() != 1 {
            (b, a)
        } else {
            (a, b)
        };
        let mut line = vec![crossing(first), crossing(cur)];
        loop {
            let next = by_edge[&cur].iter().copied().find(|&k| !used[k]);
            let Some(k) = next else { break };
            used[k] = true;
            let (a, b) = segments[k];
            cur = if a == cur { b } else { a };
            line.push(crossing(cur));
        }
        lines.push(line);
    }
    lines
}
