//! Constrained searches over `(mu, sigma)`.
//!
//! Complexity level sets around a reference `(mu0, sigma0)` are closed curves.
//! With `u = (mu - mu0) / sigma0` and `v = sigma / sigma0` the per-step KL is
//! `-ln v + (v^2 + u^2) / 2 - 1/2`, so the level-`c` curve is
//! `u^2 = 2c + 1 + 2 ln v - v^2` for `v` between the two roots of its right
//! side. It is swept by an angle `theta` in `[0, 2 pi)`.

use rayon::prelude::*;

use super::model::{
    classify_from_deltas, classify_policy, complexity_nats, delta_from_probabilities, final_position_distribution,
    region_probabilities,
};
use super::task::{state_label, GaussianPolicy, NavTask, Region, DEFAULT_STATE};
use crate::error::{Result, TelicError};
use crate::info_geom::DivergenceValue;
use crate::numeric::{bisect_root, golden_section_max, linspace};
use crate::scalar::Scalar;

/// Angular samples along a contour before golden-section refinement.
pub const CONTOUR_SCAN: usize = 720;
/// Golden-section iterations along a contour.
pub const GOLDEN_ITERS: usize = 40;

/// Level-`c` complexity curve around a reference policy.
#[derive(Debug, Clone, Copy)]
pub struct Contour<T> {
    reference: GaussianPolicy<T>,
    level: T,
    v_lo: T,
    v_hi: T,
}

impl<T: Scalar> Contour<T> {
    pub fn new(reference: GaussianPolicy<T>, level_nats: T) -> Result<Self> {
        let c = level_nats.max(T::zero());
        if c == T::zero() {
            return Ok(Self {
                reference,
                level: c,
                v_lo: T::one(),
                v_hi: T::one(),
            });
        }
        let two = T::lit(2.0);
        let g = |v: T| v * v - two * v.ln() - T::one() - two * c;
        let tol = T::epsilon() * T::lit(4.0);
        let lo_bracket = (-c - T::one()).exp();
        let hi_bracket = (two * c + T::one()).sqrt() + T::one();
        let v_lo = bisect_root(lo_bracket, T::one(), tol, g)?;
        let v_hi = bisect_root(T::one(), hi_bracket, tol, g)?;
        Ok(Self {
            reference,
            level: c,
            v_lo,
            v_hi,
        })
    }

    pub fn level(&self) -> T {
        self.level
    }

    pub fn point(&self, theta: T) -> GaussianPolicy<T> {
        let half = T::lit(0.5);
        let two = T::lit(2.0);
        let s = half * (T::one() - theta.cos());
        let v = self.v_lo + s * (self.v_hi - self.v_lo);
        let g = (two * self.level + T::one() + two * v.ln() - v * v).max(T::zero());
        let u = g.sqrt() * if theta.sin() < T::zero() { -T::one() } else { T::one() };
        GaussianPolicy {
            mu: self.reference.mu + self.reference.sigma * u,
            sigma: self.reference.sigma * v,
        }
    }

    /// Maximizer of `f` along the curve: an angular scan followed by
    /// golden-section search around the best sample.
    pub fn maximize(&self, mut f: impl FnMut(&GaussianPolicy<T>) -> T) -> (GaussianPolicy<T>, T) {
        if self.v_lo == self.v_hi {
            let p = self.reference;
            let v = f(&p);
            return (p, v);
        }
        let step = T::TAU() / T::from_usize_lossy(CONTOUR_SCAN);
        let mut best = (T::zero(), T::neg_infinity());
        for k in 0..CONTOUR_SCAN {
            let th = step * T::from_usize_lossy(k);
            let v = f(&self.point(th));
            if v > best.1 {
                best = (th, v);
            }
        }
        let (th, v) = golden_section_max(best.0 - step, best.0 + step, GOLDEN_ITERS, |th| f(&self.point(th)));
        let (th, v) = if v >= best.1 { (th, v) } else { best };
        (self.point(th), v)
    }
}

fn margin_from_deltas<T: Scalar>(deltas: &[T], task: &NavTask<T>, region: Option<usize>) -> T {
    match region {
        Some(i) => deltas[i] - task.epsilon,
        None => task.epsilon - deltas.iter().copied().fold(T::neg_infinity(), T::max),
    }
}

/// Grid points of the task's search box in row-major order (`sigma` outer).
pub(crate) fn box_grid<T: Scalar>(task: &NavTask<T>) -> Vec<GaussianPolicy<T>> {
    let b = &task.search_box;
    let mus = linspace(b.mu_min, b.mu_max, b.resolution);
    let sigmas = linspace(b.sigma_min, b.sigma_max, b.resolution);
    sigmas
        .iter()
        .flat_map(|&s| mus.iter().map(move |&m| GaussianPolicy { mu: m, sigma: s }))
        .collect()
}

/// Minimum-complexity policy of the state `label`, relative to `reference`.
///
/// A grid scan of the search box gives an upper bound; bisection on the
/// complexity level then finds the smallest level whose contour still meets
/// the state, maximizing the state margin on each contour.
pub fn project_policy_to_state<T: Scalar>(
    reference: &GaussianPolicy<T>,
    label: &str,
    task: &NavTask<T>,
) -> Result<(GaussianPolicy<T>, DivergenceValue<T>)> {
    let region = task.region_of_state(label)?;
    let base = task.base();
    if classify_policy(reference, task) == label {
        return Ok((*reference, DivergenceValue::from_nats(T::zero(), base)));
    }
    let grid_best = box_grid(task)
        .into_par_iter()
        .filter_map(|p| {
            let deltas = delta_from_probabilities(&region_probabilities(&p, task));
            (classify_from_deltas(&deltas, task) == label).then(|| (complexity_nats(&p, reference), p))
        })
        .reduce_with(|a, b| if b.0 < a.0 { b } else { a });
    let (c_grid, p_grid) = grid_best.ok_or_else(|| TelicError::StateNotFound(label.to_string()))?;

    let on_contour = |c: T| -> Result<Option<GaussianPolicy<T>>> {
        let contour = Contour::new(*reference, c)?;
        let (p, _) = contour.maximize(|q| {
            let deltas = delta_from_probabilities(&region_probabilities(q, task));
            margin_from_deltas(&deltas, task, region)
        });
        Ok((classify_policy(&p, task) == label).then_some(p))
    };

    let mut best = match on_contour(c_grid)? {
        Some(p) => p,
        None => p_grid,
    };
    let (mut lo, mut hi) = (T::zero(), c_grid);
    let tol = T::epsilon().sqrt() * T::lit(1e-4);
    while hi - lo > tol * (T::one() + hi) {
        let mid = lo + (hi - lo) * T::lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        match on_contour(mid)? {
            Some(p) => {
                hi = mid;
                best = p;
            }
            None => lo = mid,
        }
    }
    let c = complexity_nats(&best, reference);
    Ok((best, DivergenceValue::from_nats(c, base)))
}

/// Policy with the largest margin toward `label` among those within `budget`
/// nats of `reference`: the reference itself, grid points inside the budget,
/// and the refined maximizer on the budget contour.
pub fn nearest_policy_within_budget<T: Scalar>(
    reference: &GaussianPolicy<T>,
    label: &str,
    task: &NavTask<T>,
    budget_nats: T,
) -> Result<GaussianPolicy<T>> {
    let region = task.region_of_state(label)?;
    let margin = |p: &GaussianPolicy<T>| {
        let deltas = delta_from_probabilities(&region_probabilities(p, task));
        margin_from_deltas(&deltas, task, region)
    };
    let mut best = (*reference, margin(reference));
    if !(budget_nats > T::zero()) {
        return Ok(best.0);
    }
    if budget_nats.is_finite() {
        let (p, m) = Contour::new(*reference, budget_nats)?.maximize(margin);
        if m >= best.1 {
            best = (p, m);
        }
    }
    let grid_best = box_grid(task)
        .into_par_iter()
        .filter(|p| complexity_nats(p, reference) <= budget_nats)
        .map(|p| (margin(&p), p))
        .reduce_with(|a, b| if b.0 > a.0 { b } else { a });
    if let Some((m, p)) = grid_best {
        if m > best.1 {
            best = (p, m);
        }
    }
    Ok(best.0)
}

fn fresh_region_label<T>(task: &NavTask<T>, stem: &str) -> String {
    let taken = |l: &str| task.regions.iter().any(|r| r.label == l);
    if !taken(stem) {
        return stem.to_string();
    }
    (2..).map(|k| format!("{stem}{k}")).find(|l| !taken(l)).unwrap()
}

/// Inserts a region centered on the final-position mean of `anchor`, ranked
/// between the default state and the region behind `target`.
///
/// Returns the new task and the new state's label.
pub fn insert_region_at<T: Scalar>(
    task: &NavTask<T>,
    target: &str,
    anchor: &GaussianPolicy<T>,
) -> Result<(NavTask<T>, String)> {
    let ti = task
        .region_of_state(target)?
        .ok_or_else(|| TelicError::InvalidArgument(format!("`{DEFAULT_STATE}` has no region to split")))?;
    let goal = &task.regions[ti];
    let (center, _) = final_position_distribution(anchor, task);
    let radius = task.split_radius.unwrap_or(goal.radius);
    // nearest rank strictly between the default state (0) and the target
    let d_t = goal.desirability;
    let inner = task
        .regions
        .iter()
        .map(|r| r.desirability)
        .filter(|d| (*d > T::zero() && *d < d_t) || (*d < T::zero() && *d > d_t))
        .fold(
            T::zero(),
            |acc, d| if (d - d_t).abs() < (acc - d_t).abs() { d } else { acc },
        );
    let label = fresh_region_label(task, "M");
    let region = Region::new(center, radius, label.clone(), (inner + d_t) * T::lit(0.5));
    if let Some(r) = task.regions.iter().find(|r| r.overlaps(&region)) {
        return Err(TelicError::SplitCollision {
            new: label,
            existing: r.label.clone(),
        });
    }
    let mut out = task.clone();
    out.regions.insert(ti, region);
    out.validate()?;
    let new_state = state_label(&label);
    if classify_policy(anchor, &out) != new_state {
        return Err(TelicError::SplitCollapsed(target.to_string()));
    }
    Ok((out, new_state))
}

/// Splits an unreachable state: inserts a region at the budget-limited policy
/// closest to it from the task's default policy.
pub fn split_state_gaussian<T: Scalar>(task: &NavTask<T>, label: &str) -> Result<NavTask<T>> {
    if label == DEFAULT_STATE {
        return Err(TelicError::InvalidArgument(format!(
            "`{DEFAULT_STATE}` has no region to split"
        )));
    }
    let (_, cost) = project_policy_to_state(&task.default_policy, label, task)?;
    let delta = task.delta_nats();
    if cost.nats() <= delta {
        return Err(TelicError::NoSplitNeeded(label.to_string()));
    }
    let pi_m = nearest_policy_within_budget(&task.default_policy, label, task, delta)?;
    insert_region_at(task, label, &pi_m).map(|(t, _)| t)
}
