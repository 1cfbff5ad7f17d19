//! Gradient descent on the telic distance of a parameterized policy.

use std::fmt;
use std::sync::Arc;

use super::divergence::binary_kl;
use crate::error::{Result, TelicError};
use crate::exp_dist::{feature_probability, ExperienceDistribution, Goal, TelicState};
use crate::scalar::Scalar;

/// Central finite-difference step on `theta`.
pub const FD_STEP: f64 = 1e-5;

type Generator<T> = Arc<dyn Fn(&[T]) -> Result<ExperienceDistribution<T>> + Send + Sync>;

/// Parameter vector plus the map from parameters to an experience distribution.
#[derive(Clone)]
pub struct ParametricPolicy<T> {
    pub theta: Vec<T>,
    generator: Generator<T>,
}

impl<T: Scalar> ParametricPolicy<T> {
    pub fn new(
        theta: Vec<T>,
        generator: impl Fn(&[T]) -> Result<ExperienceDistribution<T>> + Send + Sync + 'static,
    ) -> Self {
        Self {
            theta,
            generator: Arc::new(generator),
        }
    }

    pub fn distribution(&self) -> Result<ExperienceDistribution<T>> {
        (self.generator)(&self.theta)
    }

    pub fn distribution_at(&self, theta: &[T]) -> Result<ExperienceDistribution<T>> {
        (self.generator)(theta)
    }

    pub fn with_theta(&self, theta: Vec<T>) -> Self {
        Self {
            theta,
            generator: Arc::clone(&self.generator),
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for ParametricPolicy<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParametricPolicy")
            .field("theta", &self.theta)
            .finish_non_exhaustive()
    }
}

/// `D(P* || P_theta)` in nats, with `P*` the projection of `P_theta` itself.
///
/// Non-finite when the generator fails or the state is unreachable.
pub fn telic_objective<T: Scalar>(p: &ParametricPolicy<T>, theta: &[T], goal: &Goal<T>, state: &TelicState<T>) -> T {
    match p.distribution_at(theta) {
        Ok(dist) => {
            let f = feature_probability(&dist, goal.features());
            if state.contains(goal, f) {
                T::zero()
            } else {
                binary_kl(state.nearest_point(f), f)
            }
        }
        Err(_) => T::nan(),
    }
}

/// Central finite-difference gradient of [`telic_objective`] with step `h`.
pub fn finite_difference_gradient<T: Scalar>(
    p: &ParametricPolicy<T>,
    goal: &Goal<T>,
    state: &TelicState<T>,
    h: T,
) -> Result<Vec<T>> {
    let mut grad = Vec::with_capacity(p.theta.len());
    let mut probe = p.theta.clone();
    for i in 0..p.theta.len() {
        let x = probe[i];
        probe[i] = x + h;
        let up = telic_objective(p, &probe, goal, state);
        probe[i] = x - h;
        let down = telic_objective(p, &probe, goal, state);
        probe[i] = x;
        let g = (up - down) / (h + h);
        if !g.is_finite() {
            return Err(TelicError::GradientOverflow { index: i });
        }
        grad.push(g);
    }
    Ok(grad)
}

/// One step `theta <- theta - eta * grad D(P* || P_theta)`.
pub fn policy_gradient_step<T: Scalar>(
    p: &ParametricPolicy<T>,
    goal: &Goal<T>,
    state: &TelicState<T>,
    eta: T,
) -> Result<ParametricPolicy<T>> {
    if !(eta > T::zero()) || !eta.is_finite() {
        return Err(TelicError::InvalidStepSize(eta.as_f64()));
    }
    if !telic_objective(p, &p.theta, goal, state).is_finite() {
        return Err(TelicError::DivergentStart);
    }
    let grad = finite_difference_gradient(p, goal, state, T::lit(FD_STEP))?;
    let theta = p.theta.iter().zip(&grad).map(|(t, g)| *t - eta * *g).collect();
    Ok(p.with_theta(theta))
}
