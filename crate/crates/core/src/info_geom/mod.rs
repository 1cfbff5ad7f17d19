//! KL divergence, information projection onto telic states, the Sanov-rate
//! telic distance and policy-gradient descent toward a state.

mod divergence;
mod gradient;
mod projection;
mod sanov;

pub use divergence::{binary_kl, kl_divergence, kl_nats, Base, DivergenceValue};
pub use gradient::{finite_difference_gradient, policy_gradient_step, telic_objective, ParametricPolicy, FD_STEP};
pub use projection::{information_projection, telic_distance, tilt, ProjectionResult};
pub use sanov::{fit_decay_rate, sanov_rate_estimate, SanovReport, SanovRow};
