//! One-dimensional random-walk navigation toward target regions.
//!
//! A policy is a Gaussian step distribution `N(mu, sigma)`. The final
//! position is Gaussian too, so region probabilities are differences of
//! `erf`. A policy is in state `S_X` when region `X` beats every other region
//! by at least `epsilon`, and in `S_0` otherwise. Policy complexity is the
//! per-step KL divergence from the default policy.

mod backend;
mod curves;
mod grid;
mod model;
mod search;
mod simulate;
mod task;

pub use backend::GaussianBackend;
pub use curves::{
    goal_complexity_curve, granularity_complexity_curve, granularity_trend, monotonicity_violations, CurveFamily,
    CurveSeries, Trend, Violation,
};
pub use grid::{iso_lines, phase_plot_grid, PhaseGrid, PolicyGridCell};
pub use model::{
    classify_policy, complexity_nats, delta_p, delta_p_all, final_position_distribution, policy_complexity,
    region_probabilities, region_probability, state_margin,
};
pub use search::{
    insert_region_at, nearest_policy_within_budget, project_policy_to_state, split_state_gaussian, Contour,
    CONTOUR_SCAN, GOLDEN_ITERS,
};
pub use simulate::{simulate_terminal_positions, simulate_trajectories, terminal_label, Trajectories, NO_REGION};
pub use task::{state_label, GaussianPolicy, NavTask, Region, SearchBox, TimeScaling, DEFAULT_STATE};
