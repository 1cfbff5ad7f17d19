//! Experiences, experience distributions, tabular policies and environments,
//! and the goal-induced partition of distributions into telic states.

mod experience;
mod goal;
pub mod schema;
mod tabular;

pub use experience::{
    empirical_distribution, format_flat, Experience, ExperienceDistribution, Symbol, NORMALIZATION_TOL, RENORMALIZE_TOL,
};
pub use goal::{
    compare_feature_probabilities, feature_probability, prefers, state_of_feature_probability, telic_state_of,
    telic_state_of_policy, Bin, FeatureSet, Goal, Preference, TelicState,
};
pub use tabular::{
    policy_pushforward, policy_pushforward_capped, trajectory_probability, Alphabet, TabularEnvironment, TabularPolicy,
    DEFAULT_ENUMERATION_CAP,
};
