//! Goal-directed ("telic") state representations for complexity-bounded agents.
//!
//! A goal partitions experience distributions into telic states. This crate
//! measures how far a policy is from each state (information projection and
//! its large-deviation rate), decides whether every state can be reached by a
//! chain of KL-bounded policy updates, and refines goals by inserting
//! intermediate states until they can.
//!
//! Two settings are provided: finite tabular experience distributions
//! ([`exp_dist`], [`info_geom`]) and a one-dimensional Gaussian random-walk
//! navigation task ([`gaussian_nav`]). Reachability analysis and refinement
//! ([`telic_control`]) are written once against a [`telic_control::Backend`]
//! implemented for both.
//!
//! All numerics are generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix `f64`.

// `!(x > 0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exp_dist;
pub mod gaussian_nav;
pub mod info_geom;
pub mod numeric;
pub mod rng;
pub mod scalar;
pub mod telic_control;

pub use error::{Result, TelicError};
pub use info_geom::{Base, DivergenceValue};
pub use scalar::Scalar;

pub type Real = f64;

pub type ExperienceDistribution64 = exp_dist::ExperienceDistribution<f64>;
pub type Goal64 = exp_dist::Goal<f64>;
pub type TelicState64 = exp_dist::TelicState<f64>;
pub type TabularPolicy64 = exp_dist::TabularPolicy<f64>;
pub type TabularEnvironment64 = exp_dist::TabularEnvironment<f64>;
pub type Divergence64 = info_geom::DivergenceValue<f64>;
pub type GaussianPolicy64 = gaussian_nav::GaussianPolicy<f64>;
pub type Region64 = gaussian_nav::Region<f64>;
pub type NavTask64 = gaussian_nav::NavTask<f64>;

pub type ExperienceDistribution32 = exp_dist::ExperienceDistribution<f32>;
pub type GaussianPolicy32 = gaussian_nav::GaussianPolicy<f32>;
pub type NavTask32 = gaussian_nav::NavTask<f32>;
