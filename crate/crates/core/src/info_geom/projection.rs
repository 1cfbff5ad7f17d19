//! Information projection of a distribution onto a telic state.
//!
//! Telic states are feature-probability intervals, so the constraint set is
//! `{P : P(Phi) in [lo, hi]}`. Its I-projection rescales the reference inside
//! `Phi` and inside its complement:
//!
//! ```text
//! P*(h) = c * Q(h | Phi)          for h in Phi
//! P*(h) = (1 - c) * Q(h | not Phi) otherwise
//! ```
//!
//! with `c` the point of the interval nearest to `Q(Phi)`, and
//! `D(P* || Q) = d(c || Q(Phi))`.

use serde::Serialize;

use super::divergence::{binary_kl, Base, DivergenceValue};
use crate::error::{Result, TelicError};
use crate::exp_dist::{feature_probability, ExperienceDistribution, FeatureSet, Goal, TelicState};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct ProjectionResult<T> {
    #[serde(skip)]
    pub projected: ExperienceDistribution<T>,
    pub divergence: DivergenceValue<T>,
    pub target_feature_prob: T,
}

/// Member of the exponential family through `q` with `P(Phi) = c`.
///
/// Fails when `c` asks for mass on an event `q` gives probability zero.
pub fn tilt<T: Scalar>(q: &ExperienceDistribution<T>, phi: &FeatureSet, c: T) -> Result<ExperienceDistribution<T>> {
    let f = feature_probability(q, phi);
    if (c > T::zero() && f <= T::zero()) || (c < T::one() && f >= T::one()) {
        return Err(TelicError::AbsoluteContinuity {
            state: format!("P(Phi)={c}"),
        });
    }
    if c == f {
        return Ok(q.clone());
    }
    let inside = if f > T::zero() { c / f } else { T::zero() };
    let outside = if f < T::one() {
        (T::one() - c) / (T::one() - f)
    } else {
        T::zero()
    };
    let entries = q
        .entries()
        .iter()
        .map(|(h, m)| {
            let scale = if phi.contains(h) { inside } else { outside };
            (h.clone(), *m * scale)
        })
        .collect::<Vec<_>>();
    ExperienceDistribution::new(entries)
}

/// `argmin_{P in state} D(P || Q)`, over the closure of the state's interval.
pub fn information_projection<T: Scalar>(
    q: &ExperienceDistribution<T>,
    goal: &Goal<T>,
    state: &TelicState<T>,
    base: Base,
) -> Result<ProjectionResult<T>> {
    let f = feature_probability(q, goal.features());
    if state.contains(goal, f) {
        return Ok(ProjectionResult {
            projected: q.clone(),
            divergence: DivergenceValue::from_nats(T::zero(), base),
            target_feature_prob: f,
        });
    }
    let c = state.nearest_point(f);
    let projected = tilt(q, goal.features(), c).map_err(|_| TelicError::AbsoluteContinuity {
        state: state.label.clone(),
    })?;
    Ok(ProjectionResult {
        projected,
        divergence: DivergenceValue::from_nats(binary_kl(c, f), base),
        target_feature_prob: c,
    })
}

/// Sanov exponent of reaching `state` from `q`; `+inf` when unreachable.
pub fn telic_distance<T: Scalar>(
    q: &ExperienceDistribution<T>,
    goal: &Goal<T>,
    state: &TelicState<T>,
    base: Base,
) -> DivergenceValue<T> {
    information_projection(q, goal, state, base)
        .map(|r| r.divergence)
        .unwrap_or_else(|_| DivergenceValue::infinite(base))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exp_dist::{Bin, Experience};
    use crate::info_geom::kl_nats;

    fn h(i: u32) -> Experience {
        Experience::new(vec![(0, i)])
    }

    fn goal_with(members: &[u32], edges: &[f64]) -> Goal<f64> {
        Goal::from_edges(FeatureSet::from_members(members.iter().map(|&i| h(i))), 0.05, edges).unwrap()
    }

    fn binary(f: f64) -> ExperienceDistribution<f64> {
        ExperienceDistribution::new(vec![(h(1), f), (h(0), 1.0 - f)]).unwrap()
    }

    // dense scan over the 1-simplex {(x, 1-x)}: min D((x,1-x) || q) with x in [lo, hi]
    fn simplex_scan(qf: f64, lo: f64, hi: f64, n: usize) -> f64 {
        (0..=n)
            .map(|i| i as f64 / n as f64)
            .filter(|&x| x >= lo && x <= hi)
            .map(|x| binary_kl(x, qf))
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn already_inside_is_identity() {
        let g = goal_with(&[1], &[0.0, 0.5, 1.0]);
        let q = binary(0.7);
        let r = information_projection(&q, &g, &g.state(1).unwrap(), Base::Nats).unwrap();
        assert_eq!(r.projected, q);
        assert_eq!(r.divergence.value, 0.0);
    }

    #[test]
    fn binary_closed_form_matches_scan() {
        let g = goal_with(&[1], &[0.0, 0.5, 1.0]);
        let q = binary(0.136);
        let r = information_projection(&q, &g, &g.state(1).unwrap(), Base::Nats).unwrap();
        let expect = 0.5 * (0.5f64 / 0.136).ln() + 0.5 * (0.5f64 / 0.864).ln();
        assert!((r.divergence.value - expect).abs() < 1e-14);
        assert!((r.divergence.value - simplex_scan(0.136, 0.5, 1.0, 10_000)).abs() < 1e-4);
        assert_eq!(r.target_feature_prob, 0.5);
    }

    #[test]
    fn uniform_four_conditional_mixture() {
        let g = goal_with(&[0, 1], &[0.0, 0.75, 1.0]);
        let q = ExperienceDistribution::uniform((0..4).map(h)).unwrap();
        let r = information_projection(&q, &g, &g.state(1).unwrap(), Base::Nats).unwrap();
        for i in 0..4 {
            let expect = if i < 2 { 0.375 } else { 0.125 };
            assert!((r.projected.mass(&h(i)) - expect).abs() < 1e-15);
        }
        // numeric constrained minimization: search the 2-parameter family
        // (a, b) for Phi members and (c, d) for the rest with a+b = 0.75
        let mut best = f64::INFINITY;
        let n = 300;
        for i in 0..=n {
            let a = 0.75 * i as f64 / n as f64;
            for j in 0..=n {
                let c = 0.25 * j as f64 / n as f64;
                let p = ExperienceDistribution::new(vec![(h(0), a), (h(1), 0.75 - a), (h(2), c), (h(3), 0.25 - c)])
                    .unwrap();
                best = best.min(kl_nats(&p, &q));
            }
        }
        assert!((best - r.divergence.value).abs() < 1e-9);
    }

    #[test]
    fn absolute_continuity_failure() {
        let g = goal_with(&[1], &[0.0, 0.5, 1.0]);
        let q = ExperienceDistribution::point_mass(h(0));
        assert!(matches!(
            information_projection(&q, &g, &g.state(1).unwrap(), Base::Nats),
            Err(TelicError::AbsoluteContinuity { .. })
        ));
        assert!(telic_distance(&q, &g, &g.state(1).unwrap(), Base::Nats)
            .value
            .is_infinite());
        assert_eq!(telic_distance(&q, &g, &g.state(0).unwrap(), Base::Nats).value, 0.0);
    }

    #[test]
    fn telic_distance_examples() {
        let q = binary(0.3);
        let g6 = goal_with(&[1], &[0.0, 0.6, 1.0]);
        let g7 = goal_with(&[1], &[0.0, 0.7, 1.0]);
        let d6 = telic_distance(&q, &g6, &g6.state(1).unwrap(), Base::Nats).value;
        let d7 = telic_distance(&q, &g7, &g7.state(1).unwrap(), Base::Nats).value;
        assert!((d6 - simplex_scan(0.3, 0.6, 1.0, 10_000)).abs() < 1e-4);
        assert!((d6 - binary_kl(0.6, 0.3)).abs() < 1e-15);
        assert!(d7 >= d6);
        assert_eq!(telic_distance(&q, &g6, &g6.state(0).unwrap(), Base::Nats).value, 0.0);
    }

    #[test]
    fn downward_projection_uses_upper_edge() {
        let g = Goal::new(
            FeatureSet::from_members([h(1)]),
            0.1,
            vec![
                Bin {
                    lo: 0.0,
                    hi: 0.2,
                    label: "low".into(),
                },
                Bin {
                    lo: 0.2,
                    hi: 1.0,
                    label: "high".into(),
                },
            ],
        )
        .unwrap();
        let r = information_projection(&binary(0.5), &g, &g.state(0).unwrap(), Base::Nats).unwrap();
        assert_eq!(r.target_feature_prob, 0.2);
        assert!((r.divergence.value - binary_kl(0.2, 0.5)).abs() < 1e-15);
    }
}
