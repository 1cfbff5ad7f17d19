//! Goal refinement by inserting intermediate states.

use num_traits::{One, Zero};

use super::backend::Backend;
use super::reach::{find_reachable_states, Reachability};
use crate::error::{Result, TelicError};
use crate::info_geom::DivergenceValue;
use crate::numeric::bisect_last_feasible;
use crate::scalar::Scalar;

/// Bracket width at which the split bisection stops.
pub const SPLIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct SplitResult<P, G, T> {
    /// Largest fraction of the way to the projection within budget.
    pub t_star: T,
    pub midpoint: P,
    /// Label of the inserted state; `None` when the projection is within budget.
    pub new_state: Option<String>,
    pub updated_goal: G,
}

pub type SplitOf<B> = SplitResult<<B as Backend>::Policy, <B as Backend>::Goal, <B as Backend>::Real>;

/// Fraction `t*` of the way from `reference` to `target` and the point there:
/// the largest `t` in `[0, 1]` whose interpolant stays within `budget_nats`.
pub fn budget_limited_point<B: Backend>(
    reference: &B::Policy,
    target: &B::Policy,
    budget_nats: B::Real,
    backend: &B,
) -> Result<(B::Real, B::Policy)> {
    let t_star = bisect_last_feasible(B::Real::zero(), B::Real::one(), B::Real::lit(SPLIT_TOL), |t| {
        backend.complexity(&backend.interpolate(reference, target, t), reference) <= budget_nats
    })?;
    Ok((t_star, backend.interpolate(reference, target, t_star)))
}

/// Inserts a state at the budget-limited point on the segment from
/// `reference` to its projection onto `state`.
pub fn split_unreachable_state<B: Backend>(
    reference: &B::Policy,
    goal: &B::Goal,
    state: &str,
    delta: DivergenceValue<B::Real>,
    backend: &B,
) -> Result<SplitOf<B>> {
    let budget = delta.nats();
    let (target, cost) = backend.project(goal, reference, state)?;
    if cost <= budget {
        return Ok(SplitResult {
            t_star: B::Real::one(),
            midpoint: target,
            new_state: None,
            updated_goal: goal.clone(),
        });
    }
    let (t_star, midpoint) = budget_limited_point(reference, &target, budget, backend)?;
    let (updated_goal, label) = backend.insert_intermediate(goal, state, reference, &midpoint)?;
    Ok(SplitResult {
        t_star,
        midpoint,
        new_state: Some(label),
        updated_goal,
    })
}

#[derive(Debug, Clone)]
pub struct Refinement<P, G> {
    pub goal: G,
    /// Rounds of splitting performed.
    pub rounds: usize,
    /// Labels of inserted states, in insertion order.
    pub inserted: Vec<String>,
    pub reach: Reachability<P>,
}

#[derive(Debug, Clone)]
pub struct RefineFailure<P, G> {
    pub error: TelicError,
    pub goal: G,
    pub inserted: Vec<String>,
    pub last_report: Option<Reachability<P>>,
}

pub type RefineOutcome<B> = std::result::Result<
    Refinement<<B as Backend>::Policy, <B as Backend>::Goal>,
    RefineFailure<<B as Backend>::Policy, <B as Backend>::Goal>,
>;

/// Splits unreachable states until the goal is telic-controllable from `pi0`.
///
/// Each round splits every unreachable state, starting from the chain
/// endpoint with the smallest projection divergence to it, so that repeated
/// rounds extend the frontier instead of re-splitting from `pi0`.
#[allow(clippy::result_large_err)]
pub fn refine_goal<B: Backend>(
    pi0: &B::Policy,
    goal: &B::Goal,
    delta: DivergenceValue<B::Real>,
    backend: &B,
    max_rounds: usize,
) -> RefineOutcome<B> {
    let mut goal = goal.clone();
    let mut inserted = Vec::new();
    let fail = |error, goal: &B::Goal, inserted: &Vec<String>, last| RefineFailure {
        error,
        goal: goal.clone(),
        inserted: inserted.clone(),
        last_report: last,
    };
    if max_rounds == 0 {
        return Err(fail(
            TelicError::InvalidArgument("max_rounds must be at least 1".into()),
            &goal,
            &inserted,
            None,
        ));
    }
    for round in 0..=max_rounds {
        let reach = match find_reachable_states(pi0, &goal, delta, backend) {
            Ok(r) => r,
            Err(e) => return Err(fail(e, &goal, &inserted, None)),
        };
        if reach.report.is_controllable() {
            return Ok(Refinement {
                goal,
                rounds: round,
                inserted,
                reach,
            });
        }
        if round == max_rounds {
            let error = TelicError::RefinementDidNotConverge {
                rounds: max_rounds,
                unreachable: reach.report.unreachable.clone(),
            };
            return Err(fail(error, &goal, &inserted, Some(reach)));
        }
        for state in &reach.report.unreachable {
            if !backend.states(&goal).contains(state) {
                continue;
            }
            let frontier = reach
                .witnesses
                .values()
                .filter_map(|chain| chain.last())
                .filter_map(|p| backend.project(&goal, p, state).ok().map(|(_, d)| (d, p)))
                .fold(None::<(B::Real, &B::Policy)>, |best, (d, p)| match best {
                    Some((bd, _)) if bd <= d => best,
                    _ => Some((d, p)),
                });
            let Some((_, frontier)) = frontier else {
                let e = TelicError::StateNotFound(state.clone());
                return Err(fail(e, &goal, &inserted, Some(reach)));
            };
            match split_unreachable_state(frontier, &goal, state, delta, backend) {
                Ok(split) => {
                    if let Some(label) = split.new_state {
                        inserted.push(label);
                        goal = split.updated_goal;
                    }
                }
                Err(e) => return Err(fail(e, &goal, &inserted, Some(reach))),
            }
        }
    }
    unreachable!("loop returns on its last round")
}
