use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::Value;
use telic::exp_dist::schema::GoalRecord;
use telic::gaussian_nav::GaussianBackend;
use telic::telic_control::{find_reachable_states, refine_goal, Backend, DiscreteBackend, ReachabilityReport};
use telic::DivergenceValue;

use super::{Outcome, Run};

#[derive(Serialize)]
struct ReachResult<'a> {
    backend: &'static str,
    delta: DivergenceValue<f64>,
    controllable: bool,
    report: &'a ReachabilityReport,
}

#[derive(Serialize)]
struct RefineResult<'a> {
    backend: &'static str,
    delta: DivergenceValue<f64>,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    rounds: Option<usize>,
    inserted: &'a [String],
    goal: Value,
    report: Option<&'a ReachabilityReport>,
}

/// Writes `reach.json`, or `refine.json` when `refine` is set.
pub fn run(run: &mut Run, refine: bool) -> Result<Outcome> {
    let params = run.cfg.config.reach.clone();
    let max_rounds = params.as_ref().map(|p| p.max_rounds).unwrap_or(8);
    let delta = params.as_ref().and_then(|p| p.delta);
    match (&run.cfg.config.task, &run.cfg.config.discrete) {
        (Some(task), None) => {
            let task = task.clone();
            let delta = delta.unwrap_or(task.delta).to_base(run.base);
            let pi0 = task.default_policy;
            let encode = |t: &telic::NavTask64| serde_json::to_value(t).expect("task serializes");
            execute(
                run,
                "gaussian",
                &GaussianBackend::new(),
                &pi0,
                &task,
                delta,
                refine,
                max_rounds,
                encode,
            )
        }
        (None, Some(inst)) => {
            let inst = inst.clone();
            let delta = delta
                .context("discrete instances need `reach.delta`")?
                .to_base(run.base);
            let pi0 = inst.default_distribution::<f64>()?;
            let goal = inst.goal::<f64>()?;
            let encode = |g: &telic::Goal64| {
                serde_json::to_value(GoalRecord::from_goal(&inst.alphabet, g)).expect("goal serializes")
            };
            execute(
                run,
                "discrete",
                &DiscreteBackend::new(),
                &pi0,
                &goal,
                delta,
                refine,
                max_rounds,
                encode,
            )
        }
        (Some(_), Some(_)) => bail!("config has both `task` and `discrete`; keep one"),
        (None, None) => bail!("config needs a `task` or a `discrete` instance"),
    }
}

#[allow(clippy::too_many_arguments)]
fn execute<B: Backend<Real = f64>>(
    run: &mut Run,
    name: &'static str,
    backend: &B,
    pi0: &B::Policy,
    goal: &B::Goal,
    delta: DivergenceValue<f64>,
    refine: bool,
    max_rounds: usize,
    encode: impl Fn(&B::Goal) -> Value,
) -> Result<Outcome> {
    if !refine {
        let reach = find_reachable_states(pi0, goal, delta, backend)?;
        let report = &reach.report;
        let controllable = report.is_controllable();
        run.out.write_json(
            "reach.json",
            &ReachResult {
                backend: name,
                delta,
                controllable,
                report,
            },
        )?;
        return Ok(if controllable {
            Outcome::Success
        } else {
            Outcome::Negative(format!("unreachable states: {}", report.unreachable.join(", ")))
        });
    }
    match refine_goal(pi0, goal, delta, backend, max_rounds) {
        Ok(r) => {
            run.out.write_json(
                "refine.json",
                &RefineResult {
                    backend: name,
                    delta,
                    status: "refined",
                    error: None,
                    rounds: Some(r.rounds),
                    inserted: &r.inserted,
                    goal: encode(&r.goal),
                    report: Some(&r.reach.report),
                },
            )?;
            Ok(Outcome::Success)
        }
        Err(f) => {
            let error = f.error.to_string();
            run.out.write_json(
                "refine.json",
                &RefineResult {
                    backend: name,
                    delta,
                    status: "failed",
                    error: Some(error.clone()),
                    rounds: None,
                    inserted: &f.inserted,
                    goal: encode(&f.goal),
                    report: f.last_report.as_ref().map(|r| &r.report),
                },
            )?;
            Ok(Outcome::Negative(format!("refinement failed: {error}")))
        }
    }
}
