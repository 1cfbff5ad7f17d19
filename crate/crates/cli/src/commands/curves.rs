use anyhow::{bail, Context, Result};
use serde::Serialize;
use telic::gaussian_nav::{
    goal_complexity_curve, granularity_complexity_curve, granularity_trend, monotonicity_violations,
    nearest_policy_within_budget, state_label, CurveFamily, GaussianPolicy, NavTask, Trend, Violation,
};

use super::{Outcome, Run};
use crate::config::Reference;
use crate::output::{num, opt};
use crate::svg::{color, legend, Panel, Svg};

/// Slack allowed before a curve step counts as a violation.
const MONOTONE_TOL: f64 = 1e-9;

#[derive(Serialize)]
struct ReferenceCurves {
    name: String,
    policy: GaussianPolicy<f64>,
    goal: CurveFamily<f64>,
    granularity: CurveFamily<f64>,
    violations: Vec<Violation>,
}

/// Per reference `<name>`:
/// `goal_complexity_<name>.csv` columns `budget,<state>...` (best `Delta P`
/// toward each region state) and `granularity_complexity_<name>.csv` columns
/// `epsilon,neg_log_epsilon,<state>...` (projection complexity, empty when the
/// state is empty in the search box).
pub fn run(run: &mut Run) -> Result<Outcome> {
    let task = run.cfg.task()?.clone();
    let params = run
        .cfg
        .config
        .curves
        .clone()
        .context("config has no `curves` section")?;
    let mut refs = params.references.clone();
    if refs.is_empty() {
        refs.push(Reference {
            name: "pi_0".into(),
            policy: None,
            toward: None,
        });
    }
    let delta = task.delta.to_base(run.base).value;
    let mut out = Vec::new();
    for r in &refs {
        let policy = resolve(r, &task)?;
        let goal = goal_complexity_curve(&task, &policy, &params.budgets, run.base)?;
        let granularity = granularity_complexity_curve(&task, &policy, &params.epsilons, run.base)?;
        let mut violations = Vec::new();
        for s in &goal.series {
            violations.extend(monotonicity_violations(&goal.x, s, Trend::NonDecreasing, MONOTONE_TOL));
        }
        for s in &granularity.series {
            violations.extend(monotonicity_violations(
                &granularity.x,
                s,
                granularity_trend(&s.state),
                MONOTONE_TOL,
            ));
        }

        let mut header = vec!["budget".to_string()];
        header.extend(goal.series.iter().map(|s| s.state.clone()));
        let rows: Vec<Vec<String>> = (0..goal.x.len())
            .map(|i| {
                let mut row = vec![num(goal.x[i])];
                row.extend(goal.series.iter().map(|s| opt(s.values[i])));
                row
            })
            .collect();
        run.out
            .write_csv(&format!("goal_complexity_{}.csv", r.name), &header, &rows)?;

        let mut header = vec!["epsilon".to_string(), "neg_log_epsilon".to_string()];
        header.extend(granularity.series.iter().map(|s| s.state.clone()));
        let rows: Vec<Vec<String>> = (0..granularity.x.len())
            .map(|i| {
                let mut row = vec![num(params.epsilons[i]), num(granularity.x[i])];
                row.extend(granularity.series.iter().map(|s| opt(s.values[i])));
                row
            })
            .collect();
        run.out
            .write_csv(&format!("granularity_complexity_{}.csv", r.name), &header, &rows)?;

        let title = format!("from {} = ({:.3}, {:.3})", r.name, policy.mu, policy.sigma);
        let svg = plot(&task, &goal, "Delta P", &title, (delta, task.epsilon));
        run.out.write_svg(&format!("goal_complexity_{}.svg", r.name), svg)?;
        let svg = plot(
            &task,
            &granularity,
            &format!("complexity ({})", run.base),
            &title,
            (-task.epsilon.ln(), delta),
        );
        run.out
            .write_svg(&format!("granularity_complexity_{}.svg", r.name), svg)?;

        out.push(ReferenceCurves {
            name: r.name.clone(),
            policy,
            goal,
            granularity,
            violations,
        });
    }
    run.out.write_json(
        "curves.json",
        &serde_json::json!({ "delta": delta, "epsilon": task.epsilon, "references": out }),
    )?;
    let bad: Vec<String> = out
        .iter()
        .flat_map(|r| {
            r.violations
                .iter()
                .map(move |v| format!("{}:{}@{}", r.name, v.state, v.index))
        })
        .collect();
    Ok(if bad.is_empty() {
        Outcome::Success
    } else {
        Outcome::Negative(format!("non-monotone curves: {}", bad.join(", ")))
    })
}

fn resolve(r: &Reference, task: &NavTask<f64>) -> Result<GaussianPolicy<f64>> {
    match (&r.policy, &r.toward) {
        (Some(_), Some(_)) => bail!("reference `{}` sets both `policy` and `toward`", r.name),
        (Some(p), None) => {
            p.validate()?;
            Ok(*p)
        }
        (None, Some(state)) => Ok(nearest_policy_within_budget(
            &task.default_policy,
            state,
            task,
            task.delta_nats(),
        )?),
        (None, None) => Ok(task.default_policy),
    }
}

/// Curves with dashed guides at `x = guide.0` and `y = guide.1`.
fn plot(task: &NavTask<f64>, fam: &CurveFamily<f64>, ylabel: &str, title: &str, guide: (f64, f64)) -> String {
    let mut svg = Svg::new(520.0, 360.0);
    let ys: Vec<f64> = fam
        .series
        .iter()
        .flat_map(|s| s.values.iter().flatten().copied())
        .collect();
    let lo = ys.iter().copied().fold(guide.1, f64::min);
    let hi = ys.iter().copied().fold(guide.1, f64::max);
    let xlo = fam.x.iter().copied().fold(f64::INFINITY, f64::min);
    let xhi = fam.x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let pad = 0.05 * (hi - lo).max(1e-9);
    let panel = Panel::new(60.0, 30.0, 360.0, 280.0, (xlo, xhi), (lo - pad, hi + pad));
    panel.vline(&mut svg, guide.0, "#9e9e9e", Some("5 4"));
    panel.hline(&mut svg, guide.1, "#9e9e9e", Some("5 4"));
    let mut items = Vec::new();
    for s in &fam.series {
        let c = color(task.regions.iter().position(|r| state_label(&r.label) == s.state));
        let mut pts: Vec<(f64, f64)> = fam
            .x
            .iter()
            .zip(&s.values)
            .filter_map(|(x, v)| v.map(|v| (*x, v)))
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        svg.polyline(&panel.map(&pts), c, 1.5, None, 1.0);
        for (x, y) in &pts {
            svg.circle(panel.px(*x), panel.py(*y), 2.5, c, c);
        }
        items.push((s.state.clone(), c));
    }
    panel.axes(&mut svg, &fam.x_label, ylabel, title);
    legend(&mut svg, 435.0, 45.0, &items);
    svg.finish()
}
