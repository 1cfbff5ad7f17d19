use anyhow::{Context, Result};
use telic::info_geom::{fit_decay_rate, sanov_rate_estimate};
use telic::TelicError;

use super::{Outcome, Run};
use crate::output::num;

/// `sanov.csv` columns: `N,hits,trials,rate_estimate,telic_distance`.
pub fn run(run: &mut Run) -> Result<Outcome> {
    let inst = run
        .cfg
        .config
        .discrete
        .clone()
        .context("config has no `discrete` instance")?;
    let params = run.cfg.config.sanov.clone().context("config has no `sanov` section")?;
    let q = inst.default_distribution::<f64>()?;
    let goal = inst.goal::<f64>()?;
    let state = goal
        .state_by_label(&params.state)
        .ok_or_else(|| TelicError::UnknownState(params.state.clone()))?;
    let report = sanov_rate_estimate(
        &q,
        &goal,
        &state,
        &params.sample_sizes,
        params.trials,
        run.seed,
        run.base,
    )?;
    if let Some(w) = report.warning() {
        eprintln!("warning: {w}");
    }
    let header: Vec<String> = ["N", "hits", "trials", "rate_estimate", "telic_distance"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                r.hits.to_string(),
                r.trials.to_string(),
                num(r.rate_estimate),
                num(r.telic_distance),
            ]
        })
        .collect();
    run.out.write_csv("sanov.csv", &header, &rows)?;
    let factor = run.base.from_nats_factor::<f64>();
    run.out.write_json(
        "sanov.json",
        &serde_json::json!({
            "state": params.state,
            "telic_distance": report.telic_distance,
            "fitted_rate": report.fitted_rate(),
            "uncorrected_rate": fit_decay_rate(&report.rows, false).map(|r| r * factor),
            "warning": report.warning(),
            "report": report,
        }),
    )?;
    Ok(Outcome::Success)
}
