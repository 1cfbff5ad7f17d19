use std::collections::BTreeMap;

use anyhow::{Context, Result};
use serde::Serialize;
use telic::gaussian_nav::{
    classify_policy, final_position_distribution, region_probability, simulate_trajectories, GaussianPolicy, NavTask,
    Trajectories, NO_REGION,
};

use super::{Outcome, Run};
use crate::output::num;
use crate::svg::{color, legend, Panel, Svg};

#[derive(Serialize)]
struct PolicySummary {
    index: usize,
    policy: GaussianPolicy<f64>,
    seed: u64,
    state: String,
    final_mean: f64,
    final_std: f64,
    region_probability: BTreeMap<String, f64>,
    terminal_counts: BTreeMap<String, usize>,
}

/// `trajectories.csv` columns: `policy,mu,sigma,trajectory,terminal_region,x_0..x_T`.
/// Policy `k` is simulated with seed `seed + k`.
pub fn run(run: &mut Run) -> Result<Outcome> {
    let task = run.cfg.task()?.clone();
    let params = run
        .cfg
        .config
        .simulate
        .clone()
        .context("config has no `simulate` section")?;
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    let mut all = Vec::new();
    for (k, p) in params.policies.iter().enumerate() {
        p.validate().with_context(|| format!("policy {k}"))?;
        let seed = run.seed.wrapping_add(k as u64);
        let tr = simulate_trajectories(p, &task, params.trajectories, seed)?;
        for (i, (path, end)) in tr.positions.iter().zip(&tr.terminal).enumerate() {
            let mut row = vec![k.to_string(), num(p.mu), num(p.sigma), i.to_string(), end.clone()];
            row.extend(path.iter().map(|x| num(*x)));
            rows.push(row);
        }
        let mut counts: BTreeMap<String, usize> = task.regions.iter().map(|r| (r.label.clone(), 0)).collect();
        counts.insert(NO_REGION.to_string(), 0);
        for end in &tr.terminal {
            *counts.entry(end.clone()).or_default() += 1;
        }
        let (m, s) = final_position_distribution(p, &task);
        summaries.push(PolicySummary {
            index: k,
            policy: *p,
            seed,
            state: classify_policy(p, &task),
            final_mean: m,
            final_std: s,
            region_probability: task
                .regions
                .iter()
                .map(|r| (r.label.clone(), region_probability(p, &task, r)))
                .collect(),
            terminal_counts: counts,
        });
        all.push((*p, tr));
    }
    let mut header: Vec<String> = ["policy", "mu", "sigma", "trajectory", "terminal_region"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend((0..=task.horizon).map(|t| format!("x_{t}")));
    run.out.write_csv("trajectories.csv", &header, &rows)?;
    run.out.write_json(
        "simulate.json",
        &serde_json::json!({ "trajectories_per_policy": params.trajectories, "policies": summaries }),
    )?;
    run.out.write_svg("simulate.svg", render(&task, &all))?;
    Ok(Outcome::Success)
}

fn render(task: &NavTask<f64>, tiles: &[(GaussianPolicy<f64>, Trajectories<f64>)]) -> String {
    let cols = (tiles.len() as f64).sqrt().ceil() as usize;
    let rows = tiles.len().div_ceil(cols);
    let (tw, th) = (280.0, 210.0);
    let mut svg = Svg::new(cols as f64 * tw + 90.0, rows as f64 * th + 20.0);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for r in &task.regions {
        lo = lo.min(r.lo());
        hi = hi.max(r.hi());
    }
    for (_, tr) in tiles {
        for x in tr.positions.iter().flatten() {
            lo = lo.min(*x);
            hi = hi.max(*x);
        }
    }
    let region_index = |label: &str| task.regions.iter().position(|r| r.label == label);
    for (k, (p, tr)) in tiles.iter().enumerate() {
        let (c, r) = (k % cols, k / cols);
        let panel = Panel::new(
            c as f64 * tw + 55.0,
            r as f64 * th + 30.0,
            tw - 75.0,
            th - 80.0,
            (0.0, task.horizon as f64),
            (lo, hi),
        );
        for (i, reg) in task.regions.iter().enumerate() {
            let (y0, y1) = (panel.py(reg.hi()), panel.py(reg.lo()));
            svg.rect(panel.x, y0, panel.w, y1 - y0, color(Some(i)), None, 0.12);
        }
        let opacity = if tr.positions.len() > 50 { 0.15 } else { 0.8 };
        for (path, end) in tr.positions.iter().zip(&tr.terminal) {
            let pts: Vec<(f64, f64)> = path.iter().enumerate().map(|(t, x)| (t as f64, *x)).collect();
            svg.polyline(&panel.map(&pts), color(region_index(end)), 1.0, None, opacity);
        }
        panel.axes(&mut svg, "t", "x", &format!("mu = {}, sigma = {}", p.mu, p.sigma));
    }
    let mut items: Vec<(String, &str)> = task
        .regions
        .iter()
        .enumerate()
        .map(|(i, r)| (r.label.clone(), color(Some(i))))
        .collect();
    items.push((NO_REGION.to_string(), color(None)));
    legend(&mut svg, cols as f64 * tw + 10.0, 40.0, &items);
    svg.finish()
}
