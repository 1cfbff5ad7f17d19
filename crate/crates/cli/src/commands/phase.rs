use anyhow::Result;
use serde::Serialize;
use telic::gaussian_nav::{
    classify_policy, nearest_policy_within_budget, phase_plot_grid, policy_complexity, project_policy_to_state,
    split_state_gaussian, state_label, GaussianPolicy, NavTask, PhaseGrid, DEFAULT_STATE,
};
use telic::{Base, TelicError};

use super::{Outcome, Run};
use crate::config::PhaseParams;
use crate::output::{num, opt};
use crate::svg::{color, legend, Panel, Svg};

#[derive(Serialize)]
struct Marker {
    state: String,
    mu: Option<f64>,
    sigma: Option<f64>,
    /// Complexity relative to the panel's default policy, in the run base.
    complexity: Option<f64>,
    within_budget: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct Contour {
    level: f64,
    lines: Vec<Vec<(f64, f64)>>,
}

#[derive(Serialize)]
struct PanelData {
    name: String,
    title: String,
    task: NavTask<f64>,
    reference_state: String,
    /// Budget in the run base.
    delta: f64,
    projections: Vec<Marker>,
    /// Most `Delta P` within budget toward each state whose projection is out of budget.
    budget_policies: Vec<Marker>,
    contours: Vec<Contour>,
    #[serde(skip)]
    grid: PhaseGrid<f64>,
}

/// `phase_grid.csv` (or `phase_a.csv`..`phase_d.csv` in four-panel mode)
/// columns: `mu,sigma,state,complexity,dp_<region>...` in region order, with
/// `sigma` as the outer loop.
pub fn run(run: &mut Run) -> Result<Outcome> {
    let task = run.cfg.task()?.clone();
    let params = run.cfg.config.phase.clone().unwrap_or(PhaseParams {
        mu_range: None,
        sigma_range: None,
        resolution: [121, 100],
        contour_levels: Vec::new(),
        four_panel: None,
    });
    let mut panels = Vec::new();
    let mut failure = None;
    match &params.four_panel {
        None => panels.push(panel("grid", "policy space".into(), &task, &params, run.base)?),
        Some(shift) => {
            let target = state_label(&shift.region);
            panels.push(panel("a", "original task".into(), &task, &params, run.base)?);
            let shifted = task.with_region_center(&shift.region, shift.center)?;
            let title = format!("{} moved to {}", shift.region, shift.center);
            panels.push(panel("b", title, &shifted, &params, run.base)?);
            match split_state_gaussian(&shifted, &target) {
                Ok(split) => {
                    let pi_m =
                        nearest_policy_within_budget(&shifted.default_policy, &target, &shifted, shifted.delta_nats())?;
                    panels.push(panel(
                        "c",
                        format!("after splitting {target}"),
                        &split,
                        &params,
                        run.base,
                    )?);
                    let moved = split.with_default_policy(pi_m);
                    panels.push(panel(
                        "d",
                        "default policy moved to pi_M".into(),
                        &moved,
                        &params,
                        run.base,
                    )?);
                }
                Err(e) => failure = Some(e),
            }
        }
    }
    for p in &panels {
        let name = if p.name == "grid" {
            "phase_grid.csv".to_string()
        } else {
            format!("phase_{}.csv", p.name)
        };
        let (header, rows) = grid_rows(p, run.base);
        run.out.write_csv(&name, &header, &rows)?;
    }
    run.out.write_json(
        "phase.json",
        &serde_json::json!({
            "panels": panels,
            "error": failure.as_ref().map(|e| e.to_string()),
        }),
    )?;
    run.out.write_svg("phase.svg", render(&panels))?;
    Ok(match failure {
        None => Outcome::Success,
        Some(e) => Outcome::Negative(format!("split failed: {e}")),
    })
}

fn to_run_base(nats: f64, base: Base) -> f64 {
    nats * base.from_nats_factor::<f64>()
}

fn panel(name: &str, title: String, task: &NavTask<f64>, params: &PhaseParams, base: Base) -> Result<PanelData> {
    let b = &task.search_box;
    let mu = params.mu_range.unwrap_or([b.mu_min, b.mu_max]);
    let sigma = params.sigma_range.unwrap_or([b.sigma_min, b.sigma_max]);
    let grid = phase_plot_grid(
        task,
        (mu[0], mu[1]),
        (sigma[0], sigma[1]),
        (params.resolution[0], params.resolution[1]),
    )?;
    let reference = task.default_policy;
    let budget = task.delta_nats();
    let mut projections = Vec::new();
    let mut budget_policies = Vec::new();
    let own = classify_policy(&reference, task);
    for label in task.state_labels() {
        if label == own {
            continue;
        }
        match project_policy_to_state(&reference, &label, task) {
            Ok((p, c)) => {
                let within = c.nats() <= budget;
                projections.push(marker(&label, &p, c.nats(), Some(within), base));
                if !within && label != DEFAULT_STATE {
                    let q = nearest_policy_within_budget(&reference, &label, task, budget)?;
                    let cq = policy_complexity(&q, &reference, Base::Nats).value;
                    budget_policies.push(marker(&label, &q, cq, Some(true), base));
                }
            }
            Err(TelicError::StateNotFound(_)) => projections.push(Marker {
                state: label,
                mu: None,
                sigma: None,
                complexity: None,
                within_budget: None,
                error: Some("state not found in search domain".into()),
            }),
            Err(e) => return Err(e.into()),
        }
    }
    let task_factor = task.base().from_nats_factor::<f64>();
    let mut contours = vec![Contour {
        level: to_run_base(budget, base),
        lines: grid.delta_contour.clone(),
    }];
    for level in &params.contour_levels {
        let nats = level / base.from_nats_factor::<f64>();
        contours.push(Contour {
            level: *level,
            lines: grid.contour(nats * task_factor),
        });
    }
    Ok(PanelData {
        name: name.into(),
        title,
        task: task.clone(),
        reference_state: own,
        delta: to_run_base(budget, base),
        projections,
        budget_policies,
        contours,
        grid,
    })
}

fn marker(state: &str, p: &GaussianPolicy<f64>, nats: f64, within: Option<bool>, base: Base) -> Marker {
    Marker {
        state: state.into(),
        mu: Some(p.mu),
        sigma: Some(p.sigma),
        complexity: Some(to_run_base(nats, base)),
        within_budget: within,
        error: None,
    }
}

fn grid_rows(p: &PanelData, base: Base) -> (Vec<String>, Vec<Vec<String>>) {
    let mut header: Vec<String> = ["mu", "sigma", "state", "complexity"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend(p.task.regions.iter().map(|r| format!("dp_{}", r.label)));
    let task_factor = p.task.base().from_nats_factor::<f64>();
    let rows = p
        .grid
        .cells
        .iter()
        .map(|c| {
            let mut row = vec![
                num(c.mu),
                num(c.sigma),
                c.state.clone(),
                opt(Some(to_run_base(c.complexity / task_factor, base))),
            ];
            row.extend(c.delta_p.iter().map(|d| num(*d)));
            row
        })
        .collect();
    (header, rows)
}

fn state_color(task: &NavTask<f64>, state: &str) -> &'static str {
    color(task.regions.iter().position(|r| state_label(&r.label) == state))
}

fn render(panels: &[PanelData]) -> String {
    let cols = if panels.len() > 1 { 2 } else { 1 };
    let rows = panels.len().div_ceil(cols);
    let (pw, ph) = (420.0, 340.0);
    let mut svg = Svg::new(cols as f64 * pw + 110.0, rows as f64 * ph + 10.0);
    for (k, p) in panels.iter().enumerate() {
        let g = &p.grid;
        let (nx, ny) = (g.mu.len(), g.sigma.len());
        let frame = Panel::new(
            (k % cols) as f64 * pw + 60.0,
            (k / cols) as f64 * ph + 30.0,
            pw - 90.0,
            ph - 85.0,
            (g.mu[0], g.mu[nx - 1]),
            (g.sigma[0], g.sigma[ny - 1]),
        );
        let edge = |v: &[f64], i: usize| -> f64 {
            if i == 0 {
                v[0]
            } else if i == v.len() {
                v[v.len() - 1]
            } else {
                0.5 * (v[i - 1] + v[i])
            }
        };
        for j in 0..ny {
            let mut i = 0;
            while i < nx {
                let state = &g.cell(i, j).state;
                let mut end = i + 1;
                while end < nx && &g.cell(end, j).state == state {
                    end += 1;
                }
                let (x0, x1) = (frame.px(edge(&g.mu, i)), frame.px(edge(&g.mu, end)));
                let (y1, y0) = (frame.py(edge(&g.sigma, j)), frame.py(edge(&g.sigma, j + 1)));
                svg.rect(x0, y0, x1 - x0, y1 - y0, state_color(&p.task, state), None, 0.35);
                i = end;
            }
        }
        for (c, contour) in p.contours.iter().enumerate() {
            let (stroke, width, dash) = if c == 0 {
                ("#000000", 1.5, None)
            } else {
                ("#555555", 1.0, Some("4 3"))
            };
            for line in &contour.lines {
                svg.polyline(&frame.map(line), stroke, width, dash, 1.0);
            }
        }
        let r = p.task.default_policy;
        svg.circle(frame.px(r.mu), frame.py(r.sigma), 4.0, "#000000", "#ffffff");
        for m in &p.projections {
            if let (Some(mu), Some(sigma)) = (m.mu, m.sigma) {
                svg.circle(
                    frame.px(mu),
                    frame.py(sigma),
                    4.5,
                    state_color(&p.task, &m.state),
                    "#000000",
                );
            }
        }
        for m in &p.budget_policies {
            if let (Some(mu), Some(sigma)) = (m.mu, m.sigma) {
                svg.circle(frame.px(mu), frame.py(sigma), 5.0, "#ffd700", "#000000");
            }
        }
        frame.axes(&mut svg, "mu", "sigma", &format!("({}) {}", p.name, p.title));
        let items: Vec<(String, &str)> = p
            .task
            .state_labels()
            .into_iter()
            .map(|s| {
                let c = state_color(&p.task, &s);
                (s, c)
            })
            .collect();
        legend(&mut svg, frame.x + frame.w + 8.0, frame.y + 10.0, &items);
    }
    svg.finish()
}
