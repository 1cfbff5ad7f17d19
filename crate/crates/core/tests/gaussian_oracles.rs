use telic::gaussian_nav::*;
use telic::{Base, DivergenceValue};

fn task(x_r: f64, mode: TimeScaling, delta: f64) -> NavTask<f64> {
    NavTask::new(
        30,
        vec![Region::new(x_r, 1.0, "R", 1.0), Region::new(-2.0, 1.0, "L", 1.0)],
        0.1,
        GaussianPolicy::new(0.0, 1.0).unwrap(),
        DivergenceValue::from_nats(delta, Base::Nats),
        mode,
    )
    .unwrap()
}

fn normal_pdf(x: f64, m: f64, s: f64) -> f64 {
    let z = (x - m) / s;
    (-0.5 * z * z).exp() / (s * (2.0 * std::f64::consts::PI).sqrt())
}

/// Composite Simpson of `p ln(p/q)` over `m_p +- 14 s_p`.
fn kl_quadrature(p: (f64, f64), q: (f64, f64)) -> f64 {
    let n = 40_000;
    let (a, b) = (p.0 - 14.0 * p.1, p.0 + 14.0 * p.1);
    let h = (b - a) / n as f64;
    let f = |x: f64| {
        let pp = normal_pdf(x, p.0, p.1);
        if pp == 0.0 {
            return 0.0;
        }
        // log-ratio from the exponents avoids underflow in the tails
        let lr = (q.1 / p.1).ln() - 0.5 * ((x - p.0) / p.1).powi(2) + 0.5 * ((x - q.0) / q.1).powi(2);
        pp * lr
    };
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

#[test]
fn complexity_matches_quadrature_on_grid() {
    let reference = GaussianPolicy::new(0.0, 1.0).unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..10 {
        for j in 0..10 {
            let p = GaussianPolicy::new(-2.5 + 0.55 * i as f64, 0.2 + 0.3 * j as f64).unwrap();
            let closed = complexity_nats(&p, &reference);
            let numeric = kl_quadrature((p.mu, p.sigma), (reference.mu, reference.sigma));
            worst = worst.max((closed - numeric).abs());
        }
    }
    assert!(worst <= 1e-6, "worst deviation {worst:e}");
}

#[test]
fn simulation_matches_closed_form() {
    for mode in [TimeScaling::Accumulate, TimeScaling::Direct] {
        let t = task(2.0, mode, 1.0);
        for (k, (mu, sigma)) in [(0.0, 1.0), (0.06, 0.3), (-0.5, 0.8)].into_iter().enumerate() {
            let p = GaussianPolicy::new(mu, sigma).unwrap();
            let n = 200_000;
            let ends = simulate_terminal_positions(&p, &t, n, 40 + k as u64);
            let (m, s) = final_position_distribution(&p, &t);
            let mean = ends.iter().sum::<f64>() / n as f64;
            let var = ends.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            assert!((mean - m).abs() <= 3.0 * s / (n as f64).sqrt(), "{mode:?} {k}: mean");
            // standard error of the sample standard deviation is about s / sqrt(2n)
            assert!(
                (var.sqrt() - s).abs() <= 3.0 * s / (2.0 * n as f64).sqrt(),
                "{mode:?} {k}: std"
            );
            for r in &t.regions {
                let prob = region_probability(&p, &t, r);
                let frac = ends.iter().filter(|x| r.contains(**x)).count() as f64 / n as f64;
                let se = (prob * (1.0 - prob) / n as f64).sqrt().max(1.0 / n as f64);
                assert!(
                    (frac - prob).abs() <= 3.0 * se,
                    "{mode:?} {k} {}: {frac} vs {prob}",
                    r.label
                );
            }
        }
    }
}

#[test]
fn projection_is_optimal_against_dense_grid() {
    for x_r in [2.0, 2.5] {
        let t = task(x_r, TimeScaling::Direct, 1.0);
        let reference = t.default_policy;
        for label in ["S_R", "S_L"] {
            let (proj, c) = project_policy_to_state(&reference, label, &t).unwrap();
            assert_eq!(classify_policy(&proj, &t), label);
            let n = 2000;
            let b = &t.search_box;
            let mut best = f64::INFINITY;
            for i in 0..n {
                let sigma = b.sigma_min + (b.sigma_max - b.sigma_min) * i as f64 / (n - 1) as f64;
                for j in 0..n {
                    let mu = b.mu_min + (b.mu_max - b.mu_min) * j as f64 / (n - 1) as f64;
                    let p = GaussianPolicy { mu, sigma };
                    if classify_policy(&p, &t) == label {
                        best = best.min(complexity_nats(&p, &reference));
                    }
                }
            }
            assert!(
                c.nats() <= best + 1e-9,
                "x_R={x_r} {label}: {} vs grid {best}",
                c.nats()
            );
            assert!(
                c.nats() >= best - 1e-3,
                "x_R={x_r} {label}: {} vs grid {best}",
                c.nats()
            );
        }
    }
}

#[test]
fn budget_search_sits_on_contour_and_beats_interior() {
    let t = task(2.5, TimeScaling::Direct, 0.05);
    let reference = t.default_policy;
    let budget = 0.05;
    let p = nearest_policy_within_budget(&reference, "S_R", &t, budget).unwrap();
    let c = complexity_nats(&p, &reference);
    assert!((c - budget).abs() <= 1e-4, "complexity {c}");
    let best = delta_p(&p, &t, "R").unwrap();
    let n = 600;
    for i in 0..n {
        for j in 0..n {
            let q = GaussianPolicy {
                mu: -1.0 + 2.0 * j as f64 / (n - 1) as f64,
                sigma: 0.6 + 0.8 * i as f64 / (n - 1) as f64,
            };
            if complexity_nats(&q, &reference) < budget {
                assert!(
                    delta_p(&q, &t, "R").unwrap() < best,
                    "({}, {}) beats the returned policy",
                    q.mu,
                    q.sigma
                );
            }
        }
    }
}

#[test]
fn delta_contour_follows_analytic_curve() {
    let mut t = task(2.0, TimeScaling::Direct, 1.0);
    t.delta = DivergenceValue::from_nats(1.0, Base::Nats);
    let (nx, ny) = (241, 240);
    let g = phase_plot_grid(&t, (-3.0, 3.0), (0.05, 3.0), (nx, ny)).unwrap();
    let cell = ((6.0 / (nx - 1) as f64).powi(2) + (2.95 / (ny - 1) as f64).powi(2)).sqrt();
    // analytic level set ln(1/sigma) + (sigma^2 + mu^2)/2 - 1/2 = 1, sampled densely
    let mut curve = Vec::new();
    for k in 0..200_000 {
        let sigma = 0.05 + 2.95 * k as f64 / 199_999.0;
        let m2 = 2.0 * (1.5 - (1.0 / sigma).ln()) - sigma * sigma;
        if m2 >= 0.0 {
            curve.push((m2.sqrt(), sigma));
            curve.push((-m2.sqrt(), sigma));
        }
    }
    assert!(!g.delta_contour.is_empty());
    for line in &g.delta_contour {
        for &(mu, sigma) in line {
            let d = curve
                .iter()
                .map(|(m, s)| ((m - mu).powi(2) + (s - sigma).powi(2)).sqrt())
                .fold(f64::INFINITY, f64::min);
            assert!(d <= cell, "({mu}, {sigma}) is {d} from the analytic contour");
        }
    }
}

#[test]
fn split_places_midpoint_in_new_state() {
    let t = task(2.5, TimeScaling::Direct, 0.05);
    let pi_m = nearest_policy_within_budget(&t.default_policy, "S_R", &t, 0.05).unwrap();
    let split = split_state_gaussian(&t, "S_R").unwrap();
    assert_eq!(split.regions.len(), 3);
    let m = split.regions.iter().find(|r| r.label == "M").unwrap();
    let r = split.region("R").unwrap();
    assert!(m.desirability < r.desirability && m.desirability > 0.0);
    assert_eq!(classify_policy(&pi_m, &split), "S_M");
    assert_eq!(m.radius, r.radius);
}

#[test]
fn reachable_target_needs_no_split() {
    let t = task(2.0, TimeScaling::Direct, 1.0);
    assert!(matches!(
        split_state_gaussian(&t, "S_R"),
        Err(telic::TelicError::NoSplitNeeded(_))
    ));
}

#[test]
fn goal_curve_crossing_depends_on_reference() {
    let delta = 0.05;
    let t = task(2.5, TimeScaling::Direct, delta);
    let pi_m = nearest_policy_within_budget(&t.default_policy, "S_R", &t, delta).unwrap();
    let budgets: Vec<f64> = (0..20).map(|k| 0.2 * k as f64 / 19.0).collect();
    let crossing = |reference: &GaussianPolicy<f64>| {
        let c = goal_complexity_curve(&t, reference, &budgets, Base::Nats).unwrap();
        let s = c.series.iter().find(|s| s.state == "S_R").unwrap();
        budgets
            .iter()
            .zip(&s.values)
            .find(|(_, v)| v.unwrap() >= t.epsilon)
            .map(|(b, _)| *b)
    };
    assert!(crossing(&t.default_policy).unwrap() > delta);
    assert!(crossing(&pi_m).unwrap() <= delta);
}
