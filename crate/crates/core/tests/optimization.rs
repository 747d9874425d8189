mod common;

use mildsol::inclusion::{Nonlinearity, SelectionStrategy};
use mildsol::optimizer::{evaluate_cost, optimize, sample_solution_set, CostFunctional, CostKind};
use mildsol::population::{build_instance, ControlSpec};
use mildsol::solver::{solve_trajectory, SolverConfig};
use mildsol::Error;

use common::scalar;

const T: f64 = 0.5;

fn control_config(c: f64) -> mildsol::population::PopulationConfig {
    scalar(T, Nonlinearity::Zero, ControlSpec::Box { c }, 0.0)
}

/// `y' = -y + w` with constant `w`, `y(0) = 1`.
fn terminal(w: f64) -> f64 {
    (-T).exp() + w * (1.0 - (-T).exp())
}

#[test]
fn terminal_cost_decreases_with_the_control_bound() {
    let cost = CostFunctional::minimize(CostKind::TerminalNorm);
    let cfg = SolverConfig::new(1e-3, 1e-13);
    let costs: Vec<f64> = [0.0, 0.25, 0.5, 1.0]
        .iter()
        .map(|&c| {
            let p = build_instance(&control_config(c), None).unwrap();
            let sel = if c == 0.0 { SelectionStrategy::Zero } else { SelectionStrategy::Vertex { index: 1 } };
            let (tr, _) = solve_trajectory(&p, &sel, &cfg).unwrap();
            let j = evaluate_cost(&cost, &tr).unwrap();
            assert!((j - terminal(-c).powi(2)).abs() < 1e-6, "c {c}: {j}");
            j
        })
        .collect();
    assert!(costs.windows(2).all(|w| w[1] < w[0]), "{costs:?}");
}

#[test]
fn best_member_is_the_brute_force_optimum() {
    let c = 0.5;
    let p = build_instance(&control_config(c), None).unwrap();
    let cfg = SolverConfig::new(1e-3, 1e-13);
    for cost in [
        CostFunctional::minimize(CostKind::TerminalNorm),
        CostFunctional::maximize(CostKind::TerminalNorm),
        CostFunctional::minimize(CostKind::Energy),
    ] {
        let family = sample_solution_set(&p, 5, &cfg, &cost, "test").unwrap();
        let report = optimize(&family, &cost).unwrap();
        let costs: Vec<f64> = family.entries.iter().map(|e| evaluate_cost(&cost, &e.trajectory).unwrap()).collect();
        let pick = match cost.direction {
            mildsol::optimizer::Direction::Minimize => costs.iter().cloned().fold(f64::INFINITY, f64::min),
            mildsol::optimizer::Direction::Maximize => costs.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        };
        assert_eq!(report.best_cost, pick, "{}", cost.name());
        let first = costs.iter().position(|&j| j == pick).unwrap();
        assert_eq!(report.best, first);
    }
}

#[test]
fn optimum_matches_the_constant_control_oracle() {
    let c = 0.5;
    let p = build_instance(&control_config(c), None).unwrap();
    let cfg = SolverConfig::new(1e-3, 1e-13);
    let min = CostFunctional::minimize(CostKind::TerminalNorm);
    let max = CostFunctional::maximize(CostKind::TerminalNorm);
    let lo = optimize(&sample_solution_set(&p, 5, &cfg, &min, "t").unwrap(), &min).unwrap();
    let hi = optimize(&sample_solution_set(&p, 5, &cfg, &max, "t").unwrap(), &max).unwrap();
    assert!((lo.best_cost - terminal(-c).powi(2)).abs() < 1e-6, "{}", lo.best_cost);
    assert!((hi.best_cost - terminal(c).powi(2)).abs() < 1e-6, "{}", hi.best_cost);
    assert_ne!(lo.best_id, hi.best_id);
}

#[test]
fn argmin_is_stable_under_grid_refinement() {
    let p = build_instance(&control_config(0.5), None).unwrap();
    let cost = CostFunctional::minimize(CostKind::Energy);
    let ids: Vec<usize> = [1e-2, 5e-3]
        .iter()
        .map(|&h| {
            let cfg = SolverConfig::new(h, 1e-13);
            optimize(&sample_solution_set(&p, 5, &cfg, &cost, "t").unwrap(), &cost).unwrap().best_id
        })
        .collect();
    assert_eq!(ids[0], ids[1]);
}

#[test]
fn budget_limits_the_family() {
    let p = build_instance(&control_config(0.5), None).unwrap();
    let cost = CostFunctional::minimize(CostKind::TerminalNorm);
    let cfg = SolverConfig::new(1e-2, 1e-13);
    let family = sample_solution_set(&p, 1, &cfg, &cost, "t").unwrap();
    assert_eq!(family.len(), 1);
    let report = optimize(&family, &cost).unwrap();
    assert_eq!(report.rows.len(), 1);
}

#[test]
fn nothing_certified_is_an_empty_family() {
    let c = scalar(1.0, Nonlinearity::Linear { a: 0.5 }, ControlSpec::Box { c: 0.5 }, 0.0);
    let p = build_instance(&c, None).unwrap();
    let mut cfg = SolverConfig::new(1e-2, 1e-30);
    cfg.max_iters = 2;
    let cost = CostFunctional::minimize(CostKind::TerminalNorm);
    let r = sample_solution_set(&p, 3, &cfg, &cost, "t");
    assert!(matches!(r, Err(Error::EmptyFamily(_))), "{r:?}");
}
