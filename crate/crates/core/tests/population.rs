mod common;

use mildsol::inclusion::{Nonlinearity, SelectionStrategy};
use mildsol::optimizer::{evaluate_cost, CostFunctional, CostKind};
use mildsol::population::{
    build_instance, verify_hypotheses, ControlSpec, HypothesisSamples, HypothesisStatus, PopulationConfig,
    RemovalSpec,
};
use mildsol::profile::Profile;
use mildsol::solver::{solve_trajectory, ImpulseMap, SolverConfig};
use mildsol::Error;

use common::{scalar, with_impulse};

fn harvested(n_space: usize) -> PopulationConfig {
    let mut c = scalar(2.0, Nonlinearity::Logistic { rate: 2.0 }, ControlSpec::Ball { radius: 0.2 }, 1.0);
    c.evolution.b = RemovalSpec::Separable {
        time: Profile::constant(1.0),
        space: Profile::Affine {
            intercept: 1.0,
            slope: 1.0,
        },
    };
    c.population.n_space = n_space;
    c.population.history_step = 1e-2;
    let c = with_impulse(c, 0.75, ImpulseMap::Saturating { c: 0.2 });
    with_impulse(c, 1.5, ImpulseMap::Saturating { c: 0.2 })
}

#[test]
fn population_model_satisfies_its_hypotheses() {
    let r = verify_hypotheses(&harvested(11), None, &HypothesisSamples::new(200, 7)).unwrap();
    assert!(r.passed, "{:?}", r.failures().collect::<Vec<_>>());
    assert!(r.rows.iter().all(|row| row.status != HypothesisStatus::Fail));
}

#[test]
fn densities_stay_nonnegative() {
    let p = build_instance(&harvested(11), None).unwrap();
    let (tr, _) = solve_trajectory(&p, &SelectionStrategy::Zero, &SolverConfig::new(1e-2, 1e-12)).unwrap();
    for (_, _, v) in tr.rows() {
        assert!(v.iter().all(|&x| x >= 0.0), "{v:?}");
    }
    for j in tr.jumps() {
        assert!(j.impulse.iter().all(|&x| x >= 0.0));
    }
}

#[test]
fn terminal_mass_converges_under_spatial_refinement() {
    let cost = CostFunctional::minimize(CostKind::TerminalMass);
    let cfg = SolverConfig::new(1e-2, 1e-12);
    let masses: Vec<f64> = [5, 9, 17, 33]
        .iter()
        .map(|&n| {
            let p = build_instance(&harvested(n), None).unwrap();
            let (tr, _) = solve_trajectory(&p, &SelectionStrategy::Zero, &cfg).unwrap();
            evaluate_cost(&cost, &tr).unwrap()
        })
        .collect();
    let diffs: Vec<f64> = masses.windows(2).map(|m| (m[1] - m[0]).abs()).collect();
    assert!(diffs.windows(2).all(|d| d[1] < d[0]), "{masses:?}");
    assert!(diffs[2] < 1e-3, "{masses:?}");
}

#[test]
fn vanishing_removal_rate_is_rejected() {
    let mut c = harvested(5);
    c.evolution.b = RemovalSpec::Constant { value: 0.0 };
    match build_instance(&c, None) {
        Err(Error::Hypothesis { hypothesis, .. }) => assert_eq!(hypothesis, "b2"),
        other => panic!("{other:?}"),
    }
}
