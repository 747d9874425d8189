#![allow(dead_code)]

use mildsol::inclusion::{Nonlinearity, SelectionStrategy};
use mildsol::population::{
    ControlSpec, EvolutionSection, InclusionSection, InitialSpec, PhaseSpaceSection, PopulationConfig,
    PopulationSection, RemovalSpec, ScheduleSection,
};
use mildsol::profile::Profile;
use mildsol::solver::{ImpulseMap, Trajectory};

/// Scalar `u' = -u + g + w` on `[0, t_end]` with history `exp(rate theta)`.
pub fn scalar(t_end: f64, g: Nonlinearity, omega: ControlSpec, history_rate: f64) -> PopulationConfig {
    PopulationConfig {
        phase_space: PhaseSpaceSection {
            tau: 1.0,
            mu: 1.0,
            p_rate: None,
            cutoff: None,
            eps_tail: 1e-8,
            constants: None,
        },
        evolution: EvolutionSection {
            b: RemovalSpec::Constant { value: 1.0 },
            step: 1e-3,
        },
        inclusion: InclusionSection {
            g,
            omega,
            alpha: None,
            selection: SelectionStrategy::Zero,
        },
        schedule: ScheduleSection {
            t0: 0.0,
            t_end,
            times: vec![],
            impulses: vec![],
        },
        population: PopulationSection {
            n_space: 1,
            psi_star: InitialSpec::Analytic {
                amplitude: Profile::constant(1.0),
                rate: history_rate,
            },
            history_step: 1e-3,
        },
    }
}

pub fn decay() -> PopulationConfig {
    scalar(2.0, Nonlinearity::Zero, ControlSpec::Box { c: 0.0 }, 0.0)
}

pub fn with_impulse(mut c: PopulationConfig, t: f64, map: ImpulseMap) -> PopulationConfig {
    c.schedule.times.push(t);
    c.schedule.impulses.push(map);
    c
}

/// `max |y(t) - f(t)|` over the stored nodes, left limits at jumps and
/// `right(t)` on right-limit rows.
pub fn max_error(traj: &Trajectory, left: impl Fn(f64) -> f64, right: impl Fn(f64) -> f64) -> f64 {
    use mildsol::solver::Side;
    traj.rows()
        .into_iter()
        .map(|(t, side, v)| {
            let exact = if side == Side::Right { right(t) } else { left(t) };
            (v[0] - exact).abs()
        })
        .fold(0.0, f64::max)
}
