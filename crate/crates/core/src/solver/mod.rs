//! Mild solutions by interval splitting: Picard iteration of the solution
//! operator on each inter-impulse interval, impulse jumps and gluing, and
//! the certificates checked on the output.

mod apriori;
mod picard;
mod problem;
mod residual;
mod trajectory;

pub use apriori::{apriori_radius, weighted_sup_norm, AprioriBounds, AprioriInputs};
pub use picard::{
    gamma_apply, glue, interval_grid, solve_interval, solve_trajectory, IntervalSolution,
    SolutionPrefix,
};
pub use problem::{ImpulseMap, ImpulseSchedule, ProblemInstance, Quadrature, SolverConfig};
pub use residual::{
    certify, diagnostic_times, max_node_difference, residual, solve, Certificate, Solution,
};
pub use trajectory::{JumpRecord, Segment, Side, Trajectory};
