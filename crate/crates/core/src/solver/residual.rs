use serde::Serialize;

use crate::error::Result;
use crate::inclusion::{check_f3, select_on, GrowthReport, SelectionStrategy};
use crate::phase_space::{check_b3, history_at, weighted_history_integral, B3Report};

use super::picard::solve_trajectory;
use super::problem::{ProblemInstance, SolverConfig};
use super::trajectory::{Side, Trajectory};

/// `sup_t ‖y(t) - U(t,t0) y(t0) - Σ_{t0<t_k<t} U(t,t_k) I_k(y_{t_k}) - ∫_{t0}^t U(t,s) f(s) ds‖`
/// over every stored node, with `f` and the impulses recomputed from the
/// trajectory and the integral taken panel by panel for each `t`.
pub fn residual(traj: &Trajectory, selection: &SelectionStrategy, problem: &ProblemInstance) -> Result<f64> {
    let space = &problem.space;
    let ev = &problem.evolution;
    let t0 = traj.t0();
    let needs_memory = problem.nonlinearity.uses_memory();

    // integrand at every node of every segment, from that node's own value
    let mut integrand: Vec<Vec<Vec<f64>>> = Vec::with_capacity(traj.segments().len());
    for seg in traj.segments() {
        let mut fs = Vec::with_capacity(seg.times.len());
        for (s, v) in seg.times.iter().zip(&seg.values) {
            let memory = if needs_memory {
                Some(weighted_history_integral(&history_at(traj, *s)?)?)
            } else {
                None
            };
            let mut f = problem.nonlinearity.eval_with_memory(*s, v, memory.as_deref());
            let w = select_on(&problem.control, selection, space, *s, v)?;
            for (a, b) in f.iter_mut().zip(&w) {
                *a += b;
            }
            fs.push(f);
        }
        integrand.push(fs);
    }
    let impulses = traj
        .jumps()
        .iter()
        .zip(problem.schedule.maps())
        .map(|(j, map)| map.apply_history(&history_at(traj, j.time)?))
        .collect::<Result<Vec<_>>>()?;
    let start = traj.initial().current().to_vec();

    let mut worst: f64 = 0.0;
    for (k, seg) in traj.segments().iter().enumerate() {
        for (i, (&t, y)) in seg.times.iter().zip(&seg.values).enumerate() {
            // the first node of a later segment is the right limit at t_{k-1}
            let right_limit = i == 0 && k > 0;
            let mut r = y.clone();
            let hom = ev.apply(t, t0, &start)?;
            for (a, b) in r.iter_mut().zip(&hom) {
                *a -= b;
            }
            for (j, imp) in traj.jumps().iter().zip(&impulses) {
                if j.time < t || (right_limit && j.time == t) {
                    let u = ev.apply(t, j.time, imp)?;
                    for (a, b) in r.iter_mut().zip(&u) {
                        *a -= b;
                    }
                }
            }
            for (kk, other) in traj.segments().iter().enumerate().take(k + 1) {
                let last = if kk == k { i } else { other.times.len() - 1 };
                for p in 0..last {
                    let (sa, sb) = (other.times[p], other.times[p + 1]);
                    let h = 0.5 * (sb - sa);
                    let ua = ev.apply(t, sa, &integrand[kk][p])?;
                    let ub = ev.apply(t, sb, &integrand[kk][p + 1])?;
                    for ((a, x), z) in r.iter_mut().zip(&ua).zip(&ub) {
                        *a -= h * (x + z);
                    }
                }
            }
            worst = worst.max(space.norm(&r));
        }
    }
    Ok(worst)
}

/// Times at which solution diagnostics are sampled: a uniform set plus
/// the impulse times.
pub fn diagnostic_times(problem: &ProblemInstance, count: usize) -> Vec<f64> {
    let (a, b) = (problem.t0(), problem.t_end());
    let n = count.max(2) - 1;
    let mut out: Vec<f64> = (0..=n)
        .map(|i| if i == n { b } else { a + (b - a) * i as f64 / n as f64 })
        .collect();
    out.extend_from_slice(problem.schedule.times());
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub trajectory: Trajectory,
    pub iterations: Vec<usize>,
    pub residual: f64,
    pub b3: B3Report,
    /// `None` when the problem carries no growth bound.
    pub growth: Option<GrowthReport>,
}

/// Solves, then attaches the residual and the phase-space and growth
/// reports sampled along the trajectory.
pub fn solve(problem: &ProblemInstance, selection: &SelectionStrategy, cfg: &SolverConfig) -> Result<Solution> {
    let (trajectory, iterations) = solve_trajectory(problem, selection, cfg)?;
    let residual = residual(&trajectory, selection, problem)?;
    let times = diagnostic_times(problem, 21);
    let b3 = check_b3(&trajectory, &problem.constants, &problem.weight, &times)?;
    let growth = match &problem.growth {
        Some(g) => {
            let samples = times
                .iter()
                .map(|&t| Ok((t, trajectory.eval_left(t)?, history_at(&trajectory, t)?)))
                .collect::<Result<Vec<_>>>()?;
            Some(check_f3(
                &problem.nonlinearity,
                &problem.control,
                selection,
                g,
                &problem.weight,
                &samples,
            )?)
        }
        None => None,
    };
    Ok(Solution {
        trajectory,
        iterations,
        residual,
        b3,
        growth,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub h: f64,
    pub residual: f64,
    pub picard_tol: f64,
    /// `max ‖y_h - y_{h/2}‖` over the nodes of the coarse run.
    pub richardson_diff: f64,
    /// `C` in `residual <= picard_tol + C h^2`.
    pub constant: f64,
    pub threshold: f64,
    pub passed: bool,
}

/// `max ‖a - b‖` over the stored nodes of `a`, evaluating `b` on the same
/// side of each impulse time.
pub fn max_node_difference(a: &Trajectory, b: &Trajectory) -> Result<f64> {
    let space = a.space();
    let mut worst: f64 = 0.0;
    for (t, side, v) in a.rows() {
        let w = match side {
            Side::Right => b.eval_right(t)?,
            _ => b.eval_left(t)?,
        };
        worst = worst.max(space.distance(v, &w));
    }
    Ok(worst)
}

/// Checks `residual(y_h) <= picard_tol + C h^2` with `C` estimated from
/// the `h` and `h/2` runs: `C = (4/3) max ‖y_h - y_{h/2}‖ / h^2`.
pub fn certify(solution: &Solution, problem: &ProblemInstance, selection: &SelectionStrategy, cfg: &SolverConfig) -> Result<Certificate> {
    let (fine, _) = solve_trajectory(problem, selection, &cfg.with_h(0.5 * cfg.h))?;
    let h = solution.trajectory.max_spacing();
    let diff = max_node_difference(&solution.trajectory, &fine)?;
    let constant = 4.0 / 3.0 * diff / (h * h);
    let threshold = cfg.picard_tol + constant * h * h;
    Ok(Certificate {
        h,
        residual: solution.residual,
        picard_tol: cfg.picard_tol,
        richardson_diff: diff,
        constant,
        threshold,
        passed: solution.residual <= threshold,
    })
}
