use log::debug;

use crate::error::{Error, Result};
use crate::inclusion::{select_on, SelectionStrategy};
use crate::phase_space::{panel_count, weighted_history_integral, History};
use crate::space::StateSpace;

use super::problem::{ProblemInstance, SolverConfig};
use super::trajectory::{JumpRecord, Segment, Trajectory};

/// The solution glued so far: the initial history followed by the solved
/// intervals, with the running memory integral at the last time when the
/// problem needs it.
#[derive(Debug, Clone)]
pub struct SolutionPrefix {
    initial: History,
    segments: Vec<Segment>,
    jumps: Vec<JumpRecord>,
    memory: Option<Vec<f64>>,
}

impl SolutionPrefix {
    /// Only the initial history.
    pub fn initial(problem: &ProblemInstance) -> Result<Self> {
        let memory = if problem.needs_memory() {
            Some(weighted_history_integral(&problem.initial)?)
        } else {
            None
        };
        Ok(SolutionPrefix {
            initial: problem.initial.clone(),
            segments: Vec::new(),
            jumps: Vec::new(),
            memory,
        })
    }

    /// Number of solved intervals.
    pub fn solved(&self) -> usize {
        self.segments.len()
    }

    /// `y` at the end of the prefix; the left limit at an impulse time.
    pub fn end_value(&self) -> &[f64] {
        match self.segments.last() {
            Some(s) => s.last(),
            None => self.initial.current(),
        }
    }

    /// `∫_{-inf}^{t} y` at the end of the prefix.
    pub fn memory(&self) -> Option<&[f64]> {
        self.memory.as_deref()
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn jumps(&self) -> &[JumpRecord] {
        &self.jumps
    }

    pub fn into_trajectory(self, space: StateSpace) -> Result<Trajectory> {
        Trajectory::new(space, self.initial, self.segments, self.jumps)
    }
}

/// Uniform grid on `[t_{k-1}, t_k]` with step at most `cfg.h`, hitting
/// both ends exactly.
pub fn interval_grid(problem: &ProblemInstance, k: usize, cfg: &SolverConfig) -> Result<Vec<f64>> {
    let (a, b) = problem.schedule.interval(k)?;
    let n = panel_count(b - a, cfg.h);
    Ok((0..=n)
        .map(|j| if j == n { b } else { a + (b - a) * j as f64 / n as f64 })
        .collect())
}

/// Fixed data of interval `k` given the prefix up to `t_{k-1}`.
struct IntervalData {
    k: usize,
    times: Vec<f64>,
    /// `U(s_i, t_{k-1}) [xi(t_{k-1}) + I_{k-1}]`
    homogeneous: Vec<Vec<f64>>,
    memory_start: Option<Vec<f64>>,
    jump: Option<JumpRecord>,
}

fn prepare(k: usize, prefix: &SolutionPrefix, problem: &ProblemInstance, cfg: &SolverConfig) -> Result<IntervalData> {
    if prefix.solved() + 1 != k {
        return Err(Error::Misuse(format!(
            "interval {k} needs a prefix with {} solved intervals, got {}",
            k - 1,
            prefix.solved()
        )));
    }
    let times = interval_grid(problem, k, cfg)?;
    let a = times[0];
    let dim = problem.space.dim();
    let left = prefix.end_value().to_vec();
    let (start, jump) = if k == 1 {
        (left, None)
    } else {
        let map = &problem.schedule.maps()[k - 2];
        let impulse = map.apply(dim, prefix.memory())?;
        let right: Vec<f64> = left.iter().zip(&impulse).map(|(l, i)| l + i).collect();
        let jump = JumpRecord {
            time: a,
            left,
            right: right.clone(),
            impulse,
        };
        (right, Some(jump))
    };
    let homogeneous = times
        .iter()
        .map(|&s| problem.evolution.apply(s, a, &start))
        .collect::<Result<Vec<_>>>()?;
    Ok(IntervalData {
        k,
        times,
        homogeneous,
        memory_start: prefix.memory.clone(),
        jump,
    })
}

fn apply_gamma(data: &IntervalData, q: &[Vec<f64>], selection: &SelectionStrategy, problem: &ProblemInstance) -> Result<Vec<Vec<f64>>> {
    let n = data.times.len();
    if q.len() != n || q.iter().any(|v| v.len() != problem.space.dim()) {
        return Err(Error::Grid(format!(
            "interval {} has {n} nodes, candidate has {}",
            data.k,
            q.len()
        )));
    }
    let ev = &problem.evolution;
    let mut memory = data.memory_start.clone();
    let mut out = Vec::with_capacity(n);
    let mut acc: Vec<f64> = vec![0.0; problem.space.dim()];
    let mut f_prev: Vec<f64> = Vec::new();
    for i in 0..n {
        let s = data.times[i];
        if i > 0 {
            let h = s - data.times[i - 1];
            if let Some(m) = memory.as_mut() {
                for ((m, a), b) in m.iter_mut().zip(&q[i - 1]).zip(&q[i]) {
                    *m += 0.5 * h * (a + b);
                }
            }
        }
        let mut f = problem.nonlinearity.eval_with_memory(s, &q[i], memory.as_deref());
        let w = select_on(&problem.control, selection, &problem.space, s, &q[i])?;
        for (a, b) in f.iter_mut().zip(&w) {
            *a += b;
        }
        if i > 0 {
            let h = s - data.times[i - 1];
            // trapezoid panel of U(s_i, .) f on [s_{i-1}, s_i], carried forward
            for (a, fp) in acc.iter_mut().zip(&f_prev) {
                *a += 0.5 * h * fp;
            }
            acc = ev.apply(s, data.times[i - 1], &acc)?;
            for (a, fi) in acc.iter_mut().zip(&f) {
                *a += 0.5 * h * fi;
            }
        }
        out.push(data.homogeneous[i].iter().zip(&acc).map(|(u, a)| u + a).collect());
        f_prev = f;
    }
    Ok(out)
}

/// One application of the solution operator of interval `k` to the
/// candidate `q` on [`interval_grid`].
pub fn gamma_apply(
    k: usize,
    q: &[Vec<f64>],
    prefix: &SolutionPrefix,
    selection: &SelectionStrategy,
    problem: &ProblemInstance,
    cfg: &SolverConfig,
) -> Result<Vec<Vec<f64>>> {
    let data = prepare(k, prefix, problem, cfg)?;
    apply_gamma(&data, q, selection, problem)
}

#[derive(Debug, Clone)]
pub struct IntervalSolution {
    pub k: usize,
    pub segment: Segment,
    /// The jump at `t_{k-1}`, absent for the first interval.
    pub jump: Option<JumpRecord>,
    pub iterations: usize,
    pub last_diff: f64,
}

/// Picard iteration on interval `k` from the homogeneous term until two
/// iterates differ by at most `picard_tol` in the sup norm.
pub fn solve_interval(
    k: usize,
    prefix: &SolutionPrefix,
    selection: &SelectionStrategy,
    problem: &ProblemInstance,
    cfg: &SolverConfig,
) -> Result<IntervalSolution> {
    cfg.validate()?;
    let data = prepare(k, prefix, problem, cfg)?;
    let space = &problem.space;
    let mut q = data.homogeneous.clone();
    let mut diff = f64::INFINITY;
    for it in 1..=cfg.max_iters {
        let next = apply_gamma(&data, &q, selection, problem)?;
        diff = next
            .iter()
            .zip(&q)
            .map(|(a, b)| space.distance(a, b))
            .fold(0.0, f64::max);
        q = next;
        if diff <= cfg.picard_tol {
            debug!("interval {k}: converged after {it} iterations, diff {diff:e}");
            return Ok(IntervalSolution {
                k,
                segment: Segment {
                    times: data.times,
                    values: q,
                },
                jump: data.jump,
                iterations: it,
                last_diff: diff,
            });
        }
    }
    Err(Error::NonConvergence {
        interval: k,
        iterations: cfg.max_iters,
        last_diff: diff,
    })
}

/// Appends an interval solution to the prefix: the prefix below
/// `t_{k-1}`, the new segment on `[t_{k-1}, t_k]`, and the jump record.
pub fn glue(mut prefix: SolutionPrefix, solution: IntervalSolution) -> Result<SolutionPrefix> {
    if prefix.solved() + 1 != solution.k {
        return Err(Error::Misuse(format!(
            "cannot glue interval {} onto {} solved intervals",
            solution.k,
            prefix.solved()
        )));
    }
    if let Some(m) = prefix.memory.as_mut() {
        let seg = &solution.segment;
        for i in 1..seg.times.len() {
            let h = seg.times[i] - seg.times[i - 1];
            for ((m, a), b) in m.iter_mut().zip(&seg.values[i - 1]).zip(&seg.values[i]) {
                *m += 0.5 * h * (a + b);
            }
        }
    }
    if let Some(j) = solution.jump {
        prefix.jumps.push(j);
    }
    prefix.segments.push(solution.segment);
    Ok(prefix)
}

/// Trajectory and per-interval iteration counts, without diagnostics.
pub fn solve_trajectory(
    problem: &ProblemInstance,
    selection: &SelectionStrategy,
    cfg: &SolverConfig,
) -> Result<(Trajectory, Vec<usize>)> {
    cfg.validate()?;
    problem.validate()?;
    let mut prefix = SolutionPrefix::initial(problem)?;
    let mut iterations = Vec::new();
    for k in 1..=problem.schedule.len() + 1 {
        let sol = solve_interval(k, &prefix, selection, problem, cfg)?;
        iterations.push(sol.iterations);
        prefix = glue(prefix, sol)?;
    }
    Ok((prefix.into_trajectory(problem.space.clone())?, iterations))
}
