use crate::error::{Error, Result};
use crate::solver::Trajectory;

use super::history::{Beyond, History, TailRepresentation};
use super::samples::Samples;

/// The history `y_t(theta) = y(t + theta)` of a trajectory.
///
/// The recent window and the sampled tail reuse the trajectory nodes and
/// the shifted nodes of the initial history, so no quadrature panel ever
/// straddles an impulse or the seam at `t0`. Below the shifted initial
/// tail the closed form (or envelope) of the initial history carries on.
pub fn history_at(traj: &Trajectory, t: f64) -> Result<History> {
    let (t0, t_end) = (traj.t0(), traj.t_end());
    if t < t0 || t > t_end {
        return Err(Error::Domain {
            t,
            lo: t0,
            hi: t_end,
        });
    }
    let initial = traj.initial();
    if t == t0 {
        return Ok(initial.clone());
    }
    let tau = initial.tau();
    let d = t - t0;
    let dim = traj.space().dim();
    let window_start = t - tau;

    // nodes within rounding distance of the window ends would leave
    // degenerate panels, so the ends replace them
    let eps = 1e-12 * (1.0 + t.abs() + tau);
    let near_end = |s: f64| (s - t).abs() <= eps || (s - window_start).abs() <= eps;
    let mut times: Vec<f64> = initial.nodes().into_iter().map(|th| th + t0).collect();
    for seg in traj.segments() {
        times.extend(seg.times.iter().copied().filter(|&s| s <= t));
    }
    times.retain(|&s| !near_end(s) || s == t0 || traj.jumps().iter().any(|j| j.time == s));
    times.push(t);
    times.push(window_start);
    times.sort_by(f64::total_cmp);
    times.dedup();

    let value = |sigma: f64, right: bool| {
        traj.eval_extended(sigma, right)
            .ok_or_else(|| Error::Grid(format!("trajectory history unknown at {sigma}")))
    };
    let is_jump = |sigma: f64| {
        traj.jumps().iter().any(|j| j.time == sigma)
            || initial
                .recent()
                .jumps()
                .iter()
                .chain(initial.tail().samples().map_or(&[][..], |s| s.jumps()))
                .any(|j| j.at + t0 == sigma)
    };

    let mut recent = Samples::builder(dim);
    let mut tail = Samples::builder(dim);
    let mut has_tail = false;
    let offset = |sigma: f64| {
        if sigma == window_start {
            -tau
        } else {
            sigma - t
        }
    };
    for &sigma in &times {
        let left = value(sigma, false)?;
        let theta = offset(sigma);
        if sigma <= window_start {
            tail.push(theta, left.clone());
            has_tail = true;
        }
        if sigma >= window_start {
            if sigma < t && is_jump(sigma) {
                recent.push_jump(theta, left, value(sigma, true)?);
            } else {
                recent.push(theta, left);
            }
        } else if is_jump(sigma) {
            // replace the plain node just pushed by a jump node
            let right = value(sigma, true)?;
            tail.push_jump(theta, value(sigma, false)?, right);
        }
    }
    let recent = recent.build()?;

    let beyond = match initial.tail().beyond() {
        Beyond::Analytic(f) => Beyond::Analytic(f.shifted(d)),
        env @ Beyond::Envelope { .. } => env.clone(),
    };
    let samples = if has_tail { Some(tail.build()?) } else { None };
    let tail = TailRepresentation::new(tau, samples, beyond)?;
    History::new(traj.space().clone(), recent, tail)
}
