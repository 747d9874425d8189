//! Numerical checks of the phase-space axioms along a trajectory.

use serde::Serialize;

use crate::error::Result;
use crate::solver::Trajectory;

use super::extract::history_at;
use super::history::History;
use super::seminorm::seminorm;
use super::weight::{FadingWeight, PhaseSpaceConstants};

const B3_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct B3Row {
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct B3Report {
    pub rows: Vec<B3Row>,
    pub passed: bool,
}

/// `‖y_t‖ <= K(t - t0) sup_{[t0,t]} ‖y‖ + M(t - t0) ‖phi*‖` at each sample.
pub fn check_b3(
    traj: &Trajectory,
    constants: &PhaseSpaceConstants,
    weight: &FadingWeight,
    sample_times: &[f64],
) -> Result<B3Report> {
    let t0 = traj.t0();
    let phi_norm = seminorm(traj.initial(), weight)?;
    let mut rows = Vec::with_capacity(sample_times.len());
    for &t in sample_times {
        let lhs = seminorm(&history_at(traj, t)?, weight)?;
        let s = t - t0;
        let rhs = constants.k.eval(s) * traj.sup_norm_until(t)? + constants.m.eval(s) * phi_norm;
        rows.push(B3Row {
            t,
            lhs,
            rhs,
            ok: lhs <= rhs + B3_TOL * (1.0 + rhs),
        });
    }
    let passed = rows.iter().all(|r| r.ok);
    Ok(B3Report { rows, passed })
}

#[derive(Debug, Clone, Serialize)]
pub struct B4Report {
    pub h: f64,
    pub rows: Vec<B3Row>,
    /// Sample times where `‖y(t)‖ > H ‖y_t‖`.
    pub violations: Vec<f64>,
    pub passed: bool,
}

/// `‖y(t)‖ <= H ‖y_t‖` for the configured `H`, reported as is.
pub fn check_b4(traj: &Trajectory, h: f64, weight: &FadingWeight, sample_times: &[f64]) -> Result<B4Report> {
    let mut rows = Vec::with_capacity(sample_times.len());
    for &t in sample_times {
        let lhs = traj.space().norm(&traj.eval_left(t)?);
        let rhs = h * seminorm(&history_at(traj, t)?, weight)?;
        rows.push(B3Row {
            t,
            lhs,
            rhs,
            ok: lhs <= rhs * (1.0 + B3_TOL) + B3_TOL,
        });
    }
    let violations: Vec<f64> = rows.iter().filter(|r| !r.ok).map(|r| r.t).collect();
    Ok(B4Report {
        h,
        passed: violations.is_empty(),
        rows,
        violations,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ContinuityRow {
    pub t: f64,
    pub modulus_coarse: f64,
    pub modulus_fine: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ContinuityReport {
    pub dt: f64,
    pub rows: Vec<ContinuityRow>,
    pub passed: bool,
}

/// Discrete proxy for continuity of `t -> y_t` away from impulse times:
/// `‖y_{t+dt/2} - y_t‖ <= ‖y_{t+dt} - y_t‖` up to rounding. This is weaker
/// than the continuity axiom itself.
pub fn check_continuity_proxy(
    traj: &Trajectory,
    weight: &FadingWeight,
    sample_times: &[f64],
    dt: f64,
) -> Result<ContinuityReport> {
    let mut rows = Vec::new();
    for &t in sample_times {
        if t + dt > traj.t_end() || traj.jumps().iter().any(|j| j.time >= t && j.time < t + dt) {
            continue;
        }
        let base = history_at(traj, t)?;
        let diff = |s: f64| -> Result<f64> {
            let other = history_at(traj, s)?;
            seminorm(&History::combine(1.0, &other, -1.0, &base)?, weight)
        };
        let coarse = diff(t + dt)?;
        let fine = diff(t + 0.5 * dt)?;
        rows.push(ContinuityRow {
            t,
            modulus_coarse: coarse,
            modulus_fine: fine,
            ok: fine <= coarse * (1.0 + 1e-9) + 1e-12,
        });
    }
    let passed = rows.iter().all(|r| r.ok);
    Ok(ContinuityReport { dt, rows, passed })
}
