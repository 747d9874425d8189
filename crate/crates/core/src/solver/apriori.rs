use serde::Serialize;

use crate::error::{Error, Result};
use crate::phase_space::seminorm;
use crate::profile::Profile;

use super::problem::ProblemInstance;
use super::trajectory::Trajectory;

/// Constants of the invariant ball of the first-interval solution
/// operator in the norm `‖q‖_* = max_t exp(-rate (t - t0)) ‖q(t)‖`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AprioriBounds {
    /// Exponential weight rate of the norm.
    pub rate: f64,
    /// Contraction factor, below 1/2 when found by doubling.
    pub contraction: f64,
    /// Offset constant `C` with `r (1 - contraction) >= C`.
    pub offset: f64,
    pub radius: f64,
    pub k_sup: f64,
    pub m_sup: f64,
    pub d: f64,
    pub alpha_l1: f64,
}

/// Scalar inputs of the bound on `[t0, t1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AprioriInputs {
    pub d: f64,
    pub alpha: Profile,
    pub k_sup: f64,
    pub m_sup: f64,
    pub t0: f64,
    pub t1: f64,
    /// `‖phi*(0)‖`
    pub start_norm: f64,
    /// `‖phi*‖` in the phase space.
    pub history_seminorm: f64,
}

const CONTRACTION_PANELS: usize = 4096;

impl AprioriInputs {
    /// `max_t D (1 + K) ∫_{t0}^t exp(-rate (t - s)) alpha(s) ds`, in closed
    /// form for constant `alpha`.
    pub fn contraction(&self, rate: f64) -> f64 {
        let len = self.t1 - self.t0;
        let scale = self.d * (1.0 + self.k_sup);
        if let Some(a) = self.alpha.is_constant() {
            // increasing in t, so the maximum sits at t1
            return scale * a * (-(-rate * len).exp_m1()) / rate;
        }
        // J(t_i) = e^{-rate h} J(t_{i-1}) + panel, trapezoid in s
        let h = len / CONTRACTION_PANELS as f64;
        let decay = (-rate * h).exp();
        let (mut j, mut best) = (0.0f64, 0.0f64);
        let mut prev = self.alpha.eval(self.t0);
        for i in 1..=CONTRACTION_PANELS {
            let cur = self.alpha.eval(self.t0 + i as f64 * h);
            j = decay * (j + 0.5 * h * prev) + 0.5 * h * cur;
            best = best.max(j);
            prev = cur;
        }
        scale * best
    }

    pub fn bounds_at(&self, rate: f64) -> Result<AprioriBounds> {
        let alpha_l1 = self.alpha.integral(self.t0, self.t1);
        if !alpha_l1.is_finite() || self.alpha.inf_on(self.t0, self.t1) < 0.0 {
            return Err(Error::Hypothesis {
                hypothesis: "sublinear growth".into(),
                detail: format!("alpha is not a nonnegative integrable function on [{}, {}]", self.t0, self.t1),
            });
        }
        let contraction = self.contraction(rate);
        let offset = self.d * self.start_norm + self.d * alpha_l1 + self.m_sup * alpha_l1 * self.history_seminorm;
        Ok(AprioriBounds {
            rate,
            contraction,
            offset,
            radius: offset / (1.0 - contraction),
            k_sup: self.k_sup,
            m_sup: self.m_sup,
            d: self.d,
            alpha_l1,
        })
    }

    /// Doubles the rate from 1 until the contraction factor drops below
    /// 1/2.
    pub fn bounds(&self) -> Result<AprioriBounds> {
        let mut rate = 1.0;
        for _ in 0..64 {
            let b = self.bounds_at(rate)?;
            if b.contraction < 0.5 {
                return Ok(b);
            }
            rate *= 2.0;
        }
        Err(Error::Hypothesis {
            hypothesis: "sublinear growth".into(),
            detail: "no weight rate makes the solution operator contractive".into(),
        })
    }
}

/// The invariant-ball constants of interval `k`; only the first interval
/// is supported.
pub fn apriori_radius(problem: &ProblemInstance, k: usize) -> Result<AprioriBounds> {
    if k != 1 {
        return Err(Error::Misuse(format!("a priori radius is available for interval 1, not {k}")));
    }
    let growth = problem.growth.as_ref().ok_or_else(|| Error::Hypothesis {
        hypothesis: "sublinear growth".into(),
        detail: "the right-hand side has no growth bound alpha".into(),
    })?;
    let (t0, t1) = problem.schedule.interval(1)?;
    let len = t1 - t0;
    let inputs = AprioriInputs {
        d: problem.evolution.bound_d(),
        alpha: growth.alpha.clone(),
        k_sup: problem.constants.k.sup_on(0.0, len),
        m_sup: problem.constants.m.sup_on(0.0, len),
        t0,
        t1,
        start_norm: problem.space.norm(problem.initial.current()),
        history_seminorm: seminorm(&problem.initial, &problem.weight)?,
    };
    inputs.bounds()
}

/// `max exp(-rate (t - t0)) ‖y(t)‖` over the nodes of the first segment.
pub fn weighted_sup_norm(traj: &Trajectory, rate: f64) -> f64 {
    let seg = &traj.segments()[0];
    let t0 = seg.start();
    seg.times
        .iter()
        .zip(&seg.values)
        .map(|(t, v)| (-rate * (t - t0)).exp() * traj.space().norm(v))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inputs(alpha: Profile) -> AprioriInputs {
        AprioriInputs {
            d: 1.0,
            alpha,
            k_sup: 1.0,
            m_sup: 1.0,
            t0: 0.0,
            t1: 1.0,
            start_norm: 1.0,
            history_seminorm: 2.0,
        }
    }

    #[test]
    fn zero_growth_gives_the_start_norm() {
        let b = inputs(Profile::constant(0.0)).bounds().unwrap();
        assert_eq!(b.contraction, 0.0);
        assert_eq!(b.radius, 1.0);
        assert_eq!(b.offset, b.radius);
    }

    #[test]
    fn worked_constants() {
        let b = inputs(Profile::constant(0.5)).bounds_at(2.0).unwrap();
        let expected = (1.0 - (-2.0f64).exp()) / 2.0;
        assert!((b.contraction - expected).abs() < 1e-12);
        assert!((b.offset - (1.0 + 0.5 + 0.5 * 2.0)).abs() < 1e-15);
        assert!((b.radius - b.offset / (1.0 - expected)).abs() < 1e-15);
    }

    #[test]
    fn quadrature_path_agrees_with_closed_form() {
        // same constant, but routed through the numerical path
        let alpha = Profile::Affine {
            intercept: 0.5,
            slope: 1e-300,
        };
        let num = inputs(alpha).contraction(2.0);
        let exact = inputs(Profile::constant(0.5)).contraction(2.0);
        assert!((num - exact).abs() < 1e-7, "{num} vs {exact}");
    }

    #[test]
    fn doubling_reaches_half() {
        let b = inputs(Profile::constant(3.0)).bounds().unwrap();
        assert!(b.contraction < 0.5);
        assert!(b.rate >= 2.0 && b.rate.log2().fract() == 0.0);
        assert!(b.radius * (1.0 - b.contraction) >= b.offset * (1.0 - 1e-15));
    }

    #[test]
    fn negative_alpha_is_rejected() {
        assert!(inputs(Profile::constant(-1.0)).bounds().is_err());
    }
}
