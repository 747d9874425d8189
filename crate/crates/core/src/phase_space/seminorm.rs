use crate::error::{Error, Result};
use crate::space::StateSpace;

use super::history::{Beyond, History, TailRepresentation};
use super::samples::RecentSegment;
use super::weight::FadingWeight;

/// `(1/tau) ∫_{-tau}^0 ‖psi‖`, composite trapezoid split at the jumps.
pub fn seminorm_recent(recent: &RecentSegment, tau: f64, space: &StateSpace) -> Result<f64> {
    if recent.len() < 2 {
        return Err(Error::config("recent", "window grid is empty"));
    }
    Ok(recent.integrate(|_, v| space.norm(v)) / tau)
}

/// Weighted tail integral `∫_{-inf}^{-tau} rho ‖phi‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailSeminorm {
    /// Quadrature over the sampled tail plus the exact closed-form part.
    pub value: f64,
    /// Certified bound on the omitted part below the cutoff.
    pub remainder: f64,
    /// Estimated trapezoid error over the sampled tail.
    pub quadrature_error: f64,
}

impl TailSeminorm {
    pub fn error_bound(&self) -> f64 {
        self.remainder + self.quadrature_error
    }
}

pub fn seminorm_tail(tail: &TailRepresentation, weight: &FadingWeight, space: &StateSpace) -> Result<TailSeminorm> {
    if (tail.tau() - weight.tau()).abs() > 1e-12 * weight.tau() {
        return Err(Error::config(
            "phase_space.tau",
            format!("weight tau {} does not match history tau {}", weight.tau(), tail.tau()),
        ));
    }
    let mu = weight.mu();
    let integrand = |theta: f64, v: &[f64]| weight.rho(theta) * space.norm(v);
    let (mut value, quadrature_error) = match tail.samples() {
        Some(s) => (s.integrate(integrand), s.trapezoid_error_estimate(integrand)),
        None => (0.0, 0.0),
    };
    let cutoff = tail.cutoff();
    let mut remainder = 0.0;
    match tail.beyond() {
        Beyond::Analytic(f) if f.is_zero() => {}
        Beyond::Analytic(f) => {
            let s = mu + f.rate;
            if s <= 0.0 {
                return Err(Error::NotIntegrable(format!(
                    "rho * phi grows toward -inf (mu + rate = {s})"
                )));
            }
            value += space.norm(&f.amp) * (-s * cutoff).exp() / s;
        }
        Beyond::Envelope { bound, rate } => {
            if *bound > 0.0 {
                let s = mu + rate;
                if s <= 0.0 {
                    return Err(Error::NotIntegrable(format!(
                        "envelope rate {rate} defeats the weight"
                    )));
                }
                remainder = bound * (-mu * cutoff).exp() / s;
            }
        }
    }
    Ok(TailSeminorm {
        value,
        remainder,
        quadrature_error,
    })
}

/// `‖phi‖ = ‖phi|[-tau,0]‖_D + ‖phi|(-inf,-tau)‖_{L_rho}`. Only a seminorm:
/// two histories with equal values here need not coincide.
pub fn seminorm(history: &History, weight: &FadingWeight) -> Result<f64> {
    let recent = seminorm_recent(history.recent(), history.tau(), history.space())?;
    let tail = seminorm_tail(history.tail(), weight, history.space())?;
    Ok(recent + tail.value)
}

/// `∫_{-inf}^0 phi(theta) dtheta` componentwise. For a grid-truncated tail
/// the envelope part is omitted; [`memory_integral_with_bound`] reports it.
pub fn weighted_history_integral(history: &History) -> Result<Vec<f64>> {
    memory_integral_with_bound(history).map(|(v, _)| v)
}

/// The memory integral together with a bound on the norm of the omitted
/// envelope part.
pub fn memory_integral_with_bound(history: &History) -> Result<(Vec<f64>, f64)> {
    let mut acc = history.recent().integrate_vec();
    let tail = history.tail();
    if let Some(s) = tail.samples() {
        for (a, b) in acc.iter_mut().zip(s.integrate_vec()) {
            *a += b;
        }
    }
    let cutoff = tail.cutoff();
    let mut omitted = 0.0;
    match tail.beyond() {
        Beyond::Analytic(f) if f.is_zero() => {}
        Beyond::Analytic(f) => {
            if f.rate <= 0.0 {
                return Err(Error::NotIntegrable(format!(
                    "analytic tail with rate {} has no finite integral",
                    f.rate
                )));
            }
            let k = (-f.rate * cutoff).exp() / f.rate;
            for (a, amp) in acc.iter_mut().zip(&f.amp) {
                *a += k * amp;
            }
        }
        Beyond::Envelope { bound, rate } => {
            if *bound > 0.0 {
                if *rate <= 0.0 {
                    return Err(Error::NotIntegrable(
                        "grid-truncated tail has a non-decaying envelope".into(),
                    ));
                }
                omitted = bound / rate;
            }
        }
    }
    Ok((acc, omitted))
}
