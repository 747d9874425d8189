use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::Profile;

/// Exponential fading weight `rho(theta) = exp(mu * theta)` on
/// `(-inf, -tau)` together with its shift bound `P(xi) = exp(p_rate * xi)`.
///
/// `p_rate` equals `mu` for the exact bound; other values are accepted so
/// that a wrong bound can be detected by [`check_fading`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingWeight {
    tau: f64,
    mu: f64,
    p_rate: f64,
}

impl FadingWeight {
    pub fn exponential(tau: f64, mu: f64) -> Result<Self> {
        Self::with_p_rate(tau, mu, mu)
    }

    pub fn with_p_rate(tau: f64, mu: f64, p_rate: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::config("phase_space.tau", format!("must be > 0, got {tau}")));
        }
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::config("phase_space.mu", format!("must be > 0, got {mu}")));
        }
        if !p_rate.is_finite() {
            return Err(Error::config("phase_space.p_rate", "must be finite"));
        }
        Ok(FadingWeight { tau, mu, p_rate })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn p_rate(&self) -> f64 {
        self.p_rate
    }

    pub fn rho(&self, theta: f64) -> f64 {
        (self.mu * theta).exp()
    }

    pub fn p_bound(&self, xi: f64) -> f64 {
        (self.p_rate * xi).exp()
    }

    /// `∫_{-inf}^{-cutoff} rho`
    pub fn tail_mass(&self, cutoff: f64) -> f64 {
        (-self.mu * cutoff).exp() / self.mu
    }

    /// Smallest cutoff with `tail_mass(cutoff) <= eps * tail_mass(tau)`.
    pub fn default_cutoff(&self, eps_tail: f64) -> f64 {
        self.tau + (1.0 / eps_tail).ln() / self.mu
    }

    /// `sup_{xi <= 0} P(xi)`, infinite when `P` grows toward `-inf`.
    pub fn p_sup(&self) -> f64 {
        if self.p_rate >= 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    }
}

/// The functions `K`, `M` and the constant `H` of the phase-space axioms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceConstants {
    pub k: Profile,
    pub m: Profile,
    pub h: f64,
}

impl PhaseSpaceConstants {
    /// `K ≡ 2 + tail_mass(tau)`, `M ≡ (1 + tau) sup P`, `H = 4`.
    ///
    /// The window part of `‖y_t‖` is at most `sup ‖y‖`, the tail part at
    /// most `tail_mass(tau) sup ‖y‖`; the shifted initial history adds at
    /// most `(1 + tau) sup P` times its seminorm. The extra unit in `K`
    /// absorbs quadrature overshoot.
    pub fn calibrated(weight: &FadingWeight) -> Self {
        PhaseSpaceConstants {
            k: Profile::constant(2.0 + weight.tail_mass(weight.tau())),
            m: Profile::constant((1.0 + weight.tau()) * weight.p_sup()),
            h: 4.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FadingRow {
    pub xi: f64,
    pub theta: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FadingReport {
    pub rows: Vec<FadingRow>,
    /// Samples outside `xi <= 0, theta < -tau`, not evaluated.
    pub skipped: usize,
    pub passed: bool,
}

/// Relative slack for `rho(xi + theta) <= P(xi) rho(theta)`: `exp(x)`
/// carries a relative rounding error of about `|x| eps` from its argument.
pub fn fading_rtol(exponent: f64) -> f64 {
    4.0 * f64::EPSILON * (1.0 + exponent.abs())
}

pub fn check_fading(weight: &FadingWeight, samples: &[(f64, f64)]) -> FadingReport {
    let mut rows = Vec::with_capacity(samples.len());
    let mut skipped = 0;
    for &(xi, theta) in samples {
        if !(xi <= 0.0 && theta < -weight.tau()) {
            skipped += 1;
            continue;
        }
        let lhs = weight.rho(xi + theta);
        let rhs = weight.p_bound(xi) * weight.rho(theta);
        rows.push(FadingRow {
            xi,
            theta,
            lhs,
            rhs,
            ok: lhs <= rhs * (1.0 + fading_rtol(weight.mu() * (xi + theta))),
        });
    }
    let passed = rows.iter().all(|r| r.ok);
    FadingReport {
        rows,
        skipped,
        passed,
    }
}
