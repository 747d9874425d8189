use serde::{Deserialize, Serialize};

/// A scalar function of one real variable, chosen by name.
///
/// Used for time-dependent data such as the growth bound `alpha(t)`, the
/// phase-space constants `K(s)` and `M(s)`, and the dominating function of
/// the removal coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    Constant { value: f64 },
    /// `intercept + slope * s`
    Affine { intercept: f64, slope: f64 },
    /// `amplitude * exp(rate * s)`
    Exponential { amplitude: f64, rate: f64 },
    Sum { terms: Vec<Profile> },
}

impl Profile {
    pub fn constant(value: f64) -> Self {
        Profile::Constant { value }
    }

    pub fn eval(&self, s: f64) -> f64 {
        match *self {
            Profile::Constant { value } => value,
            Profile::Affine { intercept, slope } => intercept + slope * s,
            Profile::Exponential { amplitude, rate } => amplitude * (rate * s).exp(),
            Profile::Sum { ref terms } => terms.iter().map(|p| p.eval(s)).sum(),
        }
    }

    /// Upper bound of the supremum over `[a, b]`. Exact for the monotone
    /// base forms; for sums it adds the termwise suprema.
    pub fn sup_on(&self, a: f64, b: f64) -> f64 {
        match self {
            Profile::Sum { terms } => terms.iter().map(|p| p.sup_on(a, b)).sum(),
            _ => self.eval(a).max(self.eval(b)),
        }
    }

    /// Lower bound of the infimum over `[a, b]`.
    pub fn inf_on(&self, a: f64, b: f64) -> f64 {
        match self {
            Profile::Sum { terms } => terms.iter().map(|p| p.inf_on(a, b)).sum(),
            _ => self.eval(a).min(self.eval(b)),
        }
    }

    /// `∫_a^b` in closed form.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        match *self {
            Profile::Constant { value } => value * (b - a),
            Profile::Affine { intercept, slope } => {
                intercept * (b - a) + 0.5 * slope * (b * b - a * a)
            }
            Profile::Exponential { amplitude, rate } => {
                if rate == 0.0 {
                    amplitude * (b - a)
                } else {
                    amplitude * ((rate * b).exp() - (rate * a).exp()) / rate
                }
            }
            Profile::Sum { ref terms } => terms.iter().map(|p| p.integral(a, b)).sum(),
        }
    }

    pub fn is_constant(&self) -> Option<f64> {
        match *self {
            Profile::Constant { value } => Some(value),
            Profile::Affine {
                intercept,
                slope: 0.0,
            } => Some(intercept),
            Profile::Exponential {
                amplitude,
                rate: 0.0,
            } => Some(amplitude),
            Profile::Sum { ref terms } => terms
                .iter()
                .map(|p| p.is_constant())
                .sum::<Option<f64>>(),
            _ => None,
        }
    }

    pub fn plus(&self, other: &Profile) -> Profile {
        match (self.is_constant(), other.is_constant()) {
            (Some(a), Some(b)) => Profile::constant(a + b),
            _ => Profile::Sum {
                terms: vec![self.clone(), other.clone()],
            },
        }
    }
}
