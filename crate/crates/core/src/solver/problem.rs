use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::EvolutionSystem;
use crate::inclusion::{ControlMultimap, GrowthData, Nonlinearity};
use crate::phase_space::{weighted_history_integral, FadingWeight, History, PhaseSpaceConstants};
use crate::space::StateSpace;

/// Scalar impulse map applied pointwise to the memory integral
/// `z(x) = ∫_{-inf}^0 phi(theta)(x) dtheta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ImpulseMap {
    /// `value`, independent of the history.
    Constant { value: f64 },
    /// `a * z`; bounded only on bounded sets of histories.
    Linear { a: f64 },
    /// `c * tanh(z / c)`
    Saturating { c: f64 },
}

impl ImpulseMap {
    pub fn uses_memory(&self) -> bool {
        !matches!(self, ImpulseMap::Constant { .. })
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self, ImpulseMap::Linear { a } if *a != 0.0)
    }

    pub fn eval(&self, z: f64) -> f64 {
        match *self {
            ImpulseMap::Constant { value } => value,
            ImpulseMap::Linear { a } => a * z,
            ImpulseMap::Saturating { c } => {
                if c == 0.0 {
                    0.0
                } else {
                    c * (z / c).tanh()
                }
            }
        }
    }

    /// The impulse vector given the memory integral, which may be omitted
    /// for constant maps.
    pub fn apply(&self, dim: usize, memory: Option<&[f64]>) -> Result<Vec<f64>> {
        match (self, memory) {
            (ImpulseMap::Constant { value }, _) => Ok(vec![*value; dim]),
            (_, Some(z)) => Ok(z.iter().map(|z| self.eval(*z)).collect()),
            (_, None) => Err(Error::Misuse("impulse map needs the memory integral".into())),
        }
    }

    /// `I(phi)`, computing the memory integral from the history.
    pub fn apply_history(&self, history: &History) -> Result<Vec<f64>> {
        if self.uses_memory() {
            let z = weighted_history_integral(history)?;
            self.apply(history.dim(), Some(&z))
        } else {
            self.apply(history.dim(), None)
        }
    }
}

/// `t0 < t_1 < ... < t_m < T` with one impulse map per interior time.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpulseSchedule {
    t0: f64,
    t_end: f64,
    times: Vec<f64>,
    maps: Vec<ImpulseMap>,
}

impl ImpulseSchedule {
    pub fn new(t0: f64, t_end: f64, times: Vec<f64>, maps: Vec<ImpulseMap>) -> Result<Self> {
        if !(t0.is_finite() && t_end.is_finite() && t_end > t0) {
            return Err(Error::config("schedule.t_end", format!("need t_end > t0, got [{t0}, {t_end}]")));
        }
        if times.len() != maps.len() {
            return Err(Error::config(
                "schedule.impulses",
                format!("{} impulse times but {} impulse maps", times.len(), maps.len()),
            ));
        }
        if let Some(t) = times.iter().find(|&&t| !(t > t0 && t < t_end)) {
            return Err(Error::config(
                "schedule.times",
                format!("impulse time {t} is not inside ({t0}, {t_end})"),
            ));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config("schedule.times", "impulse times must be strictly increasing"));
        }
        Ok(ImpulseSchedule {
            t0,
            t_end,
            times,
            maps,
        })
    }

    pub fn without_impulses(t0: f64, t_end: f64) -> Result<Self> {
        Self::new(t0, t_end, Vec::new(), Vec::new())
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn maps(&self) -> &[ImpulseMap] {
        &self.maps
    }

    /// Number of impulses `m`; there are `m + 1` intervals.
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `[t_{k-1}, t_k]` for `k` in `1..=m+1`.
    pub fn interval(&self, k: usize) -> Result<(f64, f64)> {
        let m = self.times.len();
        if k == 0 || k > m + 1 {
            return Err(Error::Misuse(format!("interval {k} outside 1..={}", m + 1)));
        }
        let a = if k == 1 { self.t0 } else { self.times[k - 2] };
        let b = if k == m + 1 { self.t_end } else { self.times[k - 1] };
        Ok((a, b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quadrature {
    #[default]
    Trapezoid,
}

fn default_max_iters() -> usize {
    200
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    /// Largest time step of the solver grid.
    pub h: f64,
    pub picard_tol: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default)]
    pub quadrature: Quadrature,
}

impl SolverConfig {
    pub fn new(h: f64, picard_tol: f64) -> Self {
        SolverConfig {
            h,
            picard_tol,
            max_iters: default_max_iters(),
            quadrature: Quadrature::Trapezoid,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::config("solver.h", "must be positive"));
        }
        if !(self.picard_tol > 0.0) {
            return Err(Error::config("solver.picard_tol", "must be positive"));
        }
        if self.max_iters == 0 {
            return Err(Error::config("solver.max_iters", "must be at least 1"));
        }
        Ok(())
    }

    pub fn with_h(&self, h: f64) -> Self {
        SolverConfig { h, ..self.clone() }
    }
}

/// Everything that defines one impulsive Cauchy problem.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub space: StateSpace,
    pub weight: FadingWeight,
    pub constants: PhaseSpaceConstants,
    pub initial: History,
    pub evolution: Arc<dyn EvolutionSystem>,
    pub nonlinearity: Nonlinearity,
    pub control: ControlMultimap,
    /// `None` when the right-hand side has no sublinear bound.
    pub growth: Option<GrowthData>,
    pub schedule: ImpulseSchedule,
}

impl ProblemInstance {
    /// Checks that all parts agree on dimension, window length and time
    /// range.
    pub fn validate(&self) -> Result<()> {
        let dim = self.space.dim();
        if self.initial.dim() != dim || self.evolution.dim() != dim {
            return Err(Error::config(
                "population.n_space",
                format!(
                    "state dimension {dim}, history {}, evolution {}",
                    self.initial.dim(),
                    self.evolution.dim()
                ),
            ));
        }
        if (self.initial.tau() - self.weight.tau()).abs() > 1e-12 * self.weight.tau() {
            return Err(Error::config(
                "phase_space.tau",
                format!("history window {} but weight window {}", self.initial.tau(), self.weight.tau()),
            ));
        }
        let eps = 1e-12 * (1.0 + self.schedule.t_end().abs());
        if self.evolution.t0() > self.schedule.t0() + eps || self.evolution.t_end() < self.schedule.t_end() - eps {
            return Err(Error::config(
                "evolution",
                format!(
                    "evolution covers [{}, {}], problem needs [{}, {}]",
                    self.evolution.t0(),
                    self.evolution.t_end(),
                    self.schedule.t0(),
                    self.schedule.t_end()
                ),
            ));
        }
        self.control.validate(&self.space)
    }

    pub fn t0(&self) -> f64 {
        self.schedule.t0()
    }

    pub fn t_end(&self) -> f64 {
        self.schedule.t_end()
    }

    /// Whether the solver has to track the memory integral.
    pub fn needs_memory(&self) -> bool {
        self.nonlinearity.uses_memory() || self.schedule.maps().iter().any(ImpulseMap::uses_memory)
    }

    pub fn with_initial(&self, initial: History) -> Self {
        ProblemInstance {
            initial,
            ..self.clone()
        }
    }
}
