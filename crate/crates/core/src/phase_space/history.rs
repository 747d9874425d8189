use crate::error::{Error, Result};
use crate::space::{lincomb, scaled, StateSpace};

use super::samples::{RecentSegment, Samples};

/// `amp * exp(rate * theta)` on the far tail. `rate = 0` is a constant.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticForm {
    pub amp: Vec<f64>,
    pub rate: f64,
}

impl AnalyticForm {
    pub fn zero(dim: usize) -> Self {
        AnalyticForm {
            amp: vec![0.0; dim],
            rate: 0.0,
        }
    }

    pub fn constant(value: Vec<f64>) -> Self {
        AnalyticForm {
            amp: value,
            rate: 0.0,
        }
    }

    pub fn exponential(amp: Vec<f64>, rate: f64) -> Self {
        AnalyticForm { amp, rate }
    }

    pub fn is_zero(&self) -> bool {
        self.amp.iter().all(|&a| a == 0.0)
    }

    pub fn eval(&self, theta: f64) -> Vec<f64> {
        scaled((self.rate * theta).exp(), &self.amp)
    }

    /// The form of `theta -> self(theta + d)`.
    pub fn shifted(&self, d: f64) -> Self {
        AnalyticForm {
            amp: scaled((self.rate * d).exp(), &self.amp),
            rate: self.rate,
        }
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        AnalyticForm {
            amp: scaled(alpha, &self.amp),
            rate: self.rate,
        }
    }
}

/// What is known about the history below the sampled tail.
#[derive(Debug, Clone, PartialEq)]
pub enum Beyond {
    /// Exact closed form.
    Analytic(AnalyticForm),
    /// Certified bound `‖phi(theta)‖ <= bound * exp(rate * (theta + cutoff))`
    /// for `theta < -cutoff`. `rate = 0` is a plain sup bound.
    Envelope { bound: f64, rate: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailMode {
    GridTruncated,
    Analytic,
}

/// The history on `(-inf, -tau)`: optional samples on `[-cutoff, -tau]`
/// followed by a closed form or a certified envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct TailRepresentation {
    tau: f64,
    cutoff: f64,
    samples: Option<Samples>,
    beyond: Beyond,
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

impl TailRepresentation {
    pub fn analytic(tau: f64, form: AnalyticForm) -> Self {
        TailRepresentation {
            tau,
            cutoff: tau,
            samples: None,
            beyond: Beyond::Analytic(form),
        }
    }

    pub fn new(tau: f64, samples: Option<Samples>, beyond: Beyond) -> Result<Self> {
        let cutoff = match &samples {
            Some(s) => {
                if !close(s.end(), -tau) {
                    return Err(Error::Grid(format!(
                        "tail samples end at {} instead of -tau = {}",
                        s.end(),
                        -tau
                    )));
                }
                if s.len() < 2 {
                    return Err(Error::Grid("tail samples need two nodes".into()));
                }
                -s.start()
            }
            None => tau,
        };
        if let Beyond::Envelope { bound, rate } = beyond {
            if !(bound >= 0.0 && bound.is_finite()) {
                return Err(Error::config(
                    "phase_space.tail.bound",
                    "grid-truncated tail needs a finite nonnegative sup bound",
                ));
            }
            if !rate.is_finite() {
                return Err(Error::config("phase_space.tail.rate", "must be finite"));
            }
        }
        Ok(TailRepresentation {
            tau,
            cutoff,
            samples,
            beyond,
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// `Theta >= tau`: below `-Theta` only `beyond` describes the history.
    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn samples(&self) -> Option<&Samples> {
        self.samples.as_ref()
    }

    pub fn beyond(&self) -> &Beyond {
        &self.beyond
    }

    pub fn mode(&self) -> TailMode {
        match self.beyond {
            Beyond::Analytic(_) => TailMode::Analytic,
            Beyond::Envelope { .. } => TailMode::GridTruncated,
        }
    }

    fn eval(&self, theta: f64, right: bool) -> Option<Vec<f64>> {
        if theta >= -self.cutoff {
            let s = self.samples.as_ref()?;
            return if right {
                s.eval_right(theta)
            } else {
                s.eval_left(theta)
            };
        }
        match &self.beyond {
            Beyond::Analytic(f) => Some(f.eval(theta)),
            Beyond::Envelope { .. } => None,
        }
    }

    /// Envelope `(bound, rate)` valid below `-at` for `at >= cutoff`.
    fn envelope_below(&self, at: f64, space: &StateSpace) -> (f64, f64) {
        match &self.beyond {
            Beyond::Analytic(f) => (space.norm(&f.amp) * (-f.rate * at).exp(), f.rate),
            Beyond::Envelope { bound, rate } => {
                if close(at, self.cutoff) {
                    (*bound, *rate)
                } else {
                    // sampled stretch between -cutoff and -at joins in
                    let mut sup = *bound;
                    if let Some(s) = &self.samples {
                        for (g, v) in s.grid().iter().zip(s.values()) {
                            if *g <= -at {
                                sup = sup.max(space.norm(v));
                            }
                        }
                    }
                    (sup, 0.0)
                }
            }
        }
    }
}

/// An element of the fading-memory phase space: a piecewise-continuous
/// recent window on `[-tau, 0]` plus a weighted-integrable tail.
#[derive(Debug, Clone, PartialEq)]
pub struct History {
    space: StateSpace,
    recent: RecentSegment,
    tail: TailRepresentation,
}

impl History {
    pub fn new(space: StateSpace, recent: RecentSegment, tail: TailRepresentation) -> Result<Self> {
        let tau = tail.tau();
        if !close(recent.start(), -tau) || !close(recent.end(), 0.0) {
            return Err(Error::Grid(format!(
                "recent window [{}, {}] does not cover [-{tau}, 0]",
                recent.start(),
                recent.end()
            )));
        }
        if recent.len() < 2 {
            return Err(Error::Grid("recent window needs two nodes".into()));
        }
        if recent.dim() != space.dim() {
            return Err(Error::Grid(format!(
                "history dimension {} does not match state dimension {}",
                recent.dim(),
                space.dim()
            )));
        }
        let tail_at_tau = match (&tail.samples, &tail.beyond) {
            (Some(s), _) => Some(s.values().last().unwrap().clone()),
            (None, Beyond::Analytic(f)) => Some(f.eval(-tau)),
            (None, Beyond::Envelope { .. }) => None,
        };
        if let Some(t) = tail_at_tau {
            if t.len() != space.dim() {
                return Err(Error::Grid("tail dimension mismatch".into()));
            }
            let gap = space.distance(&t, &recent.values()[0]);
            let scale = 1.0 + space.norm(&t);
            if gap > 1e-8 * scale {
                return Err(Error::Grid(format!(
                    "recent window and tail disagree at -tau by {gap:e}"
                )));
            }
        }
        Ok(History {
            space,
            recent,
            tail,
        })
    }

    /// Samples `form` on `[-tau, 0]` with step at most `h` and keeps it as
    /// the exact tail.
    pub fn from_analytic(space: StateSpace, tau: f64, h: f64, form: AnalyticForm) -> Result<Self> {
        let recent = Samples::from_fn(-tau, 0.0, h, space.dim(), |t| form.eval(t));
        History::new(space, recent, TailRepresentation::analytic(tau, form))
    }

    pub fn constant(space: StateSpace, tau: f64, h: f64, value: Vec<f64>) -> Result<Self> {
        Self::from_analytic(space, tau, h, AnalyticForm::constant(value))
    }

    pub fn zero(space: StateSpace, tau: f64, h: f64) -> Result<Self> {
        let dim = space.dim();
        Self::from_analytic(space, tau, h, AnalyticForm::zero(dim))
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn tau(&self) -> f64 {
        self.tail.tau()
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn recent(&self) -> &RecentSegment {
        &self.recent
    }

    pub fn tail(&self) -> &TailRepresentation {
        &self.tail
    }

    fn eval(&self, theta: f64, right: bool) -> Option<Vec<f64>> {
        if theta > 0.0 {
            None
        } else if theta >= -self.tau() {
            if right {
                self.recent.eval_right(theta)
            } else {
                self.recent.eval_left(theta)
            }
        } else {
            self.tail.eval(theta, right)
        }
    }

    /// `phi(theta)`, left limit at jumps. `None` where only an envelope is
    /// known.
    pub fn eval_left(&self, theta: f64) -> Option<Vec<f64>> {
        self.eval(theta, false)
    }

    pub fn eval_right(&self, theta: f64) -> Option<Vec<f64>> {
        self.eval(theta, true)
    }

    /// `phi(0)`
    pub fn current(&self) -> &[f64] {
        self.recent.values().last().unwrap()
    }

    /// Every sampled node of the history in increasing order, tail first.
    pub fn nodes(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .tail
            .samples
            .iter()
            .flat_map(|s| s.grid().iter().copied())
            .collect();
        v.extend_from_slice(self.recent.grid());
        v
    }

    pub fn scaled(&self, alpha: f64) -> History {
        let f = |v: &[f64]| scaled(alpha, v);
        History {
            space: self.space.clone(),
            recent: self.recent.map_values(f),
            tail: TailRepresentation {
                tau: self.tail.tau,
                cutoff: self.tail.cutoff,
                samples: self.tail.samples.as_ref().map(|s| s.map_values(f)),
                beyond: match &self.tail.beyond {
                    Beyond::Analytic(a) => Beyond::Analytic(a.scaled(alpha)),
                    Beyond::Envelope { bound, rate } => Beyond::Envelope {
                        bound: bound * alpha.abs(),
                        rate: *rate,
                    },
                },
            },
        }
    }

    /// `alpha * a + beta * b` on the union of both grids.
    pub fn combine(alpha: f64, a: &History, beta: f64, b: &History) -> Result<History> {
        if a.space != b.space || !close(a.tau(), b.tau()) {
            return Err(Error::Grid("histories live in different spaces".into()));
        }
        let tau = a.tau();
        let space = a.space.clone();
        let dim = space.dim();

        let at = |theta: f64, right: bool| -> Option<(Vec<f64>, Vec<f64>)> {
            let l = lincomb(alpha, &a.eval(theta, false)?, beta, &b.eval(theta, false)?);
            let r = if right {
                lincomb(alpha, &a.eval(theta, true)?, beta, &b.eval(theta, true)?)
            } else {
                l.clone()
            };
            Some((l, r))
        };
        let build = |nodes: Vec<f64>| -> Result<Samples> {
            let mut s = Samples::builder(dim);
            let last = nodes.len() - 1;
            for (i, theta) in nodes.into_iter().enumerate() {
                // right limits inside the piece only
                let (l, r) = at(theta, i < last)
                    .ok_or_else(|| Error::Grid(format!("history unknown at {theta}")))?;
                if l != r {
                    s.push_jump(theta, l, r);
                } else {
                    s.push(theta, l);
                }
            }
            s.build()
        };

        let mut recent_nodes: Vec<f64> = a
            .recent
            .grid()
            .iter()
            .chain(b.recent.grid())
            .copied()
            .collect();
        recent_nodes.sort_by(f64::total_cmp);
        recent_nodes.dedup();
        let recent = build(recent_nodes)?;

        let known = |h: &History| match h.tail.beyond {
            Beyond::Analytic(_) => f64::INFINITY,
            Beyond::Envelope { .. } => h.tail.cutoff,
        };
        let cutoff = a
            .tail
            .cutoff
            .max(b.tail.cutoff)
            .min(known(a).min(known(b)));
        let samples = if close(cutoff, tau) {
            None
        } else {
            let mut nodes: Vec<f64> = a
                .nodes()
                .into_iter()
                .chain(b.nodes())
                .filter(|&t| t >= -cutoff && t <= -tau)
                .chain([-cutoff, -tau])
                .collect();
            nodes.sort_by(f64::total_cmp);
            nodes.dedup();
            Some(build(nodes)?)
        };

        let beyond = match (&a.tail.beyond, &b.tail.beyond) {
            (Beyond::Analytic(fa), Beyond::Analytic(fb))
                if fa.rate == fb.rate || fa.is_zero() || fb.is_zero() =>
            {
                let rate = if fa.is_zero() { fb.rate } else { fa.rate };
                Beyond::Analytic(AnalyticForm {
                    amp: lincomb(alpha, &fa.amp, beta, &fb.amp),
                    rate,
                })
            }
            _ => {
                let (ba, ra) = a.tail.envelope_below(cutoff, &space);
                let (bb, rb) = b.tail.envelope_below(cutoff, &space);
                Beyond::Envelope {
                    bound: alpha.abs() * ba + beta.abs() * bb,
                    rate: ra.min(rb),
                }
            }
        };
        History::new(space, recent, TailRepresentation::new(tau, samples, beyond)?)
    }

    /// Converts an exact tail into grid-truncated form: samples out to
    /// `-cutoff` with step at most `h`, then a certified envelope.
    pub fn truncated(&self, cutoff: f64, h: f64) -> Result<History> {
        let form = match &self.tail.beyond {
            Beyond::Analytic(f) => f.clone(),
            Beyond::Envelope { .. } => {
                return Err(Error::Misuse("history is already grid-truncated".into()))
            }
        };
        if cutoff < self.tail.cutoff {
            return Err(Error::config(
                "phase_space.theta",
                format!("cutoff {cutoff} is below the sampled tail {}", self.tail.cutoff),
            ));
        }
        let samples = self.extend_samples(cutoff, h, &form)?;
        let bound = self.space.norm(&form.amp) * (-form.rate * cutoff).exp();
        let tail = TailRepresentation::new(
            self.tau(),
            samples,
            Beyond::Envelope {
                bound,
                rate: form.rate,
            },
        )?;
        History::new(self.space.clone(), self.recent.clone(), tail)
    }

    /// The same function with its tail sampled out to `-cutoff`; the exact
    /// form still covers everything below.
    pub fn sampled_to(&self, cutoff: f64, h: f64) -> Result<History> {
        let form = match &self.tail.beyond {
            Beyond::Analytic(f) => f.clone(),
            Beyond::Envelope { .. } => {
                return Err(Error::Misuse("history is already grid-truncated".into()))
            }
        };
        if cutoff < self.tail.cutoff {
            return Err(Error::config(
                "cutoff",
                format!("{cutoff} lies inside the sampled tail"),
            ));
        }
        let samples = self.extend_samples(cutoff, h, &form)?;
        let tail = TailRepresentation::new(self.tau(), samples, Beyond::Analytic(form))?;
        History::new(self.space.clone(), self.recent.clone(), tail)
    }

    /// The history with everything below `-cutoff` replaced by zero.
    pub fn zeroed_beyond(&self, cutoff: f64, h: f64) -> Result<History> {
        let form = match &self.tail.beyond {
            Beyond::Analytic(f) => f.clone(),
            Beyond::Envelope { .. } => {
                return Err(Error::Misuse(
                    "cannot zero the tail of a grid-truncated history".into(),
                ))
            }
        };
        if cutoff < self.tail.cutoff {
            return Err(Error::config(
                "cutoff",
                format!("{cutoff} lies inside the sampled tail"),
            ));
        }
        let samples = self.extend_samples(cutoff, h, &form)?;
        let tail = TailRepresentation::new(
            self.tau(),
            samples,
            Beyond::Analytic(AnalyticForm::zero(self.dim())),
        )?;
        History::new(self.space.clone(), self.recent.clone(), tail)
    }

    fn extend_samples(&self, cutoff: f64, h: f64, form: &AnalyticForm) -> Result<Option<Samples>> {
        if close(cutoff, self.tau()) {
            return Ok(self.tail.samples.clone());
        }
        let old = self.tail.cutoff;
        let mut b = Samples::builder(self.dim());
        if cutoff > old {
            let fresh = Samples::from_fn(-cutoff, -old, h, self.dim(), |t| form.eval(t));
            for (g, v) in fresh.grid().iter().zip(fresh.values()) {
                b.push(*g, v.clone());
            }
        }
        match &self.tail.samples {
            Some(s) => {
                for (i, (g, v)) in s.grid().iter().zip(s.values()).enumerate() {
                    let r = s.panel_start(i);
                    if r != v.as_slice() {
                        b.push_jump(*g, v.clone(), r.to_vec());
                    } else {
                        b.push(*g, v.clone());
                    }
                }
            }
            None => {
                b.push(-self.tau(), form.eval(-self.tau()));
            }
        }
        Ok(Some(b.build()?))
    }

    /// `∫_{-inf}^{-at} ‖phi‖` for `at` at or beyond the sampled tail.
    pub fn tail_abs_mass(&self, at: f64) -> Result<f64> {
        if at < self.tail.cutoff {
            return Err(Error::Misuse(format!(
                "tail mass below -{at} needs an exact tail beyond -{}",
                self.tail.cutoff
            )));
        }
        match &self.tail.beyond {
            Beyond::Analytic(f) if f.is_zero() => Ok(0.0),
            Beyond::Analytic(f) if f.rate > 0.0 => {
                Ok(self.space.norm(&f.amp) * (-f.rate * at).exp() / f.rate)
            }
            Beyond::Analytic(_) => Err(Error::NotIntegrable(
                "analytic tail does not decay".into(),
            )),
            Beyond::Envelope { bound, rate } if *bound == 0.0 || *rate > 0.0 => {
                if *bound == 0.0 {
                    Ok(0.0)
                } else {
                    Ok(bound * (-rate * (at - self.tail.cutoff)).exp() / rate)
                }
            }
            Beyond::Envelope { .. } => Err(Error::NotIntegrable(
                "envelope does not decay".into(),
            )),
        }
    }
}
