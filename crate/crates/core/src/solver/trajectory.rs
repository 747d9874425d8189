use crate::error::{Error, Result};
use crate::phase_space::History;
use crate::space::StateSpace;

/// The solution on one inter-impulse interval `[t_{k-1}, t_k]`. The first
/// value is the right limit at `t_{k-1}`, the last the left limit at `t_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub times: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl Segment {
    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn first(&self) -> &[f64] {
        &self.values[0]
    }

    pub fn last(&self) -> &[f64] {
        self.values.last().unwrap()
    }

    fn eval(&self, t: f64) -> Vec<f64> {
        match self.times.binary_search_by(|g| g.total_cmp(&t)) {
            Ok(i) => self.values[i].clone(),
            Err(0) => self.values[0].clone(),
            Err(i) if i == self.times.len() => self.last().to_vec(),
            Err(i) => {
                let (a, b) = (self.times[i - 1], self.times[i]);
                let w = (t - a) / (b - a);
                crate::space::lincomb(1.0 - w, &self.values[i - 1], w, &self.values[i])
            }
        }
    }
}

/// `y(t_k+) = y(t_k) + I_k(y_{t_k})`
#[derive(Debug, Clone, PartialEq)]
pub struct JumpRecord {
    pub time: f64,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
    pub impulse: Vec<f64>,
}

/// Row marker of the columnar trajectory format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Continuous,
    Left,
    Right,
}

impl Side {
    pub fn tag(self) -> &'static str {
        match self {
            Side::Continuous => "",
            Side::Left => "L",
            Side::Right => "R",
        }
    }
}

/// A piecewise-continuous solution on `[t0, T]` together with its initial
/// history.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    space: StateSpace,
    initial: History,
    segments: Vec<Segment>,
    jumps: Vec<JumpRecord>,
}

impl Trajectory {
    pub fn new(space: StateSpace, initial: History, segments: Vec<Segment>, jumps: Vec<JumpRecord>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::Grid("trajectory has no segments".into()));
        }
        if jumps.len() + 1 != segments.len() {
            return Err(Error::Grid(format!(
                "{} segments need {} jump records, got {}",
                segments.len(),
                segments.len() - 1,
                jumps.len()
            )));
        }
        for seg in &segments {
            if seg.times.len() < 2 || seg.times.len() != seg.values.len() {
                return Err(Error::Grid("segment needs matching times and values".into()));
            }
            if seg.times.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::Grid("segment times not increasing".into()));
            }
            if seg.values.iter().any(|v| v.len() != space.dim()) {
                return Err(Error::Grid("segment value of wrong dimension".into()));
            }
        }
        for (k, j) in jumps.iter().enumerate() {
            let (prev, next) = (&segments[k], &segments[k + 1]);
            if prev.end() != j.time || next.start() != j.time {
                return Err(Error::Grid(format!("jump at {} does not join segments", j.time)));
            }
            if prev.last() != j.left.as_slice() || next.first() != j.right.as_slice() {
                return Err(Error::Grid(format!("jump at {} disagrees with segments", j.time)));
            }
            let exact = j
                .left
                .iter()
                .zip(&j.impulse)
                .zip(&j.right)
                .all(|((l, i), r)| l + i == *r);
            if !exact {
                return Err(Error::Grid(format!("jump law violated at {}", j.time)));
            }
        }
        Ok(Trajectory {
            space,
            initial,
            segments,
            jumps,
        })
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn initial(&self) -> &History {
        &self.initial
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn jumps(&self) -> &[JumpRecord] {
        &self.jumps
    }

    pub fn t0(&self) -> f64 {
        self.segments[0].start()
    }

    pub fn t_end(&self) -> f64 {
        self.segments.last().unwrap().end()
    }

    /// `y(T)`
    pub fn final_value(&self) -> &[f64] {
        self.segments.last().unwrap().last()
    }

    pub fn max_spacing(&self) -> f64 {
        self.segments
            .iter()
            .flat_map(|s| s.times.windows(2).map(|w| w[1] - w[0]))
            .fold(0.0, f64::max)
    }

    pub fn node_count(&self) -> usize {
        self.segments.iter().map(|s| s.times.len()).sum()
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        let (lo, hi) = (self.t0(), self.t_end());
        if t < lo || t > hi {
            return Err(Error::Domain { t, lo, hi });
        }
        Ok(())
    }

    /// Segment holding `t` under left continuity: `(t_{k-1}, t_k]`, with
    /// `t0` in the first one.
    fn segment_of(&self, t: f64) -> &Segment {
        let k = self.jumps.partition_point(|j| j.time < t);
        &self.segments[k]
    }

    /// `y(t)` for `t` in `[t0, T]`, the left limit at impulse times.
    pub fn eval_left(&self, t: f64) -> Result<Vec<f64>> {
        self.check_domain(t)?;
        Ok(self.segment_of(t).eval(t))
    }

    /// `y(t+)`; differs from [`Self::eval_left`] only at impulse times.
    pub fn eval_right(&self, t: f64) -> Result<Vec<f64>> {
        self.check_domain(t)?;
        match self.jumps.iter().find(|j| j.time == t) {
            Some(j) => Ok(j.right.clone()),
            None => Ok(self.segment_of(t).eval(t)),
        }
    }

    /// `y(sigma)` on `(-inf, T]`, reading the initial history before `t0`.
    pub fn eval_extended(&self, sigma: f64, right: bool) -> Option<Vec<f64>> {
        let t0 = self.t0();
        if sigma < t0 {
            let theta = sigma - t0;
            if right {
                self.initial.eval_right(theta)
            } else {
                self.initial.eval_left(theta)
            }
        } else if sigma == t0 && !right {
            Some(self.initial.current().to_vec())
        } else if right {
            self.eval_right(sigma).ok()
        } else {
            self.eval_left(sigma).ok()
        }
    }

    /// Every stored node in time order; impulse times appear twice, first
    /// as the left limit then as the right limit.
    pub fn rows(&self) -> Vec<(f64, Side, &[f64])> {
        let mut out = Vec::with_capacity(self.node_count());
        let last_seg = self.segments.len() - 1;
        for (k, seg) in self.segments.iter().enumerate() {
            let n = seg.times.len();
            for (i, (t, v)) in seg.times.iter().zip(&seg.values).enumerate() {
                let side = if i == 0 && k > 0 {
                    Side::Right
                } else if i == n - 1 && k < last_seg {
                    Side::Left
                } else {
                    Side::Continuous
                };
                out.push((*t, side, v.as_slice()));
            }
        }
        out
    }

    /// `sup_{t0 <= s <= t} ‖y(s)‖` over the stored nodes, right limits
    /// included, plus the interpolated value at `t`.
    pub fn sup_norm_until(&self, t: f64) -> Result<f64> {
        let mut sup = self.space.norm(&self.eval_left(t)?);
        for seg in &self.segments {
            for (s, v) in seg.times.iter().zip(&seg.values) {
                if *s <= t {
                    sup = sup.max(self.space.norm(v));
                }
            }
        }
        Ok(sup)
    }

    /// `∫_{t0}^{t} y` componentwise by the trapezoid rule on the node grid.
    pub fn integral_until(&self, t: f64) -> Result<Vec<f64>> {
        self.check_domain(t)?;
        let mut acc = self.space.zeros();
        for seg in &self.segments {
            for i in 0..seg.times.len() - 1 {
                let (a, b) = (seg.times[i], seg.times[i + 1]);
                if a >= t {
                    return Ok(acc);
                }
                let (vb, hb) = if b <= t {
                    (seg.values[i + 1].clone(), b)
                } else {
                    (seg.eval(t), t)
                };
                let w = 0.5 * (hb - a);
                for ((x, l), r) in acc.iter_mut().zip(&seg.values[i]).zip(&vb) {
                    *x += w * (l + r);
                }
            }
        }
        Ok(acc)
    }

    /// A copy with `delta` added to the value at node `index` of segment
    /// `segment`; used to probe residual sensitivity.
    pub fn perturbed(&self, segment: usize, index: usize, delta: &[f64]) -> Result<Trajectory> {
        let mut t = self.clone();
        let seg = t
            .segments
            .get_mut(segment)
            .ok_or_else(|| Error::Misuse(format!("no segment {segment}")))?;
        let n = seg.values.len();
        if index == 0 || index + 1 >= n {
            return Err(Error::Misuse("only interior nodes can be perturbed".into()));
        }
        for (x, d) in seg.values[index].iter_mut().zip(delta) {
            *x += d;
        }
        Ok(t)
    }
}
