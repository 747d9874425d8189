//! Two-parameter evolution systems `U(t, s)` on the triangle
//! `t0 <= s <= t <= T`.
//!
//! Only the multiplication evolution generated by `A(t)v = -b(t, .) v`
//! ships: `[U(t, s) v](x) = exp(-∫_s^t b(σ, x) dσ) v(x)`.

use std::fmt::Debug;

use serde::Serialize;

use crate::error::{Error, Result};

pub trait EvolutionSystem: Debug + Send + Sync {
    fn t0(&self) -> f64;

    fn t_end(&self) -> f64;

    fn dim(&self) -> usize;

    /// `U(t, s) v`, linear in `v`.
    fn apply(&self, t: f64, s: f64, v: &[f64]) -> Result<Vec<f64>>;

    /// Operator norm of `U(t, s)` in the state norm. The default is a lower
    /// estimate from the images of the unit coordinate vectors.
    fn operator_norm(&self, t: f64, s: f64) -> Result<f64> {
        let n = self.dim();
        let mut best: f64 = 0.0;
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            let u = self.apply(t, s, &e)?;
            best = best.max(u.iter().fold(0.0, |m: f64, x| m.max(x.abs())));
        }
        Ok(best)
    }

    /// `D` with `‖U(t, s)‖ <= D` on the triangle.
    fn bound_d(&self) -> f64;

    fn check_triangle(&self, t: f64, s: f64) -> Result<()> {
        let (lo, hi) = (self.t0(), self.t_end());
        let eps = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
        if s < lo - eps || t > hi + eps || s > t + eps {
            return Err(Error::Domain {
                t: if s < lo - eps || s > t + eps { s } else { t },
                lo,
                hi,
            });
        }
        Ok(())
    }
}

/// Diagonal evolution from a sampled removal coefficient `b(t, x_i)`.
///
/// `B(t, x) = ∫_{t0}^t b` is accumulated once by the trapezoid rule and
/// interpolated linearly in `t`, so `U(t,r) U(r,s) = U(t,s)` holds up to
/// rounding of the exponent sums.
#[derive(Debug, Clone)]
pub struct MultiplicationEvolution {
    times: Vec<f64>,
    b: Vec<Vec<f64>>,
    cum_b: Vec<Vec<f64>>,
    d: f64,
}

impl MultiplicationEvolution {
    /// `b[j][i]` is `b(times[j], x_i)`. Signed coefficients are accepted;
    /// [`Self::positivity_violations`] reports them.
    pub fn new(times: Vec<f64>, b: Vec<Vec<f64>>) -> Result<Self> {
        if times.len() < 2 || times.len() != b.len() {
            return Err(Error::Grid("removal table needs >= 2 times, one row each".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Grid("removal table times not increasing".into()));
        }
        let dim = b[0].len();
        if dim == 0 || b.iter().any(|r| r.len() != dim) {
            return Err(Error::Grid("removal table rows differ in length".into()));
        }
        if b.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::config("evolution.b", "non-finite coefficient"));
        }
        let mut cum_b = vec![vec![0.0; dim]; times.len()];
        for j in 1..times.len() {
            let h = times[j] - times[j - 1];
            for i in 0..dim {
                cum_b[j][i] = cum_b[j - 1][i] + 0.5 * h * (b[j - 1][i] + b[j][i]);
            }
        }
        // sup over s <= t of exp(B(s) - B(t)), per node in one sweep
        let mut worst: f64 = 0.0;
        for i in 0..dim {
            let mut max_prev = f64::NEG_INFINITY;
            for row in &cum_b {
                max_prev = max_prev.max(row[i]);
                worst = worst.max(max_prev - row[i]);
            }
        }
        Ok(MultiplicationEvolution {
            times,
            b,
            cum_b,
            d: worst.exp(),
        })
    }

    /// Samples `b(t, x)` on a uniform time grid of step at most `h`.
    pub fn from_fn(t0: f64, t_end: f64, h: f64, nodes: &[f64], b: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if !(t_end > t0) || !(h > 0.0) {
            return Err(Error::config("evolution", "need t_end > t0 and h > 0"));
        }
        let n = crate::phase_space::panel_count(t_end - t0, h);
        let times: Vec<f64> = (0..=n)
            .map(|j| if j == n { t_end } else { t0 + (t_end - t0) * j as f64 / n as f64 })
            .collect();
        let table = times
            .iter()
            .map(|&t| nodes.iter().map(|&x| b(t, x)).collect())
            .collect();
        Self::new(times, table)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn coefficients(&self) -> &[Vec<f64>] {
        &self.b
    }

    fn locate(&self, t: f64) -> (usize, f64) {
        let j = self
            .times
            .partition_point(|&x| x <= t)
            .clamp(1, self.times.len() - 1);
        let (a, c) = (self.times[j - 1], self.times[j]);
        (j - 1, ((t - a) / (c - a)).clamp(0.0, 1.0))
    }

    /// `B(t, x_i)` for every node.
    pub fn cumulative(&self, t: f64) -> Vec<f64> {
        let (j, w) = self.locate(t);
        if w == 0.0 {
            return self.cum_b[j].clone();
        }
        if w == 1.0 {
            return self.cum_b[j + 1].clone();
        }
        self.cum_b[j]
            .iter()
            .zip(&self.cum_b[j + 1])
            .map(|(a, c)| a + w * (c - a))
            .collect()
    }

    /// `b(t, x_i)` interpolated in time.
    pub fn coefficient(&self, t: f64) -> Vec<f64> {
        let (j, w) = self.locate(t);
        self.b[j]
            .iter()
            .zip(&self.b[j + 1])
            .map(|(a, c)| a + w * (c - a))
            .collect()
    }

    /// Sampled points with `b(t, x) <= 0`, as `(t, node index, value)`.
    pub fn positivity_violations(&self) -> Vec<(f64, usize, f64)> {
        let mut out = Vec::new();
        for (t, row) in self.times.iter().zip(&self.b) {
            for (i, &v) in row.iter().enumerate() {
                if v <= 0.0 {
                    out.push((*t, i, v));
                }
            }
        }
        out
    }

    fn factors(&self, t: f64, s: f64) -> Vec<f64> {
        let bt = self.cumulative(t);
        let bs = self.cumulative(s);
        // exponents differenced before exponentiation
        bt.iter().zip(&bs).map(|(a, c)| (-(a - c)).exp()).collect()
    }
}

impl EvolutionSystem for MultiplicationEvolution {
    fn t0(&self) -> f64 {
        self.times[0]
    }

    fn t_end(&self) -> f64 {
        *self.times.last().unwrap()
    }

    fn dim(&self) -> usize {
        self.b[0].len()
    }

    fn apply(&self, t: f64, s: f64, v: &[f64]) -> Result<Vec<f64>> {
        self.check_triangle(t, s)?;
        if v.len() != self.dim() {
            return Err(Error::Grid(format!(
                "state of dimension {} for evolution of dimension {}",
                v.len(),
                self.dim()
            )));
        }
        if t == s {
            return Ok(v.to_vec());
        }
        Ok(self
            .factors(t, s)
            .iter()
            .zip(v)
            .map(|(f, x)| f * x)
            .collect())
    }

    fn operator_norm(&self, t: f64, s: f64) -> Result<f64> {
        self.check_triangle(t, s)?;
        Ok(self.factors(t, s).into_iter().fold(0.0, f64::max))
    }

    fn bound_d(&self) -> f64 {
        self.d
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CompositionReport {
    pub samples: usize,
    /// `max ‖U(t,r)U(r,s)v - U(t,s)v‖_inf / ‖v‖_inf`
    pub max_relative_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

pub const COMPOSITION_RTOL: f64 = 1e-12;

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m: f64, x| m.max(x.abs()))
}

/// Checks `U(t,r) U(r,s) = U(t,s)` on the given triples and vectors.
pub fn check_composition(ev: &dyn EvolutionSystem, triples: &[(f64, f64, f64)], vs: &[Vec<f64>]) -> Result<CompositionReport> {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for &(t, r, s) in triples {
        for v in vs {
            let scale = max_abs(v);
            if scale == 0.0 {
                continue;
            }
            let two = ev.apply(t, r, &ev.apply(r, s, v)?)?;
            let one = ev.apply(t, s, v)?;
            let dev = two.iter().zip(&one).fold(0.0, |m: f64, (a, b)| m.max((a - b).abs()));
            worst = worst.max(dev / scale);
            count += 1;
        }
    }
    Ok(CompositionReport {
        samples: count,
        max_relative_deviation: worst,
        tolerance: COMPOSITION_RTOL,
        passed: worst <= COMPOSITION_RTOL,
    })
}

/// Sampled `sup ‖U(t, s)‖` over all ordered pairs of the grid.
pub fn estimate_d(ev: &dyn EvolutionSystem, grid: &[f64]) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::config("grid", "empty sample grid"));
    }
    let mut best: f64 = 0.0;
    for (i, &s) in grid.iter().enumerate() {
        for &t in &grid[i..] {
            if t >= s {
                best = best.max(ev.operator_norm(t, s)?);
            }
        }
    }
    Ok(best)
}
