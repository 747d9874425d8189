//! Piecewise-linear sampled functions with finitely many jumps.
//!
//! The stored value at a grid node is the left limit. Where the function
//! jumps, the right limit is kept in a separate [`Jump`] record and every
//! panel starting at that node uses it, so panels never straddle a jump.

use crate::error::{Error, Result};
use crate::space::lincomb;

#[derive(Debug, Clone, PartialEq)]
pub struct Jump {
    pub at: f64,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
}

impl Jump {
    pub fn height(&self) -> Vec<f64> {
        lincomb(1.0, &self.right, -1.0, &self.left)
    }
}

/// A sampled, left-continuous, piecewise-linear function on `[start, end]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    grid: Vec<f64>,
    values: Vec<Vec<f64>>,
    jumps: Vec<Jump>,
    jump_nodes: Vec<usize>,
}

/// The recent window `[-tau, 0]` of a history.
pub type RecentSegment = Samples;

impl Samples {
    pub fn builder(dim: usize) -> SamplesBuilder {
        SamplesBuilder {
            dim,
            grid: Vec::new(),
            values: Vec::new(),
            rights: Vec::new(),
        }
    }

    /// Samples `f` on `[start, end]` with at least `ceil((end - start)/h)`
    /// equal panels.
    pub fn from_fn(start: f64, end: f64, h: f64, dim: usize, f: impl Fn(f64) -> Vec<f64>) -> Self {
        let n = panel_count(end - start, h);
        let mut b = Samples::builder(dim);
        for i in 0..=n {
            let theta = if i == n {
                end
            } else {
                start + (end - start) * i as f64 / n as f64
            };
            b.push(theta, f(theta));
        }
        b.build().expect("uniform grid is valid")
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    pub fn start(&self) -> f64 {
        self.grid[0]
    }

    pub fn end(&self) -> f64 {
        *self.grid.last().expect("non-empty samples")
    }

    pub fn max_spacing(&self) -> f64 {
        self.grid
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    fn jump_at_node(&self, i: usize) -> Option<&Jump> {
        self.jump_nodes
            .binary_search(&i)
            .ok()
            .map(|k| &self.jumps[k])
    }

    /// Value used at the left end of the panel starting at node `i`.
    pub fn panel_start(&self, i: usize) -> &[f64] {
        match self.jump_at_node(i) {
            Some(j) => &j.right,
            None => &self.values[i],
        }
    }

    fn locate(&self, theta: f64) -> Option<Located> {
        if self.grid.is_empty() || theta < self.start() || theta > self.end() {
            return None;
        }
        match self.grid.binary_search_by(|g| g.total_cmp(&theta)) {
            Ok(i) => Some(Located::Node(i)),
            Err(i) => Some(Located::Panel(i - 1)),
        }
    }

    fn interp(&self, i: usize, theta: f64) -> Vec<f64> {
        let (a, b) = (self.grid[i], self.grid[i + 1]);
        let w = (theta - a) / (b - a);
        lincomb(1.0 - w, self.panel_start(i), w, &self.values[i + 1])
    }

    /// Left limit at `theta`, `None` outside the sampled range.
    pub fn eval_left(&self, theta: f64) -> Option<Vec<f64>> {
        Some(match self.locate(theta)? {
            Located::Node(i) => self.values[i].clone(),
            Located::Panel(i) => self.interp(i, theta),
        })
    }

    /// Right limit at `theta`, `None` outside the sampled range.
    pub fn eval_right(&self, theta: f64) -> Option<Vec<f64>> {
        Some(match self.locate(theta)? {
            Located::Node(i) => self.panel_start(i).to_vec(),
            Located::Panel(i) => self.interp(i, theta),
        })
    }

    /// Composite trapezoid of the scalar integrand `f(theta, value)`.
    pub fn integrate(&self, f: impl Fn(f64, &[f64]) -> f64) -> f64 {
        (0..self.len().saturating_sub(1))
            .map(|i| {
                let h = self.grid[i + 1] - self.grid[i];
                0.5 * h * (f(self.grid[i], self.panel_start(i)) + f(self.grid[i + 1], &self.values[i + 1]))
            })
            .sum()
    }

    /// Componentwise composite trapezoid of the samples themselves.
    pub fn integrate_vec(&self) -> Vec<f64> {
        let mut acc = vec![0.0; self.dim()];
        for i in 0..self.len().saturating_sub(1) {
            let h = 0.5 * (self.grid[i + 1] - self.grid[i]);
            for ((a, l), r) in acc.iter_mut().zip(self.panel_start(i)).zip(&self.values[i + 1]) {
                *a += h * (l + r);
            }
        }
        acc
    }

    /// Trapezoid error estimate `sum (h/12) |second difference|` of the
    /// integrand, taken only over stencils that do not cross a jump.
    pub fn trapezoid_error_estimate(&self, f: impl Fn(f64, &[f64]) -> f64) -> f64 {
        let n = self.len();
        if n < 3 {
            return 0.0;
        }
        let mut est = 0.0;
        for i in 1..n - 1 {
            if self.jump_at_node(i).is_some() || self.jump_at_node(i - 1).is_some() {
                continue;
            }
            let (h0, h1) = (self.grid[i] - self.grid[i - 1], self.grid[i + 1] - self.grid[i]);
            let f0 = f(self.grid[i - 1], &self.values[i - 1]);
            let f1 = f(self.grid[i], &self.values[i]);
            let f2 = f(self.grid[i + 1], &self.values[i + 1]);
            // divided second difference times the local panel width cubed
            let d2 = 2.0 * (h0 * f2 - (h0 + h1) * f1 + h1 * f0) / (h0 * h1 * (h0 + h1));
            let hm = 0.5 * (h0 + h1);
            est += hm * hm * hm * d2.abs() / 12.0;
        }
        est
    }

    /// Maximum of `‖value‖` over every stored left and right value.
    pub fn sup(&self, norm: impl Fn(&[f64]) -> f64) -> f64 {
        self.values
            .iter()
            .map(|v| norm(v))
            .chain(self.jumps.iter().map(|j| norm(&j.right)))
            .fold(0.0, f64::max)
    }

    pub fn shifted(&self, d: f64) -> Samples {
        Samples {
            grid: self.grid.iter().map(|g| g + d).collect(),
            values: self.values.clone(),
            jumps: self
                .jumps
                .iter()
                .map(|j| Jump {
                    at: j.at + d,
                    ..j.clone()
                })
                .collect(),
            jump_nodes: self.jump_nodes.clone(),
        }
    }

    pub fn map_values(&self, f: impl Fn(&[f64]) -> Vec<f64>) -> Samples {
        Samples {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| f(v)).collect(),
            jumps: self
                .jumps
                .iter()
                .map(|j| Jump {
                    at: j.at,
                    left: f(&j.left),
                    right: f(&j.right),
                })
                .collect(),
            jump_nodes: self.jump_nodes.clone(),
        }
    }
}

enum Located {
    Node(usize),
    Panel(usize),
}

pub(crate) fn panel_count(len: f64, h: f64) -> usize {
    ((len / h) - 1e-9).ceil().max(1.0) as usize
}

/// Incremental construction in increasing `theta`. Pushing a point equal
/// to the previous one (within `1e-12` relative) is ignored, so grids from
/// different sources can be merged without duplicate nodes.
#[derive(Debug)]
pub struct SamplesBuilder {
    dim: usize,
    grid: Vec<f64>,
    values: Vec<Vec<f64>>,
    rights: Vec<Option<Vec<f64>>>,
}

impl SamplesBuilder {
    fn same_as_last(&self, theta: f64) -> bool {
        self.grid
            .last()
            .is_some_and(|&g| (theta - g).abs() <= 1e-12 * (1.0 + g.abs()))
    }

    pub fn push(&mut self, theta: f64, value: Vec<f64>) -> &mut Self {
        if !self.same_as_last(theta) {
            self.grid.push(theta);
            self.values.push(value);
            self.rights.push(None);
        }
        self
    }

    pub fn push_jump(&mut self, theta: f64, left: Vec<f64>, right: Vec<f64>) -> &mut Self {
        if self.same_as_last(theta) {
            *self.values.last_mut().unwrap() = left;
            *self.rights.last_mut().unwrap() = Some(right);
        } else {
            self.grid.push(theta);
            self.values.push(left);
            self.rights.push(Some(right));
        }
        self
    }

    pub fn build(self) -> Result<Samples> {
        if self.grid.is_empty() {
            return Err(Error::Grid("samples need at least one node".into()));
        }
        if let Some(w) = self.grid.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::Grid(format!(
                "grid not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
        let wrong_dim = self
            .values
            .iter()
            .chain(self.rights.iter().flatten())
            .any(|v| v.len() != self.dim);
        if wrong_dim {
            return Err(Error::Grid(format!("sample of dimension != {}", self.dim)));
        }
        let mut jumps = Vec::new();
        let mut jump_nodes = Vec::new();
        for (i, r) in self.rights.into_iter().enumerate() {
            if let Some(right) = r {
                jumps.push(Jump {
                    at: self.grid[i],
                    left: self.values[i].clone(),
                    right,
                });
                jump_nodes.push(i);
            }
        }
        Ok(Samples {
            grid: self.grid,
            values: self.values,
            jumps,
            jump_nodes,
        })
    }
}
