//! The discretized state space `E`.
//!
//! States are vectors of nodal samples. The norm is a weighted Euclidean
//! norm whose weights are the quadrature weights of the spatial grid, so
//! that on `[0, 1]` it approximates the `L^2` norm. A one-node space with
//! unit weight is the scalar case.

use std::sync::Arc;

#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    nodes: Arc<[f64]>,
    weights: Arc<[f64]>,
}

impl StateSpace {
    /// Scalar state, `|v|` norm.
    pub fn scalar() -> Self {
        StateSpace {
            nodes: Arc::from(vec![0.0]),
            weights: Arc::from(vec![1.0]),
        }
    }

    /// Uniform grid on `[0, 1]` with trapezoid weights. `n == 1` gives the
    /// scalar space.
    pub fn unit_interval(n: usize) -> Self {
        assert!(n >= 1, "a state space needs at least one node");
        if n == 1 {
            return Self::scalar();
        }
        let dx = 1.0 / (n - 1) as f64;
        let nodes: Vec<f64> = (0..n).map(|i| i as f64 * dx).collect();
        let weights: Vec<f64> = (0..n)
            .map(|i| if i == 0 || i == n - 1 { 0.5 * dx } else { dx })
            .collect();
        StateSpace {
            nodes: Arc::from(nodes),
            weights: Arc::from(weights),
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn norm(&self, v: &[f64]) -> f64 {
        debug_assert_eq!(v.len(), self.dim());
        v.iter()
            .zip(self.weights.iter())
            .map(|(x, w)| w * x * x)
            .sum::<f64>()
            .sqrt()
    }

    /// `‖a - b‖`
    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .zip(self.weights.iter())
            .map(|((x, y), w)| w * (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    }

    /// Quadrature of the nodal values, `∫_0^1 v(x) dx`.
    pub fn integral(&self, v: &[f64]) -> f64 {
        v.iter().zip(self.weights.iter()).map(|(x, w)| w * x).sum()
    }

    /// Norm of the constant function one.
    pub fn unit_norm(&self) -> f64 {
        self.weights.iter().sum::<f64>().sqrt()
    }

    pub fn zeros(&self) -> Vec<f64> {
        vec![0.0; self.dim()]
    }

    pub fn constant(&self, c: f64) -> Vec<f64> {
        vec![c; self.dim()]
    }
}

pub(crate) fn lincomb(alpha: f64, a: &[f64], beta: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| alpha * x + beta * y).collect()
}

pub(crate) fn scaled(alpha: f64, a: &[f64]) -> Vec<f64> {
    a.iter().map(|x| alpha * x).collect()
}
