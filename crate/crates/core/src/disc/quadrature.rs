use std::ops::Range;

use crate::error::{Error, Result};

/// Discrete ordinates on V = (-1, 1) with weights of the normalized measure dv/2.
///
/// Ordinates are midpoints of `n_v` equal cells, so none of them is zero and the
/// set is symmetric. Index `0..n_v/2` holds the negative directions in ascending
/// order, `n_v/2..n_v` the positive ones.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularQuadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl AngularQuadrature {
    pub fn new(n_v: usize) -> Result<Self> {
        if n_v < 2 || n_v % 2 != 0 {
            return Err(Error::invalid(format!(
                "ordinate count must be even and at least 2, got {n_v}"
            )));
        }
        let h = 2.0 / n_v as f64;
        // Build the positive half and mirror it so the symmetry is exact in floating point.
        let half = n_v / 2;
        let positive: Vec<f64> = (0..half).map(|i| (i as f64 + 0.5) * h).collect();
        let mut nodes = Vec::with_capacity(n_v);
        nodes.extend(positive.iter().rev().map(|v| -v));
        nodes.extend(positive.iter().copied());
        let weights = vec![1.0 / n_v as f64; n_v];
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Indices of ordinates with v < 0.
    pub fn negative(&self) -> Range<usize> {
        0..self.len() / 2
    }

    /// Indices of ordinates with v > 0.
    pub fn positive(&self) -> Range<usize> {
        self.len() / 2..self.len()
    }

    /// Weight |v_i| w_i of the boundary measure |n.v| dmu.
    pub fn flux_weight(&self, i: usize) -> f64 {
        self.nodes[i].abs() * self.weights[i]
    }

    /// Sum_i w_i u_i.
    pub fn average(&self, values: &[f64]) -> f64 {
        values.iter().zip(&self.weights).map(|(u, w)| u * w).sum()
    }
}

pub fn build_quadrature(n_v: usize) -> Result<AngularQuadrature> {
    AngularQuadrature::new(n_v)
}
