use crate::error::{Error, Result};

/// Uniform node grid on [0, 1]: x_j = j / n_cells, j = 0..=n_cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid1D {
    n_cells: usize,
}

impl Grid1D {
    pub fn new(n_cells: usize) -> Result<Self> {
        if n_cells == 0 {
            return Err(Error::invalid("grid needs at least one cell"));
        }
        Ok(Self { n_cells })
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn n_nodes(&self) -> usize {
        self.n_cells + 1
    }

    pub fn dx(&self) -> f64 {
        1.0 / self.n_cells as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        j as f64 / self.n_cells as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_nodes()).map(|j| self.x(j)).collect()
    }

    /// Node index of `x` if it coincides with a grid node.
    pub fn node_at(&self, x: f64) -> Option<usize> {
        let scaled = x * self.n_cells as f64;
        let j = scaled.round();
        if (scaled - j).abs() <= 1e-9 && j >= 0.0 && j <= self.n_cells as f64 {
            Some(j as usize)
        } else {
            None
        }
    }

    /// Trapezoid weights in x over the inclusive node range `first..=last`.
    pub fn trapezoid_weights(&self, first: usize, last: usize) -> Vec<f64> {
        let n = last - first + 1;
        let dx = self.dx();
        let mut w = vec![dx; n];
        if n == 1 {
            w[0] = 0.0;
        } else {
            w[0] = 0.5 * dx;
            w[n - 1] = 0.5 * dx;
        }
        w
    }
}
