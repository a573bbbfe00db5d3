use std::f64::consts::PI;

use super::grid::Grid1D;
use crate::error::{Error, Result};

/// Oscillatory scattering coefficient (1.1 + cos 4 pi x) / (1.1 + sin(2 pi x / delta)).
pub fn eval_sigma(x: f64, delta: f64) -> f64 {
    (1.1 + (4.0 * PI * x).cos()) / (1.1 + (2.0 * PI * x / delta).sin())
}

/// Period average of 1 / (1.1 + sin 2 pi y) over y in [0, 1], i.e. 1 / sqrt(1.1^2 - 1).
pub fn inverse_denominator_mean() -> f64 {
    1.0 / (1.1f64 * 1.1 - 1.0).sqrt()
}

/// Homogenized coefficient: the fast variable of `eval_sigma` averaged over one period.
pub fn homogenized_sigma(x: f64) -> f64 {
    (1.1 + (4.0 * PI * x).cos()) * inverse_denominator_mean()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MediaKind {
    Oscillatory,
    Homogenized,
    Table,
}

impl MediaKind {
    pub(crate) fn tag(self) -> u8 {
        match self {
            MediaKind::Oscillatory => 0,
            MediaKind::Homogenized => 1,
            MediaKind::Table => 2,
        }
    }
}

/// Scattering coefficient sampled at grid nodes, together with the Knudsen number.
#[derive(Debug, Clone, PartialEq)]
pub struct MediaField {
    epsilon: f64,
    delta: f64,
    kind: MediaKind,
    sigma_nodes: Vec<f64>,
}

impl MediaField {
    pub fn oscillatory(grid: &Grid1D, epsilon: f64, delta: f64) -> Result<Self> {
        check_positive("delta", delta)?;
        let sigma = grid.nodes().into_iter().map(|x| eval_sigma(x, delta)).collect();
        Self::build(epsilon, delta, MediaKind::Oscillatory, sigma)
    }

    /// The delta -> 0 limit medium. `delta` is carried only for bookkeeping.
    pub fn homogenized(grid: &Grid1D, epsilon: f64, delta: f64) -> Result<Self> {
        let sigma = grid.nodes().into_iter().map(homogenized_sigma).collect();
        Self::build(epsilon, delta, MediaKind::Homogenized, sigma)
    }

    pub fn from_table(grid: &Grid1D, epsilon: f64, delta: f64, sigma: Vec<f64>) -> Result<Self> {
        if sigma.len() != grid.n_nodes() {
            return Err(Error::invalid(format!(
                "sigma table has {} values, grid has {} nodes",
                sigma.len(),
                grid.n_nodes()
            )));
        }
        Self::build(epsilon, delta, MediaKind::Table, sigma)
    }

    fn build(epsilon: f64, delta: f64, kind: MediaKind, sigma_nodes: Vec<f64>) -> Result<Self> {
        check_positive("epsilon", epsilon)?;
        check_positive("delta", delta)?;
        if let Some((j, s)) = sigma_nodes
            .iter()
            .enumerate()
            .find(|(_, s)| !(s.is_finite() && **s > 0.0))
        {
            return Err(Error::invalid(format!("sigma at node {j} is {s}, must be positive")));
        }
        Ok(Self {
            epsilon,
            delta,
            kind,
            sigma_nodes,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn kind(&self) -> MediaKind {
        self.kind
    }

    pub fn sigma_nodes(&self) -> &[f64] {
        &self.sigma_nodes
    }

    pub fn sigma(&self, j: usize) -> f64 {
        self.sigma_nodes[j]
    }
}

fn check_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be positive, got {value}")))
    }
}
