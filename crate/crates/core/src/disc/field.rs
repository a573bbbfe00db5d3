use std::ops::Range;

use super::geometry::NodeRange;
use super::quadrature::AngularQuadrature;
use crate::error::{Error, Result};

/// Intensities u(x_j, v_i) on a contiguous node range, stored node-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceField {
    range: NodeRange,
    n_v: usize,
    data: Vec<f64>,
}

impl PhaseSpaceField {
    pub fn zeros(range: NodeRange, n_v: usize) -> Self {
        Self {
            range,
            n_v,
            data: vec![0.0; range.len() * n_v],
        }
    }

    pub fn constant(range: NodeRange, n_v: usize, c: f64) -> Self {
        Self {
            range,
            n_v,
            data: vec![c; range.len() * n_v],
        }
    }

    pub fn from_vec(range: NodeRange, n_v: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != range.len() * n_v {
            return Err(Error::invalid(format!(
                "field data has {} entries, expected {} x {}",
                data.len(),
                range.len(),
                n_v
            )));
        }
        Ok(Self { range, n_v, data })
    }

    pub fn from_fn(range: NodeRange, n_v: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(range.len() * n_v);
        for j in range.iter() {
            for i in 0..n_v {
                data.push(f(j, i));
            }
        }
        Self { range, n_v, data }
    }

    pub fn range(&self) -> NodeRange {
        self.range
    }

    pub fn n_nodes(&self) -> usize {
        self.range.len()
    }

    pub fn n_v(&self) -> usize {
        self.n_v
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// Value at global node `j`, ordinate `i`.
    pub fn at(&self, j: usize, i: usize) -> f64 {
        self.data[(j - self.range.first) * self.n_v + i]
    }

    /// All ordinates at global node `j`.
    pub fn node(&self, j: usize) -> &[f64] {
        let k = (j - self.range.first) * self.n_v;
        &self.data[k..k + self.n_v]
    }

    /// Copy of the values on a sub-range of nodes.
    pub fn restrict(&self, sub: NodeRange) -> Result<Self> {
        if sub.first < self.range.first || sub.last > self.range.last {
            return Err(Error::invalid(format!(
                "cannot restrict field on {:?} to {:?}",
                self.range, sub
            )));
        }
        let start = (sub.first - self.range.first) * self.n_v;
        let end = (sub.last - self.range.first + 1) * self.n_v;
        Ok(Self {
            range: sub,
            n_v: self.n_v,
            data: self.data[start..end].to_vec(),
        })
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.data
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &u| (lo.min(u), hi.max(u)))
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|u| u.is_finite())
    }
}

/// Which half of phase space a trace lives on.
///
/// For `Inflow` traces (Gamma_{m,-}) the left side carries v > 0 and the right side
/// v < 0. For `Outflow` traces (the exchange set Gamma^s_{m,+}) the left side carries
/// v < 0 and the right side v > 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceKind {
    Inflow,
    Outflow,
}

/// Values of u on a boundary set of one subdomain, split by side.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryTrace {
    pub owner: usize,
    pub kind: TraceKind,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
}

impl BoundaryTrace {
    pub fn inflow(owner: usize, left: Vec<f64>, right: Vec<f64>) -> Self {
        Self {
            owner,
            kind: TraceKind::Inflow,
            left,
            right,
        }
    }

    pub fn inflow_zeros(owner: usize, n_v: usize) -> Self {
        Self::inflow(owner, vec![0.0; n_v / 2], vec![0.0; n_v / 2])
    }

    pub fn inflow_constant(owner: usize, n_v: usize, c: f64) -> Self {
        Self::inflow(owner, vec![c; n_v / 2], vec![c; n_v / 2])
    }

    pub fn outflow(owner: usize, left: Vec<f64>, right: Vec<f64>) -> Self {
        Self {
            owner,
            kind: TraceKind::Outflow,
            left,
            right,
        }
    }

    pub fn len(&self) -> usize {
        self.left.len() + self.right.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn left_ordinates(&self, quad: &AngularQuadrature) -> Range<usize> {
        match self.kind {
            TraceKind::Inflow => quad.positive(),
            TraceKind::Outflow => quad.negative(),
        }
    }

    pub fn right_ordinates(&self, quad: &AngularQuadrature) -> Range<usize> {
        match self.kind {
            TraceKind::Inflow => quad.negative(),
            TraceKind::Outflow => quad.positive(),
        }
    }

    /// Quadrature weights |v_i| w_i matching `to_vec` ordering.
    pub fn weights(&self, quad: &AngularQuadrature) -> Vec<f64> {
        let mut w = Vec::with_capacity(self.len());
        if !self.left.is_empty() {
            w.extend(self.left_ordinates(quad).map(|i| quad.flux_weight(i)));
        }
        if !self.right.is_empty() {
            w.extend(self.right_ordinates(quad).map(|i| quad.flux_weight(i)));
        }
        w
    }

    /// Left values followed by right values.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.len());
        v.extend_from_slice(&self.left);
        v.extend_from_slice(&self.right);
        v
    }

    /// Same layout as `self`, new values.
    pub fn with_values(&self, values: &[f64]) -> Result<Self> {
        if values.len() != self.len() {
            return Err(Error::invalid(format!(
                "trace needs {} values, got {}",
                self.len(),
                values.len()
            )));
        }
        let (l, r) = values.split_at(self.left.len());
        Ok(Self {
            owner: self.owner,
            kind: self.kind,
            left: l.to_vec(),
            right: r.to_vec(),
        })
    }

    pub fn all_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.left.iter().chain(self.right.iter()).copied()
    }

    pub(crate) fn check_shape(&self, quad: &AngularQuadrature) -> Result<()> {
        let half = quad.len() / 2;
        let ok = |s: &Vec<f64>| s.is_empty() || s.len() == half;
        if ok(&self.left) && ok(&self.right) {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "trace sides must hold {half} values each, got {} and {}",
                self.left.len(),
                self.right.len()
            )))
        }
    }
}
