//! Weighted inner products and norms on boundary traces and phase-space fields.
//!
//! The boundary measure is the counting measure on the two endpoints times
//! |v| dmu; the interior measure is trapezoid weights in x times dmu.

use super::field::{BoundaryTrace, PhaseSpaceField};
use super::grid::Grid1D;
use super::quadrature::AngularQuadrature;
use crate::error::{Error, Result};

pub fn boundary_inner(a: &BoundaryTrace, b: &BoundaryTrace, quad: &AngularQuadrature) -> Result<f64> {
    if a.kind != b.kind || a.left.len() != b.left.len() || a.right.len() != b.right.len() {
        return Err(Error::invalid("boundary traces live on different sets"));
    }
    a.check_shape(quad)?;
    let w = a.weights(quad);
    Ok(a
        .all_values()
        .zip(b.all_values())
        .zip(w)
        .map(|((x, y), w)| x * y * w)
        .sum())
}

pub fn boundary_norm(a: &BoundaryTrace, quad: &AngularQuadrature) -> Result<f64> {
    Ok(boundary_inner(a, a, quad)?.sqrt())
}

pub fn interior_inner(
    f: &PhaseSpaceField,
    g: &PhaseSpaceField,
    grid: &Grid1D,
    quad: &AngularQuadrature,
) -> Result<f64> {
    if f.range() != g.range() || f.n_v() != g.n_v() {
        return Err(Error::invalid("fields live on different node ranges"));
    }
    if f.n_v() != quad.len() {
        return Err(Error::invalid("field ordinate count does not match quadrature"));
    }
    let wx = grid.trapezoid_weights(f.range().first, f.range().last);
    let n_v = f.n_v();
    let mut acc = 0.0;
    for (k, wj) in wx.iter().enumerate() {
        let fs = &f.data()[k * n_v..(k + 1) * n_v];
        let gs = &g.data()[k * n_v..(k + 1) * n_v];
        let row: f64 = fs
            .iter()
            .zip(gs)
            .zip(quad.weights())
            .map(|((a, b), w)| a * b * w)
            .sum();
        acc += wj * row;
    }
    Ok(acc)
}

pub fn interior_norm(f: &PhaseSpaceField, grid: &Grid1D, quad: &AngularQuadrature) -> Result<f64> {
    Ok(interior_inner(f, f, grid, quad)?.sqrt())
}

/// Discrete H^1_2 norm: trapezoid quadrature of |v d_x u|^2 + |u|^2 with
/// upwind differences (backward for v > 0, forward for v < 0).
pub fn h12_norm(f: &PhaseSpaceField, grid: &Grid1D, quad: &AngularQuadrature) -> Result<f64> {
    if f.n_v() != quad.len() {
        return Err(Error::invalid("field ordinate count does not match quadrature"));
    }
    let range = f.range();
    let wx = grid.trapezoid_weights(range.first, range.last);
    let dx = grid.dx();
    let n = range.len();
    let mut acc = 0.0;
    for (k, j) in range.iter().enumerate() {
        for (i, (&v, &w)) in quad.nodes().iter().zip(quad.weights()).enumerate() {
            let u = f.at(j, i);
            let deriv = if n == 1 {
                0.0
            } else if v > 0.0 {
                let k0 = if k == 0 { 1 } else { k };
                (f.at(range.first + k0, i) - f.at(range.first + k0 - 1, i)) / dx
            } else {
                let k0 = if k == n - 1 { n - 2 } else { k };
                (f.at(range.first + k0 + 1, i) - f.at(range.first + k0, i)) / dx
            };
            acc += wx[k] * w * ((v * deriv).powi(2) + u * u);
        }
    }
    Ok(acc.sqrt())
}

/// H_A norm: H^1_2 plus the |n.v|-weighted trace over both endpoints and all ordinates.
pub fn ha_norm(f: &PhaseSpaceField, grid: &Grid1D, quad: &AngularQuadrature) -> Result<f64> {
    let h = h12_norm(f, grid, quad)?;
    let range = f.range();
    let mut boundary = 0.0;
    for j in [range.first, range.last] {
        boundary += f
            .node(j)
            .iter()
            .enumerate()
            .map(|(i, u)| u * u * quad.flux_weight(i))
            .sum::<f64>();
    }
    Ok((h * h + boundary).sqrt())
}
