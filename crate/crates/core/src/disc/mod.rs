//! Grids, ordinates, media, domain decomposition and the weighted products
//! shared by every other module.

mod field;
mod geometry;
mod grid;
mod media;
mod norms;
mod quadrature;

pub use field::{BoundaryTrace, PhaseSpaceField, TraceKind};
pub use geometry::{build_decomposition, DecompositionGeometry, NodeRange, Subdomain};
pub use grid::Grid1D;
pub use media::{eval_sigma, homogenized_sigma, inverse_denominator_mean, MediaField, MediaKind};
pub use norms::{boundary_inner, boundary_norm, h12_norm, ha_norm, interior_inner, interior_norm};
pub use quadrature::{build_quadrature, AngularQuadrature};
