use sha2::{Digest, Sha256};

use crate::disc::{AngularQuadrature, DecompositionGeometry, Grid1D, MediaField};
use crate::error::Result;

/// Hash of everything a compressed map depends on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fingerprint(pub [u8; 32]);

impl Fingerprint {
    pub fn hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn short(&self) -> String {
        self.hex()[..16].to_string()
    }
}

impl std::fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.short())
    }
}

/// A fully discretized boundary value problem on (0, 1) x (-1, 1).
#[derive(Debug, Clone)]
pub struct Problem {
    pub grid: Grid1D,
    pub quad: AngularQuadrature,
    pub media: MediaField,
    pub geometry: DecompositionGeometry,
}

impl Problem {
    pub fn new(
        grid: Grid1D,
        quad: AngularQuadrature,
        media: MediaField,
        geometry: DecompositionGeometry,
    ) -> Result<Self> {
        if media.sigma_nodes().len() != grid.n_nodes() || geometry.n_cells() != grid.n_cells() {
            return Err(crate::Error::invalid("media and geometry must be built on the same grid"));
        }
        Ok(Self {
            grid,
            quad,
            media,
            geometry,
        })
    }

    /// The oscillatory benchmark medium on a uniform grid.
    pub fn oscillatory(
        n_cells: usize,
        n_v: usize,
        epsilon: f64,
        delta: f64,
        m_count: usize,
        beta: f64,
    ) -> Result<Self> {
        let grid = Grid1D::new(n_cells)?;
        let quad = AngularQuadrature::new(n_v)?;
        let media = MediaField::oscillatory(&grid, epsilon, delta)?;
        let geometry = DecompositionGeometry::new(&grid, m_count, beta)?;
        Self::new(grid, quad, media, geometry)
    }

    pub fn n_v(&self) -> usize {
        self.quad.len()
    }

    pub fn fingerprint(&self) -> Fingerprint {
        let mut h = Sha256::new();
        h.update(b"lrs-problem-v1");
        h.update((self.grid.n_cells() as u64).to_le_bytes());
        h.update((self.quad.len() as u64).to_le_bytes());
        h.update((self.geometry.m_count() as u64).to_le_bytes());
        h.update(self.geometry.beta().to_le_bytes());
        h.update(self.media.epsilon().to_le_bytes());
        h.update(self.media.delta().to_le_bytes());
        h.update([self.media.kind().tag()]);
        for s in self.media.sigma_nodes() {
            h.update(s.to_le_bytes());
        }
        Fingerprint(h.finalize().into())
    }
}

/// Inflow data on the physical boundary: `left` holds v > 0 at x = 0,
/// `right` holds v < 0 at x = 1, both in ordinate order.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalInflow {
    pub left: Vec<f64>,
    pub right: Vec<f64>,
}

impl PhysicalInflow {
    /// 10 + sin(2 pi v) entering at x = 0 and 1 + sin(2 pi v) entering at x = 1.
    pub fn benchmark(quad: &AngularQuadrature) -> Self {
        let v = quad.nodes();
        let tau = 2.0 * std::f64::consts::PI;
        Self {
            left: quad.positive().map(|i| 10.0 + (tau * v[i]).sin()).collect(),
            right: quad.negative().map(|i| 1.0 + (tau * v[i]).sin()).collect(),
        }
    }

    pub fn constant(quad: &AngularQuadrature, c: f64) -> Self {
        let half = quad.len() / 2;
        Self {
            left: vec![c; half],
            right: vec![c; half],
        }
    }

    pub fn zeros(quad: &AngularQuadrature) -> Self {
        Self::constant(quad, 0.0)
    }
}
