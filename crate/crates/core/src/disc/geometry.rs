use super::grid::Grid1D;
use crate::error::{Error, Result};

/// Inclusive range of global node indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodeRange {
    pub first: usize,
    pub last: usize,
}

impl NodeRange {
    pub fn new(first: usize, last: usize) -> Self {
        debug_assert!(first <= last);
        Self { first, last }
    }

    pub fn len(&self) -> usize {
        self.last - self.first + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, j: usize) -> bool {
        self.first <= j && j <= self.last
    }

    /// Strictly inside, endpoints excluded.
    pub fn contains_interior(&self, j: usize) -> bool {
        self.first < j && j < self.last
    }

    pub fn iter(&self) -> std::ops::RangeInclusive<usize> {
        self.first..=self.last
    }
}

/// One patch K_m of the overlapping decomposition, all positions as node indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subdomain {
    /// 1-based index m.
    pub m: usize,
    /// K_m, closure.
    pub nodes: NodeRange,
    /// K_m^s = ((m-1)/M, m/M), closure.
    pub core: NodeRange,
    /// Nodes assembled from this patch's ownership: (m-1)/M < x <= m/M, plus x = 0 for m = 1.
    pub owned: NodeRange,
    /// Node of E_{m,m-1} (v < 0 values sent to m - 1), absent for m = 1.
    pub exchange_left: Option<usize>,
    /// Node of E_{m,m+1} (v > 0 values sent to m + 1), absent for m = M.
    pub exchange_right: Option<usize>,
    /// Left inflow lies on the physical boundary x = 0.
    pub physical_left: bool,
    /// Right inflow lies on the physical boundary x = 1.
    pub physical_right: bool,
}

/// Overlapping decomposition of (0, 1) into M patches with overlap fraction beta.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionGeometry {
    m_count: usize,
    beta: f64,
    n_cells: usize,
    subdomains: Vec<Subdomain>,
}

impl DecompositionGeometry {
    pub fn new(grid: &Grid1D, m_count: usize, beta: f64) -> Result<Self> {
        if m_count == 0 {
            return Err(Error::invalid("need at least one subdomain"));
        }
        if !(beta > 0.0 && beta <= 0.5) {
            return Err(Error::invalid(format!(
                "overlap fraction beta must lie in (0, 1/2] so patches overlap only their neighbours, got {beta}"
            )));
        }
        let mm = m_count as f64;
        let node = |what: String, x: f64| -> Result<usize> {
            let x = x.clamp(0.0, 1.0);
            grid.node_at(x).ok_or(Error::Alignment {
                what,
                x,
                n_cells: grid.n_cells(),
            })
        };
        let mut subdomains = Vec::with_capacity(m_count);
        for m in 1..=m_count {
            let mf = m as f64;
            let left = node(format!("left end of K_{m}"), (mf - 1.0 - beta) / mm)?;
            let right = node(format!("right end of K_{m}"), (mf + beta) / mm)?;
            let core_left = node(format!("left end of K_{m}^s"), (mf - 1.0) / mm)?;
            let core_right = node(format!("right end of K_{m}^s"), mf / mm)?;
            let exchange_left = if m > 1 {
                Some(node(format!("exchange point E_{{{m},{}}}", m - 1), (mf - 1.0 + beta) / mm)?)
            } else {
                None
            };
            let exchange_right = if m < m_count {
                Some(node(format!("exchange point E_{{{m},{}}}", m + 1), (mf - beta) / mm)?)
            } else {
                None
            };
            let owned_first = if m == 1 { 0 } else { core_left + 1 };
            if core_right <= core_left || owned_first > core_right {
                return Err(Error::invalid(format!(
                    "grid with {} cells is too coarse for {m_count} subdomains",
                    grid.n_cells()
                )));
            }
            subdomains.push(Subdomain {
                m,
                nodes: NodeRange::new(left, right),
                core: NodeRange::new(core_left, core_right),
                owned: NodeRange::new(owned_first, core_right),
                exchange_left,
                exchange_right,
                physical_left: m == 1,
                physical_right: m == m_count,
            });
        }
        let geometry = Self {
            m_count,
            beta,
            n_cells: grid.n_cells(),
            subdomains,
        };
        geometry.check_exchange_interior()?;
        Ok(geometry)
    }

    fn check_exchange_interior(&self) -> Result<()> {
        for s in &self.subdomains {
            for e in [s.exchange_left, s.exchange_right].into_iter().flatten() {
                if !s.core.contains_interior(e) {
                    return Err(Error::invalid(format!(
                        "exchange node {e} of subdomain {} is not strictly inside its core {:?}; refine the grid",
                        s.m, s.core
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn m_count(&self) -> usize {
        self.m_count
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn n_nodes(&self) -> usize {
        self.n_cells + 1
    }

    /// Patch `m`, 1-based.
    pub fn subdomain(&self, m: usize) -> Result<&Subdomain> {
        if m == 0 || m > self.m_count {
            return Err(Error::invalid(format!(
                "subdomain index {m} outside 1..={}",
                self.m_count
            )));
        }
        Ok(&self.subdomains[m - 1])
    }

    pub fn subdomains(&self) -> &[Subdomain] {
        &self.subdomains
    }
}

pub fn build_decomposition(grid: &Grid1D, m_count: usize, beta: f64) -> Result<DecompositionGeometry> {
    DecompositionGeometry::new(grid, m_count, beta)
}
