//! Discrete forward and adjoint transport solves on one subdomain.
//!
//! The steady equation v u_x = (sigma / eps) (<u> - u) is discretized with
//! first-order upwinding at grid nodes and midpoint discrete ordinates. Unknowns
//! are ordered node-major, so the system is block tridiagonal with one
//! `n_v x n_v` block per node. Inflow values enter through identity rows.

use std::time::{Duration, Instant};

use nalgebra::DMatrix;

use crate::disc::{AngularQuadrature, BoundaryTrace, NodeRange, PhaseSpaceField, TraceKind};
use crate::error::{Error, Result};
use crate::linalg::{gmres, norm2, BlockLu, BlockTridiagonal, CsrMatrix};
use crate::problem::{PhysicalInflow, Problem};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    /// Block-tridiagonal LU, factored once at assembly.
    Direct,
    /// Restarted GMRES right-preconditioned by one transport sweep.
    Gmres,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    pub kind: SolverKind,
    /// Relative residual tolerance.
    pub tolerance: f64,
    /// Matrix applications allowed per solve; `None` means 10 x system dimension.
    pub max_matvecs: Option<usize>,
    pub restart: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            kind: SolverKind::Direct,
            tolerance: 1e-10,
            max_matvecs: None,
            restart: 60,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    pub residual: f64,
    pub wall_time: Duration,
}

/// Assembled and factored transport system on D_m.
#[derive(Debug, Clone)]
pub struct LocalSystem {
    m: usize,
    range: NodeRange,
    core: NodeRange,
    exchange_left: Option<usize>,
    exchange_right: Option<usize>,
    quad: AngularQuadrature,
    dx: f64,
    epsilon: f64,
    sigma: Vec<f64>,
    matrix: BlockTridiagonal,
    csr: CsrMatrix,
    lu: Option<BlockLu>,
    lu_t: Option<BlockLu>,
    transpose: BlockTridiagonal,
    csr_t: CsrMatrix,
    settings: SolverSettings,
}

/// Assemble the local system for subdomain `m` (1-based).
pub fn assemble_local(problem: &Problem, m: usize, settings: SolverSettings) -> Result<LocalSystem> {
    let s = problem.geometry.subdomain(m)?;
    LocalSystem::build(
        problem,
        m,
        s.nodes,
        s.core,
        s.exchange_left,
        s.exchange_right,
        settings,
    )
}

/// Assemble the monolithic system on the whole slab (0, 1).
pub fn assemble_global(problem: &Problem, settings: SolverSettings) -> Result<LocalSystem> {
    let all = NodeRange::new(0, problem.grid.n_cells());
    LocalSystem::build(problem, 0, all, all, None, None, settings)
}

impl LocalSystem {
    fn build(
        problem: &Problem,
        m: usize,
        range: NodeRange,
        core: NodeRange,
        exchange_left: Option<usize>,
        exchange_right: Option<usize>,
        settings: SolverSettings,
    ) -> Result<Self> {
        if !(settings.tolerance > 0.0) {
            return Err(Error::invalid("solver tolerance must be positive"));
        }
        let quad = problem.quad.clone();
        let n_v = quad.len();
        let dx = problem.grid.dx();
        let epsilon = problem.media.epsilon();
        let sigma: Vec<f64> = range.iter().map(|j| problem.media.sigma(j)).collect();
        let n = range.len();
        if n < 2 {
            return Err(Error::invalid("a subdomain needs at least two nodes"));
        }
        let mut a = BlockTridiagonal::zeros(n, n_v);
        for k in 0..n {
            let sig = sigma[k];
            for i in 0..n_v {
                let v = quad.nodes()[i];
                let inflow = (v > 0.0 && k == 0) || (v < 0.0 && k == n - 1);
                if inflow {
                    a.diag_mut(k)[(i, i)] = 1.0;
                    continue;
                }
                let adv = epsilon * v.abs() / dx;
                {
                    let d = a.diag_mut(k);
                    for (kk, w) in quad.weights().iter().enumerate() {
                        d[(i, kk)] -= sig * w;
                    }
                    d[(i, i)] += adv + sig;
                }
                if v > 0.0 {
                    a.lower_mut(k)[(i, i)] = -adv;
                } else {
                    a.upper_mut(k)[(i, i)] = -adv;
                }
            }
        }
        let transpose = a.transpose();
        let (lu, lu_t) = match settings.kind {
            SolverKind::Direct => (Some(a.factor()?), Some(transpose.factor()?)),
            SolverKind::Gmres => (None, None),
        };
        Ok(Self {
            m,
            range,
            core,
            exchange_left,
            exchange_right,
            quad,
            dx,
            epsilon,
            sigma,
            csr: a.to_csr(),
            csr_t: transpose.to_csr(),
            matrix: a,
            transpose,
            lu,
            lu_t,
            settings,
        })
    }

    pub fn subdomain(&self) -> usize {
        self.m
    }

    pub fn range(&self) -> NodeRange {
        self.range
    }

    pub fn core(&self) -> NodeRange {
        self.core
    }

    pub fn exchange_nodes(&self) -> (Option<usize>, Option<usize>) {
        (self.exchange_left, self.exchange_right)
    }

    pub fn n_v(&self) -> usize {
        self.quad.len()
    }

    pub fn quad(&self) -> &AngularQuadrature {
        &self.quad
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn settings(&self) -> SolverSettings {
        self.settings
    }

    pub fn matrix(&self) -> &BlockTridiagonal {
        &self.matrix
    }

    pub fn csr(&self) -> &CsrMatrix {
        &self.csr
    }

    /// Trapezoid-in-x times ordinate weights over the core D_m^s, node-major.
    pub fn core_weights(&self) -> Vec<f64> {
        self.field_weights(self.core)
    }

    /// Same as `core_weights` over all of D_m.
    pub fn full_weights(&self) -> Vec<f64> {
        self.field_weights(self.range)
    }

    fn field_weights(&self, r: NodeRange) -> Vec<f64> {
        let n = r.len();
        let mut w = Vec::with_capacity(n * self.n_v());
        for k in 0..n {
            let wx = if n == 1 {
                0.0
            } else if k == 0 || k == n - 1 {
                0.5 * self.dx
            } else {
                self.dx
            };
            w.extend(self.quad.weights().iter().map(|wv| wx * wv));
        }
        w
    }

    /// Boundary weights |v| w in inflow-trace order.
    pub fn inflow_weights(&self) -> Vec<f64> {
        BoundaryTrace::inflow_zeros(self.m, self.n_v()).weights(&self.quad)
    }

    /// Boundary weights in exchange-trace order.
    pub fn exchange_weights(&self) -> Vec<f64> {
        self.exchange_template().weights(&self.quad)
    }

    fn exchange_template(&self) -> BoundaryTrace {
        let half = self.n_v() / 2;
        BoundaryTrace::outflow(
            self.m,
            if self.exchange_left.is_some() { vec![0.0; half] } else { vec![] },
            if self.exchange_right.is_some() { vec![0.0; half] } else { vec![] },
        )
    }

    fn idx(&self, j: usize, i: usize) -> usize {
        (j - self.range.first) * self.n_v() + i
    }

    fn check_inflow(&self, phi: &BoundaryTrace) -> Result<()> {
        let half = self.n_v() / 2;
        if phi.kind != TraceKind::Inflow || phi.left.len() != half || phi.right.len() != half {
            return Err(Error::invalid(format!(
                "subdomain {} expects an inflow trace with {half} values per side",
                self.m
            )));
        }
        if phi.owner != self.m {
            return Err(Error::invalid(format!(
                "trace owned by subdomain {} passed to subdomain {}",
                phi.owner, self.m
            )));
        }
        Ok(())
    }

    fn inflow_rhs(&self, phi: &BoundaryTrace) -> Vec<f64> {
        let mut b = vec![0.0; self.dim()];
        for (i, val) in self.quad.positive().zip(&phi.left) {
            b[self.idx(self.range.first, i)] = *val;
        }
        for (i, val) in self.quad.negative().zip(&phi.right) {
            b[self.idx(self.range.last, i)] = *val;
        }
        b
    }

    fn solve_system(&self, b: &[f64], transposed: bool) -> Result<(Vec<f64>, SolveReport)> {
        let start = Instant::now();
        let (x, iterations) = match self.settings.kind {
            SolverKind::Direct => {
                let lu = if transposed { &self.lu_t } else { &self.lu };
                (lu.as_ref().expect("direct solver is factored").solve(b), 1)
            }
            SolverKind::Gmres => {
                let (mat, csr) = if transposed {
                    (&self.transpose, &self.csr_t)
                } else {
                    (&self.matrix, &self.csr)
                };
                let max = self.settings.max_matvecs.unwrap_or(10 * self.dim());
                let (x, out) = gmres(
                    |v| csr.matvec(v),
                    |r| transport_sweep(mat, r),
                    b,
                    self.settings.restart,
                    self.settings.tolerance,
                    max,
                )
                .map_err(|e| e.on_subdomain(self.m))?;
                (x, out.matvecs)
            }
        };
        let csr = if transposed { &self.csr_t } else { &self.csr };
        let ax = csr.matvec(&x);
        let bn = norm2(b);
        let rn = norm2(&b.iter().zip(&ax).map(|(p, q)| p - q).collect::<Vec<_>>());
        let residual = if bn == 0.0 { rn } else { rn / bn };
        if !(residual <= self.settings.tolerance) {
            return Err(Error::NonConvergence {
                subdomain: Some(self.m),
                iterations,
                residual,
            });
        }
        Ok((
            x,
            SolveReport {
                iterations,
                residual,
                wall_time: start.elapsed(),
            },
        ))
    }

    /// S_m: inflow data on Gamma_{m,-} to the solution on D_m.
    pub fn solve_local(&self, phi: &BoundaryTrace) -> Result<(PhaseSpaceField, SolveReport)> {
        self.check_inflow(phi)?;
        let b = self.inflow_rhs(phi);
        let (x, report) = self.solve_system(&b, false)?;
        Ok((PhaseSpaceField::from_vec(self.range, self.n_v(), x)?, report))
    }

    /// S_m^s = restriction of S_m to the core.
    pub fn solve_restricted(&self, phi: &BoundaryTrace) -> Result<PhaseSpaceField> {
        let (u, _) = self.solve_local(phi)?;
        u.restrict(self.core)
    }

    /// Values on the exchange set Gamma^s_{m,+} of a field covering the core.
    pub fn take_exchange_traces(&self, u: &PhaseSpaceField) -> Result<BoundaryTrace> {
        let half = self.n_v() / 2;
        let mut out = self.exchange_template();
        if let Some(e) = self.exchange_left {
            if !u.range().contains(e) {
                return Err(Error::invalid("field does not cover the left exchange node"));
            }
            out.left = u.node(e)[..half].to_vec();
        }
        if let Some(e) = self.exchange_right {
            if !u.range().contains(e) {
                return Err(Error::invalid("field does not cover the right exchange node"));
            }
            out.right = u.node(e)[half..].to_vec();
        }
        Ok(out)
    }

    /// P_m = exchange trace of S_m^s.
    pub fn apply_p(&self, phi: &BoundaryTrace) -> Result<BoundaryTrace> {
        let us = self.solve_restricted(phi)?;
        self.take_exchange_traces(&us)
    }

    /// (S_m^s)^*: discrete transpose of the inflow-to-core map under the weighted
    /// boundary and interior products, W_G^{-1} E^T A^{-T} R^T W_D g.
    pub fn apply_s_s_adjoint(&self, g: &PhaseSpaceField) -> Result<BoundaryTrace> {
        if g.range() != self.core || g.n_v() != self.n_v() {
            return Err(Error::invalid("adjoint source must live on the core D_m^s"));
        }
        let w = self.core_weights();
        let mut rhs = vec![0.0; self.dim()];
        let offset = self.idx(self.core.first, 0);
        for (k, (gv, wv)) in g.data().iter().zip(&w).enumerate() {
            rhs[offset + k] = gv * wv;
        }
        let (y, _) = self.solve_system(&rhs, true)?;
        Ok(self.extract_inflow_scaled(&y))
    }

    fn extract_inflow_scaled(&self, y: &[f64]) -> BoundaryTrace {
        let left = self
            .quad
            .positive()
            .map(|i| y[self.idx(self.range.first, i)] / self.quad.flux_weight(i))
            .collect();
        let right = self
            .quad
            .negative()
            .map(|i| y[self.idx(self.range.last, i)] / self.quad.flux_weight(i))
            .collect();
        BoundaryTrace::inflow(self.m, left, right)
    }

    /// Weighted adjoint of the exchange trace: spreads psi onto the core so that
    /// <T u, psi>_Gamma = <u, T^* psi>_{D^s}.
    pub fn exchange_trace_adjoint(&self, psi: &BoundaryTrace) -> Result<PhaseSpaceField> {
        let template = self.exchange_template();
        if psi.kind != TraceKind::Outflow
            || psi.left.len() != template.left.len()
            || psi.right.len() != template.right.len()
        {
            return Err(Error::invalid("psi must live on the exchange set of this subdomain"));
        }
        let n_v = self.n_v();
        let mut g = PhaseSpaceField::zeros(self.core, n_v);
        let w = self.core_weights();
        let first = self.core.first;
        let put = |j: usize, i: usize, val: f64, g: &mut PhaseSpaceField| {
            let k = (j - first) * n_v + i;
            g.data_mut()[k] += val * self.quad.flux_weight(i) / w[k];
        };
        if let Some(e) = self.exchange_left {
            for (i, val) in self.quad.negative().zip(&psi.left) {
                put(e, i, *val, &mut g);
            }
        }
        if let Some(e) = self.exchange_right {
            for (i, val) in self.quad.positive().zip(&psi.right) {
                put(e, i, *val, &mut g);
            }
        }
        Ok(g)
    }

    /// Discrete P_m^* = (S_m^s)^* T^*.
    pub fn apply_p_adjoint(&self, psi: &BoundaryTrace) -> Result<BoundaryTrace> {
        let g = self.exchange_trace_adjoint(psi)?;
        self.apply_s_s_adjoint(&g)
    }

    /// Continuous adjoint of S_m^s discretized directly: reversed upwinding of
    /// (-v d_x - sigma L / eps) h = g extended by zero, h = 0 on Gamma_{m,+},
    /// read off on Gamma_{m,-}. Agrees with `apply_s_s_adjoint` to O(dx).
    pub fn apply_s_s_adjoint_continuous(&self, g: &PhaseSpaceField) -> Result<BoundaryTrace> {
        if g.range() != self.core || g.n_v() != self.n_v() {
            return Err(Error::invalid("adjoint source must live on the core D_m^s"));
        }
        let pieces = [self.range];
        let mut sys = self.adjoint_pieces_matrix(&pieces, &[]);
        let mut rhs = vec![0.0; sys.dim()];
        for j in self.core.iter() {
            for i in 0..self.n_v() {
                let row = (j - self.range.first) * self.n_v() + i;
                if !self.adjoint_boundary_row(j, i) {
                    rhs[row] = self.epsilon * g.at(j, i);
                }
            }
        }
        let h = sys_solve(&mut sys, &rhs)?;
        Ok(self.read_adjoint_inflow(&h, &pieces))
    }

    fn adjoint_boundary_row(&self, j: usize, i: usize) -> bool {
        let v = self.quad.nodes()[i];
        (v < 0.0 && j == self.range.first) || (v > 0.0 && j == self.range.last)
    }

    /// P_m^* from the coupled adjoint problem: the adjoint equation is solved on
    /// the pieces of D_m cut at the exchange nodes, with h = 0 on Gamma_{m,+} and
    /// the transmitted data psi entering as jumps across each cut.
    pub fn apply_p_star_oracle(&self, psi: &BoundaryTrace) -> Result<BoundaryTrace> {
        let template = self.exchange_template();
        if psi.kind != TraceKind::Outflow
            || psi.left.len() != template.left.len()
            || psi.right.len() != template.right.len()
        {
            return Err(Error::invalid("psi must live on the exchange set of this subdomain"));
        }
        let mut cuts: Vec<usize> = [self.exchange_left, self.exchange_right]
            .into_iter()
            .flatten()
            .collect();
        cuts.sort_unstable();
        cuts.dedup();
        let mut pieces = Vec::new();
        let mut start = self.range.first;
        for &c in &cuts {
            pieces.push(NodeRange::new(start, c));
            start = c;
        }
        pieces.push(NodeRange::new(start, self.range.last));

        let mut sys = self.adjoint_pieces_matrix(&pieces, &cuts);
        let n_v = self.n_v();
        let mut rhs = vec![0.0; sys.dim()];
        let mut block0 = 0;
        for (p, piece) in pieces.iter().enumerate() {
            let nb = piece.len();
            if p + 1 < pieces.len() && Some(piece.last) == self.exchange_right {
                // v > 0: h(x_e^-) - h(x_e^+) = psi on E_{m,m+1}.
                for (i, val) in self.quad.positive().zip(&psi.right) {
                    rhs[(block0 + nb - 1) * n_v + i] = *val;
                }
            }
            if p > 0 && Some(piece.first) == self.exchange_left {
                // v < 0: h(x_e^+) - h(x_e^-) = psi on E_{m,m-1}.
                for (i, val) in self.quad.negative().zip(&psi.left) {
                    rhs[block0 * n_v + i] = *val;
                }
            }
            block0 += nb;
        }
        let h = sys_solve(&mut sys, &rhs)?;
        Ok(self.read_adjoint_inflow(&h, &pieces))
    }

    /// Reversed-upwind adjoint operator on consecutive pieces sharing their cut nodes.
    fn adjoint_pieces_matrix(&self, pieces: &[NodeRange], cuts: &[usize]) -> BlockTridiagonal {
        let n_v = self.n_v();
        let total: usize = pieces.iter().map(|p| p.len()).sum();
        let mut a = BlockTridiagonal::zeros(total, n_v);
        let mut k = 0;
        for (p, piece) in pieces.iter().enumerate() {
            let nb = piece.len();
            for (kk, j) in piece.iter().enumerate() {
                let sig = self.sigma[j - self.range.first];
                for i in 0..n_v {
                    let v = self.quad.nodes()[i];
                    let at_end = kk == nb - 1;
                    let at_start = kk == 0;
                    if v > 0.0 && at_end {
                        a.diag_mut(k)[(i, i)] = 1.0;
                        if p + 1 < pieces.len() {
                            debug_assert!(cuts.contains(&j));
                            a.upper_mut(k)[(i, i)] = -1.0;
                        }
                        continue;
                    }
                    if v < 0.0 && at_start {
                        a.diag_mut(k)[(i, i)] = 1.0;
                        if p > 0 {
                            a.lower_mut(k)[(i, i)] = -1.0;
                        }
                        continue;
                    }
                    let adv = self.epsilon * v.abs() / self.dx;
                    {
                        let d = a.diag_mut(k);
                        for (kw, w) in self.quad.weights().iter().enumerate() {
                            d[(i, kw)] -= sig * w;
                        }
                        d[(i, i)] += adv + sig;
                    }
                    if v > 0.0 {
                        a.upper_mut(k)[(i, i)] = -adv;
                    } else {
                        a.lower_mut(k)[(i, i)] = -adv;
                    }
                }
                k += 1;
            }
        }
        a
    }

    fn read_adjoint_inflow(&self, h: &[f64], pieces: &[NodeRange]) -> BoundaryTrace {
        let n_v = self.n_v();
        let total: usize = pieces.iter().map(|p| p.len()).sum();
        let left = self.quad.positive().map(|i| h[i]).collect();
        let right = self
            .quad
            .negative()
            .map(|i| h[(total - 1) * n_v + i])
            .collect();
        BoundaryTrace::inflow(self.m, left, right)
    }

    /// Dense matrix of the map selected by `kind` in orthonormal (rescaled)
    /// coordinates, built by probing the weighted canonical inflow basis.
    pub fn probe_weighted_matrix(&self, kind: MapKind) -> Result<DMatrix<f64>> {
        let win = self.inflow_weights();
        let wout = match kind {
            MapKind::Full => self.full_weights(),
            MapKind::Restricted => self.core_weights(),
            MapKind::BoundaryToBoundary => self.exchange_weights(),
        };
        let mut mat = DMatrix::zeros(wout.len(), win.len());
        let template = BoundaryTrace::inflow_zeros(self.m, self.n_v());
        for (c, wc) in win.iter().enumerate() {
            let mut e = vec![0.0; win.len()];
            e[c] = 1.0 / wc.sqrt();
            let phi = template.with_values(&e)?;
            let out = match kind {
                MapKind::Full => self.solve_local(&phi)?.0.into_vec(),
                MapKind::Restricted => self.solve_restricted(&phi)?.into_vec(),
                MapKind::BoundaryToBoundary => self.apply_p(&phi)?.to_vec(),
            };
            for (r, (o, w)) in out.iter().zip(&wout).enumerate() {
                mat[(r, c)] = o * w.sqrt();
            }
        }
        Ok(mat)
    }

    /// Check strict or weak diagonal dominance row by row; returns the smallest
    /// margin |a_ii| - sum_{j != i} |a_ij| over all rows.
    pub fn min_dominance_margin(&self) -> f64 {
        (0..self.csr.dim())
            .map(|r| {
                let mut diag = 0.0;
                let mut off = 0.0;
                for (c, v) in self.csr.row(r) {
                    if c == r {
                        diag += v.abs();
                    } else {
                        off += v.abs();
                    }
                }
                diag - off
            })
            .fold(f64::INFINITY, f64::min)
    }
}

fn sys_solve(a: &mut BlockTridiagonal, rhs: &[f64]) -> Result<Vec<f64>> {
    Ok(a.factor()?.solve(rhs))
}

/// Which discrete map to probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapKind {
    /// S_m, inflow to all of D_m.
    Full,
    /// S_m^s, inflow to the core.
    Restricted,
    /// P_m, inflow to the exchange set.
    BoundaryToBoundary,
}

/// One transport sweep: inverts the ordinate-diagonal part of the block system
/// (streaming plus collision, scattering coupling dropped), marching each
/// ordinate in its upwind direction.
pub fn transport_sweep(a: &BlockTridiagonal, r: &[f64]) -> Vec<f64> {
    let nb = a.n_blocks();
    let b = a.block_size();
    let mut x = vec![0.0; r.len()];
    for i in 0..b {
        let forward = (0..nb).all(|k| a.upper(k)[(i, i)] == 0.0);
        if forward {
            for k in 0..nb {
                let mut s = r[k * b + i];
                if k > 0 {
                    s -= a.lower(k)[(i, i)] * x[(k - 1) * b + i];
                }
                x[k * b + i] = s / a.diag(k)[(i, i)];
            }
        } else {
            for k in (0..nb).rev() {
                let mut s = r[k * b + i];
                if k + 1 < nb {
                    s -= a.upper(k)[(i, i)] * x[(k + 1) * b + i];
                }
                x[k * b + i] = s / a.diag(k)[(i, i)];
            }
        }
    }
    x
}

/// Monolithic direct solve on the whole slab with physical inflow data.
pub fn solve_global(problem: &Problem, inflow: &PhysicalInflow) -> Result<PhaseSpaceField> {
    let sys = assemble_global(problem, SolverSettings::default())?;
    let phi = BoundaryTrace::inflow(0, inflow.left.clone(), inflow.right.clone());
    Ok(sys.solve_local(&phi)?.0)
}

/// J(x_j) = sum_i w_i v_i u(x_j, v_i).
pub fn flux_profile(u: &PhaseSpaceField, quad: &AngularQuadrature) -> Vec<f64> {
    u.range()
        .iter()
        .map(|j| {
            u.node(j)
                .iter()
                .zip(quad.nodes())
                .zip(quad.weights())
                .map(|((uu, v), w)| uu * v * w)
                .sum()
        })
        .collect()
}

/// max_j |J_j - mean(J)|.
pub fn flux_deviation(u: &PhaseSpaceField, quad: &AngularQuadrature) -> f64 {
    let j = flux_profile(u, quad);
    let mean = j.iter().sum::<f64>() / j.len() as f64;
    j.iter().map(|x| (x - mean).abs()).fold(0.0, f64::max)
}

/// Free-function forms of the map applications.
pub fn solve_local(sys: &LocalSystem, phi: &BoundaryTrace) -> Result<(PhaseSpaceField, SolveReport)> {
    sys.solve_local(phi)
}

pub fn restrict_interior(sys: &LocalSystem, u: &PhaseSpaceField) -> Result<PhaseSpaceField> {
    u.restrict(sys.core())
}

pub fn take_exchange_traces(sys: &LocalSystem, u_s: &PhaseSpaceField) -> Result<BoundaryTrace> {
    sys.take_exchange_traces(u_s)
}

pub fn apply_p(sys: &LocalSystem, phi: &BoundaryTrace) -> Result<BoundaryTrace> {
    sys.apply_p(phi)
}

pub fn apply_s_s_adjoint(sys: &LocalSystem, g: &PhaseSpaceField) -> Result<BoundaryTrace> {
    sys.apply_s_s_adjoint(g)
}

pub fn apply_p_star_oracle(sys: &LocalSystem, psi: &BoundaryTrace) -> Result<BoundaryTrace> {
    sys.apply_p_star_oracle(psi)
}

#[cfg(test)]
mod tests;
