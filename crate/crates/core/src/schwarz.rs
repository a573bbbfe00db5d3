//! Additive overlapping Schwarz iteration with full or compressed local maps,
//! and partition-of-unity assembly of the global field.

use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::disc::{boundary_norm, BoundaryTrace, DecompositionGeometry, NodeRange, PhaseSpaceField};
use crate::error::{Error, Result};
use crate::linalg::norm2;
use crate::problem::{PhysicalInflow, Problem};
use crate::rsvd::LowRankMap;
use crate::transport::{assemble_local, LocalSystem, SolverSettings};

/// Assembled local systems and the partition of unity for one problem.
#[derive(Debug, Clone)]
pub struct SchwarzContext {
    problem: Problem,
    systems: Vec<LocalSystem>,
    partition: PartitionOfUnity,
}

impl SchwarzContext {
    pub fn new(problem: Problem, settings: SolverSettings) -> Result<Self> {
        let systems = (1..=problem.geometry.m_count())
            .into_par_iter()
            .map(|m| assemble_local(&problem, m, settings))
            .collect::<Result<Vec<_>>>()?;
        let partition = build_partition(&problem.geometry);
        Ok(Self {
            problem,
            systems,
            partition,
        })
    }

    pub fn problem(&self) -> &Problem {
        &self.problem
    }

    pub fn systems(&self) -> &[LocalSystem] {
        &self.systems
    }

    pub fn system(&self, m: usize) -> Result<&LocalSystem> {
        m.checked_sub(1)
            .and_then(|k| self.systems.get(k))
            .ok_or_else(|| Error::invalid(format!("no subdomain {m}")))
    }

    pub fn partition(&self) -> &PartitionOfUnity {
        &self.partition
    }

    pub fn m_count(&self) -> usize {
        self.systems.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchwarzState {
    pub t: usize,
    /// Inflow traces phi_m, index m - 1.
    pub traces: Vec<BoundaryTrace>,
    pub history: Vec<f64>,
    pub converged: bool,
}

/// Zero interior traces; physical data on the left of subdomain 1 and the right of subdomain M.
pub fn init_state(geometry: &DecompositionGeometry, n_v: usize, inflow: &PhysicalInflow) -> Result<SchwarzState> {
    let half = n_v / 2;
    if inflow.left.len() != half || inflow.right.len() != half {
        return Err(Error::invalid(format!(
            "physical inflow data must carry {half} values per side"
        )));
    }
    let mc = geometry.m_count();
    let traces = (1..=mc)
        .map(|m| {
            let left = if m == 1 { inflow.left.clone() } else { vec![0.0; half] };
            let right = if m == mc { inflow.right.clone() } else { vec![0.0; half] };
            BoundaryTrace::inflow(m, left, right)
        })
        .collect();
    Ok(SchwarzState {
        t: 0,
        traces,
        history: Vec::new(),
        converged: false,
    })
}

/// Compressed map of one subdomain with its left factors pre-sampled at the
/// exchange nodes, so an online step never touches the full core field.
#[derive(Debug, Clone)]
pub struct CompressedExchange {
    pub map: LowRankMap,
    /// mu_i at the left exchange node, v < 0 ordinates.
    left: Vec<Vec<f64>>,
    /// mu_i at the right exchange node, v > 0 ordinates.
    right: Vec<Vec<f64>>,
    scaled_nu: Vec<Vec<f64>>,
}

impl CompressedExchange {
    fn new(sys: &LocalSystem, map: LowRankMap) -> Result<Self> {
        if map.core != sys.core() || map.n_v != sys.n_v() || map.subdomain != sys.subdomain() {
            return Err(Error::invalid(format!(
                "map for subdomain {} does not match the local geometry",
                map.subdomain
            )));
        }
        let n_v = sys.n_v();
        let half = n_v / 2;
        let (el, er) = sys.exchange_nodes();
        let sample = |e: Option<usize>, ords: std::ops::Range<usize>| -> Vec<Vec<f64>> {
            match e {
                Some(e) => map
                    .left
                    .iter()
                    .map(|mu| {
                        let base = (e - map.core.first) * n_v;
                        ords.clone().map(|i| mu[base + i]).collect()
                    })
                    .collect(),
                None => vec![Vec::new(); map.rank()],
            }
        };
        let left = sample(el, 0..half);
        let right = sample(er, half..n_v);
        // sigma_i * nu_i * boundary weights, so a coefficient is a plain dot product.
        let scaled_nu = map
            .right
            .iter()
            .zip(&map.sigma)
            .map(|(nu, s)| nu.iter().zip(&map.boundary_weights).map(|(a, w)| s * a * w).collect())
            .collect();
        Ok(Self {
            map,
            left,
            right,
            scaled_nu,
        })
    }

    fn exchange(&self, phi: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut out_l = vec![0.0; self.left.first().map_or(0, |v| v.len())];
        let mut out_r = vec![0.0; self.right.first().map_or(0, |v| v.len())];
        for ((snu, l), r) in self.scaled_nu.iter().zip(&self.left).zip(&self.right) {
            let c: f64 = snu.iter().zip(phi).map(|(a, b)| a * b).sum();
            out_l.iter_mut().zip(l).for_each(|(o, v)| *o += c * v);
            out_r.iter_mut().zip(r).for_each(|(o, v)| *o += c * v);
        }
        (out_l, out_r)
    }
}

pub enum Backend {
    /// Local transport solve per subdomain and step.
    Full,
    /// One compressed map per subdomain.
    LowRank(Vec<CompressedExchange>),
}

impl Backend {
    /// Validate that there is exactly one map per subdomain, built for this problem.
    pub fn low_rank(ctx: &SchwarzContext, maps: Vec<LowRankMap>) -> Result<Self> {
        if maps.len() != ctx.m_count() {
            return Err(Error::invalid(format!(
                "expected {} compressed maps, got {}",
                ctx.m_count(),
                maps.len()
            )));
        }
        let fp = ctx.problem.fingerprint();
        let mut out = Vec::with_capacity(maps.len());
        for (k, map) in maps.into_iter().enumerate() {
            if map.subdomain != k + 1 {
                return Err(Error::invalid(format!(
                    "map {} is stored in slot {}",
                    map.subdomain,
                    k + 1
                )));
            }
            if map.fingerprint != fp {
                return Err(Error::StaleMap {
                    subdomain: map.subdomain,
                });
            }
            out.push(CompressedExchange::new(&ctx.systems[k], map)?);
        }
        Ok(Backend::LowRank(out))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Backend::Full => "full",
            Backend::LowRank(_) => "lowrank",
        }
    }
}

/// Exchange traces (toward m - 1, toward m + 1) produced by each subdomain.
fn exchange_all(ctx: &SchwarzContext, backend: &Backend, state: &SchwarzState) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
    match backend {
        Backend::Full => ctx
            .systems
            .par_iter()
            .zip(&state.traces)
            .map(|(sys, phi)| {
                let (u, _) = sys.solve_local(phi)?;
                let tr = sys.take_exchange_traces(&u)?;
                Ok((tr.left, tr.right))
            })
            .collect(),
        Backend::LowRank(maps) => Ok(maps
            .iter()
            .zip(&state.traces)
            .map(|(c, phi)| c.exchange(&phi.to_vec()))
            .collect()),
    }
}

/// One additive step: all subdomains read the previous traces, then all new
/// traces are committed together. Physical entries are left untouched.
pub fn schwarz_step(ctx: &SchwarzContext, backend: &Backend, state: &SchwarzState) -> Result<SchwarzState> {
    let outs = exchange_all(ctx, backend, state)?;
    let mc = ctx.m_count();
    let mut next = state.traces.clone();
    for m in 1..=mc {
        let phi = &mut next[m - 1];
        if m > 1 {
            phi.left = outs[m - 2].1.clone();
        }
        if m < mc {
            phi.right = outs[m].0.clone();
        }
    }
    let quad = &ctx.problem.quad;
    let mut err = 0.0;
    for (a, b) in next.iter().zip(&state.traces) {
        let d = a.with_values(&a.to_vec().iter().zip(b.to_vec()).map(|(x, y)| x - y).collect::<Vec<_>>())?;
        err += boundary_norm(&d, quad)?;
    }
    let mut history = state.history.clone();
    history.push(err);
    Ok(SchwarzState {
        t: state.t + 1,
        traces: next,
        history,
        converged: false,
    })
}

#[derive(Debug, Clone)]
pub struct SchwarzRun {
    pub state: SchwarzState,
    /// Full local solutions u_m from the final traces, index m - 1.
    pub fields: Vec<PhaseSpaceField>,
    pub assembled: PhaseSpaceField,
    /// Wall time of each online step.
    pub step_times: Vec<Duration>,
}

/// Iterate until the step error is at most `tau` or `max_iters` steps were
/// taken, then solve every subdomain with its final traces and assemble.
/// `observer` sees each committed state.
pub fn run_schwarz(
    ctx: &SchwarzContext,
    backend: &Backend,
    inflow: &PhysicalInflow,
    tau: f64,
    max_iters: usize,
    mut observer: Option<&mut dyn FnMut(&SchwarzState) -> Result<()>>,
) -> Result<SchwarzRun> {
    if !(tau > 0.0) {
        return Err(Error::invalid("tau must be positive"));
    }
    let mut state = init_state(&ctx.problem.geometry, ctx.problem.n_v(), inflow)?;
    let mut step_times = Vec::new();
    while state.t < max_iters {
        let start = Instant::now();
        let mut next = schwarz_step(ctx, backend, &state)?;
        step_times.push(start.elapsed());
        next.converged = *next.history.last().expect("step appends history") <= tau;
        state = next;
        if let Some(obs) = observer.as_mut() {
            obs(&state)?;
        }
        if state.converged {
            break;
        }
    }
    let fields = local_solutions(ctx, &state.traces)?;
    let assembled = assemble(ctx, &fields)?;
    Ok(SchwarzRun {
        state,
        fields,
        assembled,
        step_times,
    })
}

/// u_m = S_m(phi_m) for every subdomain.
pub fn local_solutions(ctx: &SchwarzContext, traces: &[BoundaryTrace]) -> Result<Vec<PhaseSpaceField>> {
    ctx.systems
        .par_iter()
        .zip(traces)
        .map(|(sys, phi)| sys.solve_local(phi).map(|(u, _)| u))
        .collect()
}

/// sum_m eta_m u_m over all grid nodes.
pub fn assemble(ctx: &SchwarzContext, fields: &[PhaseSpaceField]) -> Result<PhaseSpaceField> {
    let n_v = ctx.problem.n_v();
    let all = NodeRange::new(0, ctx.problem.grid.n_cells());
    let mut out = PhaseSpaceField::zeros(all, n_v);
    if fields.len() != ctx.m_count() {
        return Err(Error::invalid("one local field per subdomain is required"));
    }
    for (eta, u) in ctx.partition.weights.iter().zip(fields) {
        if u.range() != eta.range {
            return Err(Error::invalid("local field does not cover its subdomain"));
        }
        for (k, j) in eta.range.iter().enumerate() {
            let w = eta.values[k];
            if w == 0.0 {
                continue;
            }
            let dst = &mut out.data_mut()[j * n_v..(j + 1) * n_v];
            dst.iter_mut().zip(u.node(j)).for_each(|(d, s)| *d += w * s);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeWeights {
    pub range: NodeRange,
    pub values: Vec<f64>,
}

impl NodeWeights {
    pub fn at(&self, j: usize) -> f64 {
        if self.range.contains(j) {
            self.values[j - self.range.first]
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionOfUnity {
    pub weights: Vec<NodeWeights>,
}

impl PartitionOfUnity {
    pub fn eta(&self, m: usize) -> &NodeWeights {
        &self.weights[m - 1]
    }
}

/// Linear ramps across each overlap, one elsewhere on K_m, zero outside.
pub fn build_partition(geometry: &DecompositionGeometry) -> PartitionOfUnity {
    let subs = geometry.subdomains();
    let mc = subs.len();
    let weights = (0..mc)
        .map(|k| {
            let range = subs[k].nodes;
            let mut values = vec![1.0; range.len()];
            for (idx, j) in range.iter().enumerate() {
                if k > 0 {
                    // Overlap with the left neighbor: [first of K_m, last of K_{m-1}].
                    let (a, b) = (range.first, subs[k - 1].nodes.last);
                    if j <= b {
                        values[idx] = (j - a) as f64 / (b - a) as f64;
                    }
                }
                if k + 1 < mc {
                    let (a, b) = (subs[k + 1].nodes.first, range.last);
                    if j >= a {
                        values[idx] = (b - j) as f64 / (b - a) as f64;
                    }
                }
            }
            NodeWeights { range, values }
        })
        .collect();
    PartitionOfUnity { weights }
}

/// Plain l2 relative difference over all node x ordinate entries.
pub fn relative_error(u: &PhaseSpaceField, reference: &PhaseSpaceField) -> Result<f64> {
    if u.range() != reference.range() || u.n_v() != reference.n_v() {
        return Err(Error::invalid("fields have different shapes"));
    }
    let r = norm2(reference.data());
    if r == 0.0 {
        return Err(Error::invalid("reference field is zero"));
    }
    let d: Vec<f64> = u.data().iter().zip(reference.data()).map(|(a, b)| a - b).collect();
    Ok(norm2(&d) / r)
}
