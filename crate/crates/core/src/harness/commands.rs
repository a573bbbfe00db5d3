use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use sha2::{Digest, Sha256};

use crate::disc::{AngularQuadrature, Grid1D, PhaseSpaceField};
use crate::error::{CacheError, Error, Result};
use crate::problem::{PhysicalInflow, Problem};
use crate::rsvd::{compress_subdomain, compress_subdomain_full_basis, truncate, LowRankMap};
use crate::schwarz::{assemble, local_solutions, relative_error, run_schwarz, Backend, SchwarzContext, SchwarzRun};
use crate::transport::{flux_deviation, flux_profile, solve_global, MapKind};

use super::cache::{load_cache, load_field, save_cache, save_field, MapCache, StoredField};
use super::config::{ExperimentConfig, MediaSelector};
use super::output::{write_plot_manifest, Cell, CsvTable};

pub const MAP_CACHE_FILE: &str = "maps.lrsm";

/// Largest probed matrix side `spectrum` accepts.
pub const SPECTRUM_DIM_CAP: usize = 10_000;

/// Fewest grid nodes per oscillation period `homog-check` accepts.
pub const MIN_NODES_PER_PERIOD: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendChoice {
    Full,
    LowRank,
}

impl BackendChoice {
    pub fn name(self) -> &'static str {
        match self {
            BackendChoice::Full => "full",
            BackendChoice::LowRank => "lowrank",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumMap {
    /// S_m
    Full,
    /// S_m^s
    Restricted,
    /// P_m
    Boundary,
}

impl SpectrumMap {
    pub fn name(self) -> &'static str {
        match self {
            SpectrumMap::Full => "S",
            SpectrumMap::Restricted => "Ss",
            SpectrumMap::Boundary => "P",
        }
    }

    fn kind(self) -> MapKind {
        match self {
            SpectrumMap::Full => MapKind::Full,
            SpectrumMap::Restricted => MapKind::Restricted,
            SpectrumMap::Boundary => MapKind::BoundaryToBoundary,
        }
    }
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

fn context(cfg: &ExperimentConfig) -> Result<SchwarzContext> {
    SchwarzContext::new(cfg.problem()?, cfg.solver)
}

/// ubar(x_j) = sum_i w_i u(x_j, v_i).
pub fn velocity_average(u: &PhaseSpaceField, quad: &AngularQuadrature) -> Vec<f64> {
    u.range().iter().map(|j| quad.average(u.node(j))).collect()
}

fn profile_table(grid: &Grid1D, u: &PhaseSpaceField, name: &str, values: &[f64]) -> CsvTable {
    let mut t = CsvTable::new(&["x", name]);
    for (j, v) in u.range().iter().zip(values) {
        t.push(vec![grid.x(j).into(), (*v).into()]);
    }
    t
}

fn history_table(history: &[f64]) -> CsvTable {
    let mut t = CsvTable::new(&["iteration", "trace_error"]);
    for (k, e) in history.iter().enumerate() {
        t.push(vec![(k + 1).into(), (*e).into()]);
    }
    t
}

/// Identifies a reference field: problem, inflow data and stopping rule.
pub fn reference_key(cfg: &ExperimentConfig, problem: &Problem, inflow: &PhysicalInflow) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(b"lrs-reference-v1");
    h.update(problem.fingerprint().0);
    for x in inflow.left.iter().chain(&inflow.right) {
        h.update(x.to_le_bytes());
    }
    h.update(cfg.tau_ref.to_le_bytes());
    h.update((cfg.max_iters_ref as u64).to_le_bytes());
    h.finalize().into()
}

pub fn reference_path(cfg: &ExperimentConfig, key: &[u8; 32]) -> PathBuf {
    let hex: String = key[..8].iter().map(|b| format!("{b:02x}")).collect();
    cfg.out_dir.join(format!("reference-{hex}.lrsf"))
}

#[derive(Debug, Clone)]
pub struct ReferenceReport {
    /// Converged vanilla Schwarz field.
    pub field: PhaseSpaceField,
    /// Monolithic direct solve on the whole slab.
    pub direct: PhaseSpaceField,
    pub history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// ||schwarz - direct|| / ||direct||.
    pub rel_diff_direct: f64,
    pub flux_deviation: f64,
    pub path: PathBuf,
    pub elapsed: Duration,
}

fn compute_reference(cfg: &ExperimentConfig, ctx: &SchwarzContext) -> Result<(SchwarzRun, PhaseSpaceField, Duration)> {
    let problem = ctx.problem();
    let inflow = cfg.inflow_data(&problem.quad);
    let start = Instant::now();
    let run = run_schwarz(ctx, &Backend::Full, &inflow, cfg.tau_ref, cfg.max_iters_ref, None)?;
    let elapsed = start.elapsed();
    let direct = solve_global(problem, &inflow)?;
    Ok((run, direct, elapsed))
}

/// Converged vanilla Schwarz reference plus a global direct cross-check.
/// Writes the field file, history, flux, velocity average and a summary.
/// Fails with `NonConvergence` (after writing the history) if `tau_ref` is
/// not reached within `max_iters_ref` steps.
pub fn cmd_reference(cfg: &ExperimentConfig) -> Result<ReferenceReport> {
    let ctx = context(cfg)?;
    let problem = ctx.problem();
    let inflow = cfg.inflow_data(&problem.quad);
    let (run, direct, elapsed) = compute_reference(cfg, &ctx)?;
    let dir = &cfg.out_dir;
    history_table(&run.state.history).write(&dir.join("reference_history.csv"))?;
    let last = run.state.history.last().copied().unwrap_or(0.0);
    if !run.state.converged {
        return Err(Error::NonConvergence {
            subdomain: None,
            iterations: run.state.t,
            residual: last,
        });
    }
    let field = run.assembled;
    let rel_diff_direct = match relative_error(&field, &direct) {
        Ok(e) => e,
        Err(_) => crate::linalg::norm2(field.data()),
    };
    let key = reference_key(cfg, problem, &inflow);
    let path = reference_path(cfg, &key);
    save_field(
        &path,
        &StoredField {
            fingerprint: problem.fingerprint(),
            key,
            field: field.clone(),
        },
    )?;
    let quad = &problem.quad;
    let flux = flux_profile(&field, quad);
    let dev = flux_deviation(&field, quad);
    profile_table(&problem.grid, &field, "flux", &flux).write(&dir.join("reference_flux.csv"))?;
    profile_table(&problem.grid, &field, "ubar", &velocity_average(&field, quad))
        .write(&dir.join("reference_ubar.csv"))?;
    let mut summary = CsvTable::new(&["method", "iterations", "final_trace_error", "rel_diff_vs_direct", "flux_deviation", "min", "max"]);
    let (lo, hi) = field.min_max();
    summary.push(vec!["schwarz".into(), run.state.t.into(), last.into(), rel_diff_direct.into(), dev.into(), lo.into(), hi.into()]);
    let (dlo, dhi) = direct.min_max();
    summary.push(vec![
        "direct".into(),
        0usize.into(),
        0.0.into(),
        0.0.into(),
        flux_deviation(&direct, quad).into(),
        dlo.into(),
        dhi.into(),
    ]);
    summary.write(&dir.join("reference_summary.csv"))?;
    let mut timing = CsvTable::new(&["stage", "seconds"]);
    timing.push(vec!["schwarz".into(), secs(elapsed).into()]);
    timing.write(&dir.join("reference_timing.csv"))?;
    write_plot_manifest(dir)?;
    Ok(ReferenceReport {
        field,
        direct,
        iterations: run.state.t,
        converged: true,
        history: run.state.history,
        rel_diff_direct,
        flux_deviation: dev,
        path,
        elapsed,
    })
}

/// The stored reference for this config, computed and stored if absent.
pub fn ensure_reference(cfg: &ExperimentConfig) -> Result<PhaseSpaceField> {
    let problem = cfg.problem()?;
    let inflow = cfg.inflow_data(&problem.quad);
    let key = reference_key(cfg, &problem, &inflow);
    let path = reference_path(cfg, &key);
    match load_field(&path, Some(&problem.fingerprint())) {
        Ok(stored) if stored.key == key => Ok(stored.field),
        Ok(_) | Err(CacheError::Io { .. }) | Err(CacheError::FingerprintMismatch { .. }) => {
            Ok(cmd_reference(cfg)?.field)
        }
        Err(e) => Err(e.into()),
    }
}

#[derive(Debug, Clone)]
pub struct OfflineReport {
    pub cache: MapCache,
    pub path: PathBuf,
    /// Build time per subdomain.
    pub build_times: Vec<Duration>,
}

/// Compress every S_m^s at rank `rank`, timing each subdomain.
pub fn build_maps(ctx: &SchwarzContext, cfg: &ExperimentConfig, rank: usize) -> Result<(Vec<LowRankMap>, Vec<Duration>)> {
    let rsvd = cfg.rsvd(rank);
    let mut maps = Vec::with_capacity(ctx.m_count());
    let mut times = Vec::with_capacity(ctx.m_count());
    for sys in ctx.systems() {
        let start = Instant::now();
        let sub_cfg = crate::rsvd::RsvdConfig {
            seed: rsvd.seed.wrapping_add(sys.subdomain() as u64),
            ..rsvd
        };
        maps.push(compress_subdomain(ctx.problem(), sys, &sub_cfg)?);
        times.push(start.elapsed());
    }
    Ok((maps, times))
}

/// Offline stage: compress all maps and store them with their spectra.
pub fn cmd_offline(cfg: &ExperimentConfig) -> Result<OfflineReport> {
    let ctx = context(cfg)?;
    let (maps, build_times) = build_maps(&ctx, cfg, cfg.rank)?;
    let cache = MapCache::new(ctx.problem().fingerprint(), cfg.rsvd(cfg.rank), maps)?;
    let dir = &cfg.out_dir;
    let path = dir.join(MAP_CACHE_FILE);
    save_cache(&path, &cache)?;
    let mut spectra = CsvTable::new(&["subdomain", "index", "sigma", "sigma_rel"]);
    for map in &cache.maps {
        let s1 = map.sigma.first().copied().unwrap_or(0.0);
        for (i, s) in map.sigma.iter().enumerate() {
            let rel = if s1 > 0.0 { s / s1 } else { 0.0 };
            spectra.push(vec![map.subdomain.into(), (i + 1).into(), (*s).into(), rel.into()]);
        }
    }
    spectra.write(&dir.join("offline_spectra.csv"))?;
    let mut timing = CsvTable::new(&["subdomain", "seconds"]);
    for (m, t) in build_times.iter().enumerate() {
        timing.push(vec![(m + 1).into(), secs(*t).into()]);
    }
    timing.write(&dir.join("offline_timing.csv"))?;
    write_plot_manifest(dir)?;
    Ok(OfflineReport {
        cache,
        path,
        build_times,
    })
}

/// Load the map cache for this config, truncated to the configured rank.
pub fn load_maps(cfg: &ExperimentConfig, ctx: &SchwarzContext) -> Result<Vec<LowRankMap>> {
    let fp = ctx.problem().fingerprint();
    let cache = load_cache(&cfg.out_dir.join(MAP_CACHE_FILE), Some(&fp))?;
    if cache.maps.len() != ctx.m_count() {
        return Err(CacheError::Corrupt(format!(
            "cache holds {} maps, the decomposition has {}",
            cache.maps.len(),
            ctx.m_count()
        ))
        .into());
    }
    if cache.rsvd.rank < cfg.rank {
        return Err(CacheError::Corrupt(format!(
            "cache was built at rank {}, rank {} requested; re-run `offline`",
            cache.rsvd.rank, cfg.rank
        ))
        .into());
    }
    cache
        .maps
        .iter()
        .map(|m| truncate(m, cfg.rank.min(m.rank())))
        .collect()
}

#[derive(Debug, Clone)]
pub struct OnlineRun {
    pub run: SchwarzRun,
    /// Relative error of the assembled iterate after each step.
    pub rel_errors: Vec<f64>,
}

impl OnlineRun {
    pub fn online_seconds(&self) -> f64 {
        self.run.step_times.iter().map(|d| d.as_secs_f64()).sum()
    }

    pub fn mean_step_seconds(&self) -> f64 {
        self.online_seconds() / self.run.step_times.len().max(1) as f64
    }
}

/// Schwarz run that also records the assembled error after every step.
/// Only the step itself is timed.
pub fn run_online(
    ctx: &SchwarzContext,
    backend: &Backend,
    inflow: &PhysicalInflow,
    reference: Option<&PhaseSpaceField>,
    tau: f64,
    max_iters: usize,
) -> Result<OnlineRun> {
    let mut rel_errors = Vec::new();
    let run = match reference {
        Some(r) => {
            let mut obs = |s: &crate::schwarz::SchwarzState| -> Result<()> {
                let fields = local_solutions(ctx, &s.traces)?;
                rel_errors.push(relative_error(&assemble(ctx, &fields)?, r)?);
                Ok(())
            };
            run_schwarz(ctx, backend, inflow, tau, max_iters, Some(&mut obs))?
        }
        None => run_schwarz(ctx, backend, inflow, tau, max_iters, None)?,
    };
    Ok(OnlineRun { run, rel_errors })
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub backend: BackendChoice,
    pub online: OnlineRun,
    pub history_path: PathBuf,
}

/// Online stage with either backend against the stored reference.
pub fn cmd_run(cfg: &ExperimentConfig, choice: BackendChoice) -> Result<RunReport> {
    let ctx = context(cfg)?;
    let backend = match choice {
        BackendChoice::Full => Backend::Full,
        BackendChoice::LowRank => Backend::low_rank(&ctx, load_maps(cfg, &ctx)?)?,
    };
    let reference = ensure_reference(cfg)?;
    let problem = ctx.problem();
    let inflow = cfg.inflow_data(&problem.quad);
    let online = run_online(&ctx, &backend, &inflow, Some(&reference), cfg.tau, cfg.max_iters)?;
    let dir = &cfg.out_dir;
    let name = choice.name();
    let mut hist = CsvTable::new(&["iteration", "trace_error", "rel_error"]);
    for (k, (e, r)) in online.run.state.history.iter().zip(&online.rel_errors).enumerate() {
        hist.push(vec![(k + 1).into(), (*e).into(), (*r).into()]);
    }
    let history_path = dir.join(format!("run_{name}_history.csv"));
    hist.write(&history_path)?;
    let mut timing = CsvTable::new(&["iteration", "wall_seconds"]);
    for (k, t) in online.run.step_times.iter().enumerate() {
        timing.push(vec![(k + 1).into(), secs(*t).into()]);
    }
    timing.write(&dir.join(format!("run_{name}_timing.csv")))?;
    let field = &online.run.assembled;
    profile_table(&problem.grid, field, "ubar", &velocity_average(field, &problem.quad))
        .write(&dir.join(format!("run_{name}_ubar.csv")))?;
    save_field(
        &dir.join(format!("run_{name}.lrsf")),
        &StoredField {
            fingerprint: problem.fingerprint(),
            key: [0; 32],
            field: field.clone(),
        },
    )?;
    write_plot_manifest(dir)?;
    Ok(RunReport {
        backend: choice,
        online,
        history_path,
    })
}

#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub map: SpectrumMap,
    pub subdomain: usize,
    /// Singular values, non-increasing.
    pub sigma: Vec<f64>,
    pub path: PathBuf,
}

impl SpectrumReport {
    pub fn ratio(&self, i: usize) -> f64 {
        self.sigma[i - 1] / self.sigma[0]
    }
}

/// Dense probed matrix of the selected map in orthonormal coordinates and its
/// singular values.
pub fn dense_spectrum(cfg: &ExperimentConfig, map: SpectrumMap, m: usize) -> Result<Vec<f64>> {
    let problem = cfg.problem()?;
    let sys = crate::transport::assemble_local(&problem, m, cfg.solver)?;
    let rows = match map {
        SpectrumMap::Full => sys.dim(),
        SpectrumMap::Restricted => sys.core().len() * sys.n_v(),
        SpectrumMap::Boundary => sys.exchange_weights().len(),
    };
    let cols = sys.inflow_weights().len();
    if rows.max(cols) > SPECTRUM_DIM_CAP {
        return Err(Error::Config(format!(
            "probed matrix would be {rows} x {cols}, above the cap of {SPECTRUM_DIM_CAP}; \
             use fewer cells or ordinates, or the randomized `offline` spectra instead"
        )));
    }
    let a = sys.probe_weighted_matrix(map.kind())?;
    let mut sigma: Vec<f64> = a.svd(false, false).singular_values.iter().copied().collect();
    sigma.sort_by(|x, y| y.total_cmp(x));
    Ok(sigma)
}

pub fn cmd_spectrum(cfg: &ExperimentConfig, map: SpectrumMap, m: usize) -> Result<SpectrumReport> {
    if m == 0 || m > cfg.m_count {
        return Err(Error::Config(format!("subdomain must lie in 1..={}, got {m}", cfg.m_count)));
    }
    let sigma = dense_spectrum(cfg, map, m)?;
    let s1 = sigma.first().copied().unwrap_or(0.0);
    let mut t = CsvTable::new(&["index", "sigma", "sigma_rel"]);
    for (i, s) in sigma.iter().enumerate() {
        let rel = if s1 > 0.0 { s / s1 } else { 0.0 };
        t.push(vec![(i + 1).into(), (*s).into(), rel.into()]);
    }
    let path = cfg.out_dir.join(format!("spectrum_{}_m{m}.csv", map.name()));
    t.write(&path)?;
    write_plot_manifest(&cfg.out_dir)?;
    Ok(SpectrumReport {
        map,
        subdomain: m,
        sigma,
        path,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankRow {
    pub rank: usize,
    pub numerical_rank: usize,
    /// After `max_iters` low-rank steps, against the converged reference.
    pub rel_error: f64,
    /// Low-rank iteration run to `tau_ref`, against the converged reference.
    pub rel_error_converged: f64,
    /// After `max_iters` low-rank steps, against `max_iters` vanilla steps.
    pub rel_error_vs_vanilla: f64,
    pub offline_seconds: f64,
    pub online_seconds: f64,
    pub online_step_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct RankSweepReport {
    pub rows: Vec<RankRow>,
    /// Vanilla error after `max_iters` steps.
    pub vanilla_error: f64,
    pub vanilla_online_seconds: f64,
    pub vanilla_step_seconds: f64,
    pub full_basis_offline_seconds: f64,
    pub full_basis_online_seconds: f64,
    pub full_basis_error: f64,
}

/// For every rank: offline build, `max_iters` online steps and errors, plus
/// the vanilla and full-basis timing rows.
pub fn cmd_rank_sweep(cfg: &ExperimentConfig) -> Result<RankSweepReport> {
    let ctx = context(cfg)?;
    let reference = ensure_reference(cfg)?;
    let inflow = cfg.inflow_data(&ctx.problem().quad);
    let vanilla = run_online(&ctx, &Backend::Full, &inflow, None, cfg.tau, cfg.max_iters)?;
    let vanilla_error = relative_error(&vanilla.run.assembled, &reference)?;

    let mut rows = Vec::new();
    for &r in &cfg.ranks {
        let start = Instant::now();
        let (maps, _) = build_maps(&ctx, cfg, r)?;
        let offline = start.elapsed();
        let numerical_rank = maps.iter().map(|m| m.numerical_rank).min().unwrap_or(0);
        let backend = Backend::low_rank(&ctx, maps)?;
        let online = run_online(&ctx, &backend, &inflow, None, cfg.tau, cfg.max_iters)?;
        let long = run_online(&ctx, &backend, &inflow, None, cfg.tau_ref, cfg.max_iters_ref)?;
        rows.push(RankRow {
            rank: r,
            numerical_rank,
            rel_error: relative_error(&online.run.assembled, &reference)?,
            rel_error_converged: relative_error(&long.run.assembled, &reference)?,
            rel_error_vs_vanilla: relative_error(&online.run.assembled, &vanilla.run.assembled)?,
            offline_seconds: secs(offline),
            online_seconds: online.online_seconds(),
            online_step_seconds: online.mean_step_seconds(),
        });
    }

    let start = Instant::now();
    let full_maps = ctx
        .systems()
        .iter()
        .map(|sys| compress_subdomain_full_basis(ctx.problem(), sys, sys.inflow_weights().len()))
        .collect::<Result<Vec<_>>>()?;
    let full_offline = start.elapsed();
    let full_backend = Backend::low_rank(&ctx, full_maps)?;
    let full = run_online(&ctx, &full_backend, &inflow, None, cfg.tau, cfg.max_iters)?;
    let full_basis_error = relative_error(&full.run.assembled, &reference)?;

    let dir = &cfg.out_dir;
    let mut t = CsvTable::new(&["rank", "numerical_rank", "rel_error", "rel_error_converged", "rel_error_vs_vanilla"]);
    for row in &rows {
        t.push(vec![
            row.rank.into(),
            row.numerical_rank.into(),
            row.rel_error.into(),
            row.rel_error_converged.into(),
            row.rel_error_vs_vanilla.into(),
        ]);
    }
    t.write(&dir.join("rank_sweep.csv"))?;
    let mut table1 = CsvTable::new(&["method", "rank", "offline_seconds", "online_seconds", "online_step_seconds", "rel_error"]);
    table1.push(vec![
        "vanilla".into(),
        0usize.into(),
        0.0.into(),
        vanilla.online_seconds().into(),
        vanilla.mean_step_seconds().into(),
        vanilla_error.into(),
    ]);
    table1.push(vec![
        "full_basis".into(),
        ctx.problem().n_v().into(),
        secs(full_offline).into(),
        full.online_seconds().into(),
        full.mean_step_seconds().into(),
        full_basis_error.into(),
    ]);
    for row in &rows {
        table1.push(vec![
            "reduced".into(),
            row.rank.into(),
            row.offline_seconds.into(),
            row.online_seconds.into(),
            row.online_step_seconds.into(),
            row.rel_error.into(),
        ]);
    }
    table1.write(&dir.join("table1.csv"))?;
    write_plot_manifest(dir)?;
    Ok(RankSweepReport {
        rows,
        vanilla_error,
        vanilla_online_seconds: vanilla.online_seconds(),
        vanilla_step_seconds: vanilla.mean_step_seconds(),
        full_basis_offline_seconds: secs(full_offline),
        full_basis_online_seconds: full.online_seconds(),
        full_basis_error,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HomogReport {
    /// (delta, ||ubar^delta - ubar*|| / ||ubar*||)
    pub rows: Vec<(f64, f64)>,
}

/// Velocity-averaged discrepancy between the configured medium at each delta
/// and the homogenized medium, both solved globally at `homog_epsilon`.
pub fn cmd_homog_check(cfg: &ExperimentConfig) -> Result<HomogReport> {
    let mut rows = Vec::new();
    for &delta in &cfg.deltas {
        let per_period = delta * cfg.n_cells as f64;
        if per_period < MIN_NODES_PER_PERIOD {
            return Err(Error::Config(format!(
                "delta = {delta} spans {per_period:.2} cells per period with n_cells = {}; at least {MIN_NODES_PER_PERIOD} are needed",
                cfg.n_cells
            )));
        }
        let osc = cfg.problem_with(cfg.homog_epsilon, delta, cfg.media)?;
        let hom = cfg.problem_with(cfg.homog_epsilon, delta, MediaSelector::Homogenized)?;
        let inflow = cfg.inflow_data(&osc.quad);
        let u_d = velocity_average(&solve_global(&osc, &inflow)?, &osc.quad);
        let u_h = velocity_average(&solve_global(&hom, &inflow)?, &hom.quad);
        let w = osc.grid.trapezoid_weights(0, osc.grid.n_cells());
        let num: f64 = u_d.iter().zip(&u_h).zip(&w).map(|((a, b), w)| w * (a - b).powi(2)).sum();
        let den: f64 = u_h.iter().zip(&w).map(|(b, w)| w * b * b).sum();
        rows.push((delta, if den > 0.0 { (num / den).sqrt() } else { num.sqrt() }));
    }
    let mut t = CsvTable::new(&["delta", "rel_error"]);
    for (d, e) in &rows {
        t.push(vec![Cell::Real(*d), Cell::Real(*e)]);
    }
    t.write(&cfg.out_dir.join("homog_check.csv"))?;
    write_plot_manifest(&cfg.out_dir)?;
    Ok(HomogReport { rows })
}

/// Path helper for callers that want the directory a config writes to.
pub fn out_dir(cfg: &ExperimentConfig) -> &Path {
    &cfg.out_dir
}
