//! C ABI for the low-rank Schwarz solver.
//!
//! Every function returns an `LrsStatus`. On failure the message of the last
//! error on the calling thread is available from `lrs_last_error_message`.
//! Handles are opaque and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use lowrank_schwarz::disc::PhaseSpaceField;
use lowrank_schwarz::harness::{
    cmd_homog_check, cmd_offline, cmd_reference, cmd_run, dense_spectrum, load_cache, BackendChoice, ExperimentConfig,
    MapCache, SpectrumMap, MAP_CACHE_FILE,
};
use lowrank_schwarz::transport::solve_global;
use lowrank_schwarz::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LrsStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    Config = 2,
    NonConvergence = 3,
    Cache = 4,
    Io = 5,
    InvalidArgument = 6,
    /// The output buffer is too small; the required length was written.
    BufferTooSmall = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LrsBackend {
    Full = 0,
    LowRank = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LrsMap {
    /// Inflow data to the solution on the whole subdomain.
    S = 0,
    /// Inflow data to the solution on the buffered interior.
    Ss = 1,
    /// Inflow data to the traces sent to the neighbors.
    P = 2,
}

/// Opaque experiment configuration.
pub struct LrsConfig {
    inner: ExperimentConfig,
}

/// Opaque phase-space field, node-major with `n_v` ordinates per node.
pub struct LrsField {
    inner: PhaseSpaceField,
}

/// Opaque set of compressed subdomain maps.
pub struct LrsMapCache {
    inner: MapCache,
}

/// Summary of one online run.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct LrsRunSummary {
    pub iterations: usize,
    pub converged: bool,
    pub final_trace_error: f64,
    pub final_rel_error: f64,
    pub mean_step_seconds: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> LrsStatus {
    match e {
        Error::Config(_) | Error::Alignment { .. } => LrsStatus::Config,
        Error::InvalidArgument(_) => LrsStatus::InvalidArgument,
        Error::NonConvergence { .. } => LrsStatus::NonConvergence,
        Error::StaleMap { .. } | Error::Cache(_) => LrsStatus::Cache,
        Error::Io { .. } => LrsStatus::Io,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (LrsStatus, String)>) -> LrsStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LrsStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            LrsStatus::Panic
        }
    }
}

fn lift<T>(r: Result<T, Error>) -> Result<T, (LrsStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(name: &str) -> (LrsStatus, String) {
    (LrsStatus::NullArgument, format!("{name} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, (LrsStatus, String)> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (LrsStatus::InvalidArgument, format!("{name} is not valid UTF-8")))
}

unsafe fn cfg_arg<'a>(p: *const LrsConfig) -> Result<&'a ExperimentConfig, (LrsStatus, String)> {
    p.as_ref().map(|c| &c.inner).ok_or_else(|| null("config"))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), (LrsStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn lrs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lrs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Default configuration.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn lrs_config_default(out: *mut *mut LrsConfig) -> LrsStatus {
    guard(|| put(out, LrsConfig { inner: ExperimentConfig::default() }))
}

/// Parse a TOML configuration.
///
/// # Safety
/// `toml` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lrs_config_from_toml(toml: *const c_char, out: *mut *mut LrsConfig) -> LrsStatus {
    guard(|| {
        let text = str_arg(toml, "toml")?;
        let inner = lift(ExperimentConfig::from_toml_str(text))?;
        put(out, LrsConfig { inner })
    })
}

/// Load a TOML configuration file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lrs_config_load(path: *const c_char, out: *mut *mut LrsConfig) -> LrsStatus {
    guard(|| {
        let p = str_arg(path, "path")?;
        let inner = lift(ExperimentConfig::load(std::path::Path::new(p)))?;
        put(out, LrsConfig { inner })
    })
}

/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn lrs_config_set_seed(cfg: *mut LrsConfig, seed: u64) -> LrsStatus {
    guard(|| {
        let c = cfg.as_mut().ok_or_else(|| null("config"))?;
        c.inner.seed = seed;
        Ok(())
    })
}

/// # Safety
/// `cfg` must be a live handle and `dir` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn lrs_config_set_out_dir(cfg: *mut LrsConfig, dir: *const c_char) -> LrsStatus {
    guard(|| {
        let d = str_arg(dir, "dir")?;
        let c = cfg.as_mut().ok_or_else(|| null("config"))?;
        c.inner.out_dir = PathBuf::from(d);
        Ok(())
    })
}

/// # Safety
/// `cfg` must be a live handle, `rank` at least 1.
#[no_mangle]
pub unsafe extern "C" fn lrs_config_set_rank(cfg: *mut LrsConfig, rank: usize) -> LrsStatus {
    guard(|| {
        let c = cfg.as_mut().ok_or_else(|| null("config"))?;
        let mut next = c.inner.clone();
        next.rank = rank;
        lift(next.validate())?;
        c.inner = next;
        Ok(())
    })
}

/// Release a configuration. Null is ignored.
///
/// # Safety
/// `cfg` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lrs_config_free(cfg: *mut LrsConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Monolithic direct solve of the configured problem.
///
/// # Safety
/// `cfg` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lrs_solve_global(cfg: *const LrsConfig, out: *mut *mut LrsField) -> LrsStatus {
    guard(|| {
        let c = cfg_arg(cfg)?;
        let problem = lift(c.problem())?;
        let u = lift(solve_global(&problem, &c.inflow_data(&problem.quad)))?;
        put(out, LrsField { inner: u })
    })
}

/// Converged Schwarz reference, written to the output directory.
///
/// # Safety
/// `cfg` must be a live handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn lrs_reference(cfg: *const LrsConfig, out: *mut *mut LrsField) -> LrsStatus {
    guard(|| {
        let c = cfg_arg(cfg)?;
        let r = lift(cmd_reference(c))?;
        if !out.is_null() {
            put(out, LrsField { inner: r.field })?;
        }
        Ok(())
    })
}

/// Build and store the compressed maps.
///
/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn lrs_offline(cfg: *const LrsConfig) -> LrsStatus {
    guard(|| {
        let c = cfg_arg(cfg)?;
        lift(cmd_offline(c))?;
        Ok(())
    })
}

/// Online run with the chosen backend.
///
/// # Safety
/// `cfg` must be a live handle; `summary` must be writable; `out` must be
/// null or writable.
#[no_mangle]
pub unsafe extern "C" fn lrs_run(
    cfg: *const LrsConfig,
    backend: LrsBackend,
    summary: *mut LrsRunSummary,
    out: *mut *mut LrsField,
) -> LrsStatus {
    guard(|| {
        let c = cfg_arg(cfg)?;
        let s = summary.as_mut().ok_or_else(|| null("summary"))?;
        let choice = match backend {
            LrsBackend::Full => BackendChoice::Full,
            LrsBackend::LowRank => BackendChoice::LowRank,
        };
        let r = lift(cmd_run(c, choice))?;
        let state = &r.online.run.state;
        *s = LrsRunSummary {
            iterations: state.t,
            converged: state.converged,
            final_trace_error: state.history.last().copied().unwrap_or(0.0),
            final_rel_error: r.online.rel_errors.last().copied().unwrap_or(f64::NAN),
            mean_step_seconds: r.online.mean_step_seconds(),
        };
        if !out.is_null() {
            put(out, LrsField { inner: r.online.run.assembled })?;
        }
        Ok(())
    })
}

/// Dense singular values of one subdomain map, non-increasing. Writes the
/// count to `len`; if `cap` is smaller, returns `BufferTooSmall`.
///
/// # Safety
/// `cfg` must be a live handle; `buf` must hold `cap` doubles (may be null
/// when `cap` is 0); `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lrs_spectrum(
    cfg: *const LrsConfig,
    map: LrsMap,
    subdomain: usize,
    buf: *mut f64,
    cap: usize,
    len: *mut usize,
) -> LrsStatus {
    guard(|| {
        let c = cfg_arg(cfg)?;
        let len = len.as_mut().ok_or_else(|| null("len"))?;
        if subdomain == 0 || subdomain > c.m_count {
            return Err((LrsStatus::Config, format!("subdomain must lie in 1..={}", c.m_count)));
        }
        let kind = match map {
            LrsMap::S => SpectrumMap::Full,
            LrsMap::Ss => SpectrumMap::Restricted,
            LrsMap::P => SpectrumMap::Boundary,
        };
        let sigma = lift(dense_spectrum(c, kind, subdomain))?;
        copy_out(&sigma, buf, cap, len)
    })
}

/// Velocity-averaged discrepancy to the homogenized medium, one value per
/// configured delta.
///
/// # Safety
/// As for `lrs_spectrum`.
#[no_mangle]
pub unsafe extern "C" fn lrs_homog_check(cfg: *const LrsConfig, buf: *mut f64, cap: usize, len: *mut usize) -> LrsStatus {
    guard(|| {
        let c = cfg_arg(cfg)?;
        let len = len.as_mut().ok_or_else(|| null("len"))?;
        let r = lift(cmd_homog_check(c))?;
        let errs: Vec<f64> = r.rows.iter().map(|(_, e)| *e).collect();
        copy_out(&errs, buf, cap, len)
    })
}

unsafe fn copy_out(src: &[f64], buf: *mut f64, cap: usize, len: &mut usize) -> Result<(), (LrsStatus, String)> {
    *len = src.len();
    if cap < src.len() {
        return Err((
            LrsStatus::BufferTooSmall,
            format!("buffer holds {cap} values, {} needed", src.len()),
        ));
    }
    if buf.is_null() {
        return Err(null("buf"));
    }
    std::ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    Ok(())
}

/// # Safety
/// `field` must be a live handle; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn lrs_field_shape(field: *const LrsField, n_nodes: *mut usize, n_v: *mut usize) -> LrsStatus {
    guard(|| {
        let f = field.as_ref().ok_or_else(|| null("field"))?;
        let n = n_nodes.as_mut().ok_or_else(|| null("n_nodes"))?;
        let v = n_v.as_mut().ok_or_else(|| null("n_v"))?;
        *n = f.inner.n_nodes();
        *v = f.inner.n_v();
        Ok(())
    })
}

/// Copy the node-major values into `buf`.
///
/// # Safety
/// `field` must be a live handle; `buf` must hold `cap` doubles; `len` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn lrs_field_copy(field: *const LrsField, buf: *mut f64, cap: usize, len: *mut usize) -> LrsStatus {
    guard(|| {
        let f = field.as_ref().ok_or_else(|| null("field"))?;
        let len = len.as_mut().ok_or_else(|| null("len"))?;
        copy_out(f.inner.data(), buf, cap, len)
    })
}

/// # Safety
/// `field` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lrs_field_free(field: *mut LrsField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Load the map cache of the configured output directory, checking that it
/// was built for the configured problem.
///
/// # Safety
/// `cfg` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lrs_cache_load(cfg: *const LrsConfig, out: *mut *mut LrsMapCache) -> LrsStatus {
    guard(|| {
        let c = cfg_arg(cfg)?;
        let fp = lift(c.problem())?.fingerprint();
        let inner = lift(load_cache(&c.out_dir.join(MAP_CACHE_FILE), Some(&fp)).map_err(Error::from))?;
        put(out, LrsMapCache { inner })
    })
}

/// Number of maps and their stored rank.
///
/// # Safety
/// `cache` must be a live handle; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn lrs_cache_info(cache: *const LrsMapCache, count: *mut usize, rank: *mut usize) -> LrsStatus {
    guard(|| {
        let c = cache.as_ref().ok_or_else(|| null("cache"))?;
        *count.as_mut().ok_or_else(|| null("count"))? = c.inner.maps.len();
        *rank.as_mut().ok_or_else(|| null("rank"))? = c.inner.rsvd.rank;
        Ok(())
    })
}

/// Singular values stored for `subdomain`.
///
/// # Safety
/// As for `lrs_spectrum`, with `cache` a live handle.
#[no_mangle]
pub unsafe extern "C" fn lrs_cache_sigma(
    cache: *const LrsMapCache,
    subdomain: usize,
    buf: *mut f64,
    cap: usize,
    len: *mut usize,
) -> LrsStatus {
    guard(|| {
        let c = cache.as_ref().ok_or_else(|| null("cache"))?;
        let len = len.as_mut().ok_or_else(|| null("len"))?;
        let map = c
            .inner
            .get(subdomain, &c.inner.fingerprint)
            .ok_or_else(|| (LrsStatus::InvalidArgument, format!("no map for subdomain {subdomain}")))?;
        copy_out(&map.sigma, buf, cap, len)
    })
}

/// # Safety
/// `cache` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lrs_cache_free(cache: *mut LrsMapCache) {
    if !cache.is_null() {
        drop(Box::from_raw(cache));
    }
}
