use std::ffi::{CStr, CString};
use std::ptr;

use lowrank_schwarz_ffi::*;

const SMALL: &str = "n_cells = 40\nn_v = 16\nm_count = 2\nrank = 3\noversample = 4\nranks = [3]\nmax_iters = 20\n";

fn last_error() -> String {
    let p = lrs_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn small_config(dir: &std::path::Path) -> *mut LrsConfig {
    let toml = CString::new(SMALL).unwrap();
    let mut cfg = ptr::null_mut();
    assert_eq!(unsafe { lrs_config_from_toml(toml.as_ptr(), &mut cfg) }, LrsStatus::Ok);
    let d = CString::new(dir.to_str().unwrap()).unwrap();
    assert_eq!(unsafe { lrs_config_set_out_dir(cfg, d.as_ptr()) }, LrsStatus::Ok);
    cfg
}

#[test]
fn version_is_a_string() {
    let v = unsafe { CStr::from_ptr(lrs_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn config_errors_map_to_status() {
    let bad = CString::new("bogus = 1\n").unwrap();
    let mut cfg = ptr::null_mut();
    assert_eq!(unsafe { lrs_config_from_toml(bad.as_ptr(), &mut cfg) }, LrsStatus::Config);
    assert!(cfg.is_null());
    assert!(last_error().contains("bogus"));
    assert_eq!(unsafe { lrs_config_from_toml(ptr::null(), &mut cfg) }, LrsStatus::NullArgument);
    let missing = CString::new("/nonexistent/cfg.toml").unwrap();
    assert_eq!(unsafe { lrs_config_load(missing.as_ptr(), &mut cfg) }, LrsStatus::Config);

    let mut def = ptr::null_mut();
    assert_eq!(unsafe { lrs_config_default(&mut def) }, LrsStatus::Ok);
    assert_eq!(unsafe { lrs_config_set_rank(def, 0) }, LrsStatus::Config);
    assert_eq!(unsafe { lrs_config_set_rank(def, 4) }, LrsStatus::Ok);
    assert_eq!(unsafe { lrs_config_set_seed(def, 9) }, LrsStatus::Ok);
    assert!(lrs_last_error_message().is_null());
    unsafe { lrs_config_free(def) };
    unsafe { lrs_config_free(ptr::null_mut()) };
}

#[test]
fn global_solve_and_field_access() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let mut field = ptr::null_mut();
    assert_eq!(unsafe { lrs_solve_global(cfg, &mut field) }, LrsStatus::Ok);
    let (mut n, mut v) = (0usize, 0usize);
    assert_eq!(unsafe { lrs_field_shape(field, &mut n, &mut v) }, LrsStatus::Ok);
    assert_eq!((n, v), (41, 16));
    let mut len = 0usize;
    assert_eq!(
        unsafe { lrs_field_copy(field, ptr::null_mut(), 0, &mut len) },
        LrsStatus::BufferTooSmall
    );
    assert_eq!(len, n * v);
    let mut buf = vec![0.0; len];
    assert_eq!(unsafe { lrs_field_copy(field, buf.as_mut_ptr(), buf.len(), &mut len) }, LrsStatus::Ok);
    // Inflow data lies in [0, 11], and the solution obeys the maximum principle.
    assert!(buf.iter().all(|&x| (0.0..=11.0).contains(&x)));
    unsafe {
        lrs_field_free(field);
        lrs_config_free(cfg);
    }
}

#[test]
fn offline_run_and_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let mut summary = LrsRunSummary::default();
    assert_eq!(
        unsafe { lrs_run(cfg, LrsBackend::LowRank, &mut summary, ptr::null_mut()) },
        LrsStatus::Cache
    );
    assert!(last_error().contains("maps.lrsm"));
    assert_eq!(unsafe { lrs_offline(cfg) }, LrsStatus::Ok);
    let mut field = ptr::null_mut();
    assert_eq!(
        unsafe { lrs_run(cfg, LrsBackend::LowRank, &mut summary, &mut field) },
        LrsStatus::Ok
    );
    assert!(summary.iterations >= 1 && summary.iterations <= 20);
    assert!(summary.final_rel_error.is_finite());
    unsafe { lrs_field_free(field) };

    let mut cache = ptr::null_mut();
    assert_eq!(unsafe { lrs_cache_load(cfg, &mut cache) }, LrsStatus::Ok);
    let (mut count, mut rank) = (0usize, 0usize);
    assert_eq!(unsafe { lrs_cache_info(cache, &mut count, &mut rank) }, LrsStatus::Ok);
    assert_eq!((count, rank), (2, 3));
    let mut sigma = [0.0; 3];
    let mut len = 0usize;
    assert_eq!(
        unsafe { lrs_cache_sigma(cache, 1, sigma.as_mut_ptr(), 3, &mut len) },
        LrsStatus::Ok
    );
    assert!(sigma[0] >= sigma[1] && sigma[1] >= sigma[2] && sigma[2] > 0.0);
    assert_eq!(
        unsafe { lrs_cache_sigma(cache, 5, sigma.as_mut_ptr(), 3, &mut len) },
        LrsStatus::InvalidArgument
    );
    unsafe { lrs_cache_free(cache) };

    assert_eq!(unsafe { lrs_config_set_seed(cfg, 2) }, LrsStatus::Ok);
    let other = CString::new(format!("{SMALL}epsilon = 1\n")).unwrap();
    let mut cfg2 = ptr::null_mut();
    assert_eq!(unsafe { lrs_config_from_toml(other.as_ptr(), &mut cfg2) }, LrsStatus::Ok);
    let d = CString::new(dir.path().to_str().unwrap()).unwrap();
    assert_eq!(unsafe { lrs_config_set_out_dir(cfg2, d.as_ptr()) }, LrsStatus::Ok);
    let mut stale = ptr::null_mut();
    assert_eq!(unsafe { lrs_cache_load(cfg2, &mut stale) }, LrsStatus::Cache);
    assert!(stale.is_null());
    assert!(last_error().contains("fingerprint"));
    unsafe {
        lrs_config_free(cfg);
        lrs_config_free(cfg2);
    }
}

#[test]
fn spectrum_and_homog_through_buffers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let mut buf = vec![0.0; 16];
    let mut len = 0usize;
    assert_eq!(
        unsafe { lrs_spectrum(cfg, LrsMap::Ss, 1, buf.as_mut_ptr(), buf.len(), &mut len) },
        LrsStatus::Ok
    );
    assert_eq!(len, 16);
    assert!(buf.windows(2).all(|w| w[0] >= w[1]));
    assert_eq!(
        unsafe { lrs_spectrum(cfg, LrsMap::P, 3, buf.as_mut_ptr(), buf.len(), &mut len) },
        LrsStatus::Config
    );
    unsafe { lrs_config_free(cfg) };

    let toml = CString::new("n_cells = 360\nn_v = 16\nm_count = 2\nrank = 2\noversample = 4\nranks = [2]\n").unwrap();
    let mut cfg = ptr::null_mut();
    assert_eq!(unsafe { lrs_config_from_toml(toml.as_ptr(), &mut cfg) }, LrsStatus::Ok);
    let d = CString::new(dir.path().to_str().unwrap()).unwrap();
    assert_eq!(unsafe { lrs_config_set_out_dir(cfg, d.as_ptr()) }, LrsStatus::Ok);
    let mut errs = [0.0; 3];
    assert_eq!(unsafe { lrs_homog_check(cfg, errs.as_mut_ptr(), 3, &mut len) }, LrsStatus::Ok);
    assert_eq!(len, 3);
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
    unsafe { lrs_config_free(cfg) };
}

#[test]
fn null_handles_are_rejected() {
    let mut len = 0usize;
    assert_eq!(unsafe { lrs_offline(ptr::null()) }, LrsStatus::NullArgument);
    assert_eq!(
        unsafe { lrs_field_copy(ptr::null(), ptr::null_mut(), 0, &mut len) },
        LrsStatus::NullArgument
    );
    assert_eq!(unsafe { lrs_config_default(ptr::null_mut()) }, LrsStatus::NullArgument);
    unsafe {
        lrs_field_free(ptr::null_mut());
        lrs_cache_free(ptr::null_mut());
    }
}

#[test]
fn header_is_valid_c() {
    let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("include/lowrank_schwarz.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for sym in ["lrs_config_from_toml", "lrs_run", "lrs_last_error_message", "LRS_STATUS_CACHE", "typedef struct LrsConfig LrsConfig"] {
        assert!(text.contains(sym), "{sym} missing from header");
    }
    let Ok(out) = std::process::Command::new("cc")
        .args(["-std=c99", "-fsyntax-only", "-x", "c"])
        .arg(&header)
        .output()
    else {
        eprintln!("no C compiler found; syntax check skipped");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
