use super::*;
use crate::error::{CacheError, Error};
use crate::problem::PhysicalInflow;
use crate::schwarz::SchwarzContext;
use crate::transport::solve_global;

fn small(dir: &std::path::Path) -> ExperimentConfig {
    ExperimentConfig {
        n_cells: 40,
        n_v: 16,
        m_count: 2,
        rank: 3,
        oversample: 4,
        ranks: vec![2, 3],
        max_iters: 20,
        max_iters_ref: 2000,
        out_dir: dir.to_path_buf(),
        ..ExperimentConfig::default()
    }
}

#[test]
fn fractions_parse() {
    assert_eq!(parse_fraction("1/81"), Some(1.0 / 81.0));
    assert_eq!(parse_fraction(" 0.5 "), Some(0.5));
    assert_eq!(parse_fraction("1e-3"), Some(1e-3));
    assert_eq!(parse_fraction("1/0"), None);
    assert_eq!(parse_fraction("a/b"), None);
}

#[test]
fn empty_config_gives_defaults() {
    let cfg = ExperimentConfig::from_toml_str("").unwrap();
    assert_eq!(cfg, ExperimentConfig::default());
    assert_eq!(cfg.n_cells, 360);
    assert_eq!(cfg.seed, 1);
    assert_eq!(cfg.epsilon, 1.0 / 81.0);
}

#[test]
fn config_accepts_fractions_and_integers() {
    let cfg = ExperimentConfig::from_toml_str(
        "epsilon = 1\ndelta = \"1/9\"\nbeta = 0.5\nseed = 7\nranks = [2, 4]\ndeltas = [\"1/9\", 0.5]\ninflow = \"constant:3\"\nsolver = \"gmres\"\n",
    )
    .unwrap();
    assert_eq!(cfg.epsilon, 1.0);
    assert_eq!(cfg.delta, 1.0 / 9.0);
    assert_eq!(cfg.seed, 7);
    assert_eq!(cfg.ranks, vec![2, 4]);
    assert_eq!(cfg.deltas, vec![1.0 / 9.0, 0.5]);
    assert_eq!(cfg.inflow, InflowSelector::Constant(3.0));
    assert_eq!(cfg.solver.kind, crate::transport::SolverKind::Gmres);
}

#[test]
fn config_errors_are_config_errors() {
    let cases = [
        "epsilon = 1\nbogus = 2\n",
        "epsilon = -1\n",
        "delta = \"1/x\"\n",
        "n_cells = 361\n",
        "media = \"table\"\n",
        "media = \"table\"\nsigma_table = [1.0, 2.0]\n",
        "sigma_table = [1.0]\n",
        "oversample = 2\n",
        "rank = 40\n",
        "inflow = \"sunshine\"\n",
        "solver = \"cg\"\n",
        "ranks = []\n",
        "max_iters = 0\n",
        "media = \"wood\"\n",
    ];
    for text in cases {
        match ExperimentConfig::from_toml_str(text) {
            Err(e @ Error::Config(_)) => assert_eq!(e.exit_code(), 2),
            other => panic!("{text:?} gave {other:?}"),
        }
    }
}

#[test]
fn table_media_loads() {
    let table: Vec<String> = (0..=40).map(|_| "2.0".to_string()).collect();
    let text = format!("n_cells = 40\nn_v = 16\nm_count = 2\nrank = 2\noversample = 4\nranks = [2]\nmedia = \"table\"\nsigma_table = [{}]\n", table.join(", "));
    let cfg = ExperimentConfig::from_toml_str(&text).unwrap();
    let p = cfg.problem().unwrap();
    assert!(p.media.sigma_nodes().iter().all(|&s| s == 2.0));
}

#[test]
fn csv_layout() {
    let mut t = CsvTable::new(&["iteration", "value", "name"]);
    t.push(vec![1usize.into(), 0.25.into(), "a".into()]);
    t.push(vec![2usize.into(), 1e-12.into(), "b".into()]);
    let text = String::from_utf8(t.to_bytes()).unwrap();
    assert_eq!(text, "iteration,value,name\n1,2.5e-1,a\n2,1e-12,b\n");
    assert!(!text.contains('\r'));
    let back: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(back, vec![0.25, 1e-12]);
}

#[test]
fn atomic_write_replaces() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("nested/x.csv");
    write_atomic(&p, b"one\n").unwrap();
    write_atomic(&p, b"two\n").unwrap();
    assert_eq!(std::fs::read(&p).unwrap(), b"two\n");
    let names: Vec<_> = std::fs::read_dir(p.parent().unwrap()).unwrap().collect();
    assert_eq!(names.len(), 1);
}

fn small_cache(cfg: &ExperimentConfig) -> MapCache {
    let ctx = SchwarzContext::new(cfg.problem().unwrap(), cfg.solver).unwrap();
    let (maps, _) = build_maps(&ctx, cfg, cfg.rank).unwrap();
    MapCache::new(ctx.problem().fingerprint(), cfg.rsvd(cfg.rank), maps).unwrap()
}

fn bits(xs: &[f64]) -> Vec<u64> {
    xs.iter().map(|x| x.to_bits()).collect()
}

#[test]
fn cache_round_trip_is_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path());
    let cache = small_cache(&cfg);
    let path = dir.path().join("maps.lrsm");
    save_cache(&path, &cache).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    assert_eq!(&bytes[..5], MAP_MAGIC);
    let back = load_cache(&path, Some(&cache.fingerprint)).unwrap();
    assert_eq!(back, cache);
    for (a, b) in back.maps.iter().zip(&cache.maps) {
        assert_eq!(bits(&a.sigma), bits(&b.sigma));
        for (x, y) in a.left.iter().zip(&b.left) {
            assert_eq!(bits(x), bits(y));
        }
        for (x, y) in a.right.iter().zip(&b.right) {
            assert_eq!(bits(x), bits(y));
        }
    }
    assert_eq!(back.to_bytes(), bytes);
    assert!(back.get(1, &cache.fingerprint).is_some());
    assert!(back.get(0, &cache.fingerprint).is_none());
    assert!(back.get(3, &cache.fingerprint).is_none());
}

#[test]
fn cache_load_errors_are_typed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path());
    let cache = small_cache(&cfg);
    let bytes = cache.to_bytes();

    let truncated = &bytes[..bytes.len() - 13];
    assert!(matches!(MapCache::from_bytes(truncated, None), Err(CacheError::Corrupt(_))));

    let mut trailing = bytes.clone();
    trailing.push(0);
    assert!(matches!(MapCache::from_bytes(&trailing, None), Err(CacheError::Corrupt(_))));

    let mut magic = bytes.clone();
    magic[0] = b'X';
    assert!(matches!(MapCache::from_bytes(&magic, None), Err(CacheError::BadMagic { .. })));
    assert!(matches!(MapCache::from_bytes(b"", None), Err(CacheError::BadMagic { .. })));

    let mut version = bytes.clone();
    version[5..9].copy_from_slice(&7u32.to_le_bytes());
    assert!(matches!(MapCache::from_bytes(&version, None), Err(CacheError::UnsupportedVersion(7))));

    let finer = ExperimentConfig {
        n_cells: 80,
        ..cfg.clone()
    };
    let fp = finer.problem().unwrap().fingerprint();
    let err = MapCache::from_bytes(&bytes, Some(&fp)).unwrap_err();
    assert!(matches!(err, CacheError::FingerprintMismatch { .. }));
    assert_eq!(Error::from(err).exit_code(), 4);

    let missing = load_cache(&dir.path().join("nope.lrsm"), None).unwrap_err();
    assert!(matches!(missing, CacheError::Io { .. }));
}

#[test]
fn field_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path());
    let p = cfg.problem().unwrap();
    let u = solve_global(&p, &PhysicalInflow::benchmark(&p.quad)).unwrap();
    let stored = StoredField {
        fingerprint: p.fingerprint(),
        key: [3; 32],
        field: u,
    };
    let path = dir.path().join("f.lrsf");
    save_field(&path, &stored).unwrap();
    let back = load_field(&path, Some(&p.fingerprint())).unwrap();
    assert_eq!(bits(back.field.data()), bits(stored.field.data()));
    assert_eq!(back, stored);
    let bytes = std::fs::read(&path).unwrap();
    assert_eq!(&bytes[..5], FIELD_MAGIC);
    assert!(matches!(
        StoredField::from_bytes(&bytes[..bytes.len() - 1], None),
        Err(CacheError::Corrupt(_))
    ));
    assert!(matches!(MapCache::from_bytes(&bytes, None), Err(CacheError::BadMagic { .. })));
}

#[test]
fn offline_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    cmd_offline(&small(a.path())).unwrap();
    cmd_offline(&small(b.path())).unwrap();
    for f in [MAP_CACHE_FILE, "offline_spectra.csv"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let other = ExperimentConfig {
        seed: 2,
        ..small(a.path())
    };
    let c = small_cache(&other);
    assert_ne!(c.to_bytes(), std::fs::read(a.path().join(MAP_CACHE_FILE)).unwrap());
}

#[test]
fn offline_spectra_match_dense_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path());
    let report = cmd_offline(&cfg).unwrap();
    for map in &report.cache.maps {
        let dense = dense_spectrum(&cfg, SpectrumMap::Restricted, map.subdomain).unwrap();
        for (i, s) in map.sigma.iter().enumerate() {
            // sigma_i of the sketch never exceeds the true sigma_i, and stays
            // within the tail of the spectrum below it.
            let tail: f64 = dense[i + 1..].iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!(*s <= dense[i] * (1.0 + 1e-10), "i = {i}");
            assert!(dense[i] - s <= 10.0 * tail + 1e-12, "i = {i}: {s} vs {}", dense[i]);
        }
    }
    let (header, rows) = read_csv(&dir.path().join("offline_spectra.csv")).unwrap();
    assert_eq!(header, ["subdomain", "index", "sigma", "sigma_rel"]);
    assert_eq!(rows.len(), cfg.m_count * cfg.rank);
}

#[test]
fn rank_one_cache_on_constants() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        rank: 1,
        ..small(dir.path())
    };
    let cache = small_cache(&cfg);
    let fp = cache.fingerprint;
    for map in &cache.maps {
        let ones = crate::disc::BoundaryTrace::inflow_constant(map.subdomain, cfg.n_v, 1.0);
        let u = crate::rsvd::apply_lowrank(map, &fp, &ones).unwrap();
        // S^s maps constants to the same constant; the rank-one image is
        // sigma_1 <nu_1, 1> mu_1, so the error is the part of 1 on D^s
        // orthogonal to mu_1 plus the misfit along it.
        let w = &map.interior_weights;
        let ip = |a: &[f64], b: &[f64]| a.iter().zip(b).zip(w).map(|((x, y), w)| x * y * w).sum::<f64>();
        let one = vec![1.0; w.len()];
        let c = ip(&map.left[0], &one);
        let k = map.sigma[0] * map.project(&ones.to_vec())[0];
        let predicted = ((ip(&one, &one) - 2.0 * k * c + k * k).max(0.0)).sqrt() / ip(&one, &one).sqrt();
        let diff: Vec<f64> = u.data().iter().map(|x| x - 1.0).collect();
        let actual = ip(&diff, &diff).sqrt() / ip(&one, &one).sqrt();
        assert!((actual - predicted).abs() < 1e-10, "{actual} vs {predicted}");
        assert!(actual < 1.0);
    }
}

#[test]
fn single_subdomain_reference_equals_direct() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        m_count: 1,
        ..small(dir.path())
    };
    let r = cmd_reference(&cfg).unwrap();
    assert_eq!(r.iterations, 1);
    assert!(r.rel_diff_direct < 1e-8, "{}", r.rel_diff_direct);
    let run = cmd_run(&cfg, BackendChoice::Full).unwrap();
    assert_eq!(run.online.run.state.t, 1);
    assert!(run.online.run.state.converged);
}

#[test]
fn zero_data_reference_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        inflow: InflowSelector::Constant(0.0),
        ..small(dir.path())
    };
    let r = cmd_reference(&cfg).unwrap();
    assert!(r.field.data().iter().all(|&x| x == 0.0));
    assert_eq!(r.iterations, 1);
}

#[test]
fn reference_is_cached_and_reused() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path());
    let first = ensure_reference(&cfg).unwrap();
    let p = cfg.problem().unwrap();
    let path = reference_path(&cfg, &reference_key(&cfg, &p, &cfg.inflow_data(&p.quad)));
    let stamp = std::fs::metadata(&path).unwrap().modified().unwrap();
    let second = ensure_reference(&cfg).unwrap();
    assert_eq!(bits(first.data()), bits(second.data()));
    assert_eq!(std::fs::metadata(&path).unwrap().modified().unwrap(), stamp);
    let (_, rows) = read_csv(&dir.path().join("reference_summary.csv")).unwrap();
    assert_eq!(rows.len(), 2);
}

#[test]
fn reference_nonconvergence_reports_history() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        max_iters_ref: 3,
        ..small(dir.path())
    };
    let e = cmd_reference(&cfg).unwrap_err();
    assert!(matches!(e, Error::NonConvergence { iterations: 3, .. }), "{e}");
    assert_eq!(e.exit_code(), 3);
    let (_, rows) = read_csv(&dir.path().join("reference_history.csv")).unwrap();
    assert_eq!(rows.len(), 3);
}

#[test]
fn run_csv_rows_match_iterations() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path());
    let r = cmd_run(&cfg, BackendChoice::Full).unwrap();
    let (header, rows) = read_csv(&r.history_path).unwrap();
    assert_eq!(header, ["iteration", "trace_error", "rel_error"]);
    assert_eq!(rows.len(), r.online.run.state.t);
    assert!(rows.len() <= cfg.max_iters);
    let (_, timing) = read_csv(&dir.path().join("run_full_timing.csv")).unwrap();
    assert_eq!(timing.len(), rows.len());
    assert!(dir.path().join("plots.txt").exists());
}

#[test]
fn lowrank_run_needs_valid_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path());
    let e = cmd_run(&cfg, BackendChoice::LowRank).unwrap_err();
    assert_eq!(e.exit_code(), 4);
    cmd_offline(&cfg).unwrap();
    cmd_run(&cfg, BackendChoice::LowRank).unwrap();
    let stale = ExperimentConfig {
        epsilon: 1.0,
        ..cfg.clone()
    };
    let e = cmd_run(&stale, BackendChoice::LowRank).unwrap_err();
    assert!(matches!(e, Error::Cache(CacheError::FingerprintMismatch { .. })), "{e}");
    assert_eq!(e.exit_code(), 4);
    let higher = ExperimentConfig {
        rank: 5,
        ..cfg.clone()
    };
    assert_eq!(cmd_run(&higher, BackendChoice::LowRank).unwrap_err().exit_code(), 4);
}

#[test]
fn spectrum_cap_refuses() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        n_cells: 2000,
        m_count: 2,
        ..small(dir.path())
    };
    let e = cmd_spectrum(&cfg, SpectrumMap::Full, 1).unwrap_err();
    assert!(matches!(e, Error::Config(_)), "{e}");
    let e = cmd_spectrum(&small(dir.path()), SpectrumMap::Restricted, 3).unwrap_err();
    assert!(matches!(e, Error::Config(_)));
}

#[test]
fn spectrum_is_sorted_and_normalized() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path());
    for map in [SpectrumMap::Full, SpectrumMap::Restricted, SpectrumMap::Boundary] {
        let r = cmd_spectrum(&cfg, map, 1).unwrap();
        // P_1 of two subdomains only feeds one neighbor.
        let expected = if map == SpectrumMap::Boundary { cfg.n_v / 2 } else { cfg.n_v };
        assert_eq!(r.sigma.len(), expected);
        assert!(r.sigma.windows(2).all(|w| w[0] >= w[1]));
        let (_, rows) = read_csv(&r.path).unwrap();
        assert_eq!(rows.len(), expected);
        assert_eq!(rows[0][2], "1e0");
    }
}

#[test]
fn homogenized_media_has_no_discrepancy() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        media: MediaSelector::Homogenized,
        n_cells: 360,
        ..small(dir.path())
    };
    let r = cmd_homog_check(&cfg).unwrap();
    assert_eq!(r.rows.len(), 3);
    assert!(r.rows.iter().all(|&(_, e)| e == 0.0));
    let coarse = ExperimentConfig {
        deltas: vec![1.0 / 81.0],
        n_cells: 40,
        ..cfg
    };
    assert!(matches!(cmd_homog_check(&coarse), Err(Error::Config(_))));
}

#[test]
fn rank_sweep_small_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ra = cmd_rank_sweep(&small(a.path())).unwrap();
    cmd_rank_sweep(&small(b.path())).unwrap();
    assert_eq!(ra.rows.len(), 2);
    let f = "rank_sweep.csv";
    assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap());
    let (header, rows) = read_csv(&a.path().join("table1.csv")).unwrap();
    assert_eq!(header[0], "method");
    assert_eq!(rows.len(), 2 + 2);
}
