use super::*;
use crate::disc::{boundary_inner, interior_inner};
use crate::linalg::jacobi_singular_values;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn paper_problem(n_cells: usize) -> Problem {
    Problem::oscillatory(n_cells, 40, 1.0 / 81.0, 1.0 / 81.0, 10, 0.5).unwrap()
}

fn random_inflow(m: usize, n_v: usize, rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> BoundaryTrace {
    let half = n_v / 2;
    BoundaryTrace::inflow(
        m,
        (0..half).map(|_| rng.gen_range(lo..hi)).collect(),
        (0..half).map(|_| rng.gen_range(lo..hi)).collect(),
    )
}

fn rel(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm2(&d) / norm2(b).max(f64::MIN_POSITIVE)
}

#[test]
fn subdomain_four_dimension() {
    let p = paper_problem(360);
    let sys = assemble_local(&p, 4, SolverSettings::default()).unwrap();
    assert_eq!(sys.range(), NodeRange::new(90, 162));
    assert_eq!(sys.dim(), 73 * 40);
    assert_eq!(sys.dim(), 2920);
}

#[test]
fn constant_inflow_gives_constant_solution() {
    let p = paper_problem(360);
    for m in [1, 4, 10] {
        let sys = assemble_local(&p, m, SolverSettings::default()).unwrap();
        let (u, report) = sys.solve_local(&BoundaryTrace::inflow_constant(m, 40, 2.5)).unwrap();
        assert!(report.residual < 1e-12);
        for x in u.data() {
            assert!((x - 2.5).abs() < 1e-11, "{x}");
        }
    }
}

#[test]
fn maximum_principle() {
    let p = paper_problem(360);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let sys = assemble_local(&p, 6, SolverSettings::default()).unwrap();
    for _ in 0..5 {
        let phi = random_inflow(6, 40, &mut rng, 0.5, 3.0);
        let (lo, hi) = phi
            .all_values()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
        let (u, _) = sys.solve_local(&phi).unwrap();
        let (umin, umax) = u.min_max();
        assert!(umin >= lo - 1e-12 && umax <= hi + 1e-12);
    }
}

#[test]
fn zero_inflow_gives_zero() {
    let p = paper_problem(360);
    let sys = assemble_local(&p, 3, SolverSettings::default()).unwrap();
    let (u, _) = sys.solve_local(&BoundaryTrace::inflow_zeros(3, 40)).unwrap();
    assert!(u.data().iter().all(|x| *x == 0.0));
}

#[test]
fn block_solver_matches_dense_lu() {
    let p = Problem::oscillatory(90, 16, 1.0 / 81.0, 1.0 / 81.0, 5, 0.5).unwrap();
    let sys = assemble_local(&p, 3, SolverSettings::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let phi = random_inflow(3, 16, &mut rng, -1.0, 1.0);
    let (u, _) = sys.solve_local(&phi).unwrap();
    let dense = sys.matrix().to_dense();
    let b = sys.inflow_rhs(&phi);
    let x = dense.lu().solve(&nalgebra::DVector::from_vec(b)).unwrap();
    assert!(rel(u.data(), x.as_slice()) < 1e-10);
}

#[test]
fn gmres_backend_matches_direct() {
    let p = paper_problem(360);
    let direct = assemble_local(&p, 5, SolverSettings::default()).unwrap();
    let iter = assemble_local(
        &p,
        5,
        SolverSettings {
            kind: SolverKind::Gmres,
            tolerance: 1e-12,
            ..Default::default()
        },
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let phi = random_inflow(5, 40, &mut rng, -1.0, 1.0);
    let (a, _) = direct.solve_local(&phi).unwrap();
    let (b, report) = iter.solve_local(&phi).unwrap();
    assert!(report.residual <= 1e-12);
    assert!(rel(b.data(), a.data()) < 1e-8);
    let g = PhaseSpaceField::from_fn(direct.core(), 40, |j, i| ((j * 7 + i) % 5) as f64 - 2.0);
    let ha = direct.apply_s_s_adjoint(&g).unwrap();
    let hb = iter.apply_s_s_adjoint(&g).unwrap();
    assert!(rel(&hb.to_vec(), &ha.to_vec()) < 1e-8);
}

#[test]
fn gmres_reports_nonconvergence() {
    let p = paper_problem(360);
    let sys = assemble_local(
        &p,
        5,
        SolverSettings {
            kind: SolverKind::Gmres,
            tolerance: 1e-14,
            max_matvecs: Some(2),
            restart: 2,
        },
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let err = sys.solve_local(&random_inflow(5, 40, &mut rng, -1.0, 1.0)).unwrap_err();
    match err {
        Error::NonConvergence { subdomain, .. } => assert_eq!(subdomain, Some(5)),
        other => panic!("{other}"),
    }
}

#[test]
fn linearity() {
    let p = paper_problem(360);
    let sys = assemble_local(&p, 2, SolverSettings::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let a = random_inflow(2, 40, &mut rng, -1.0, 1.0);
    let b = random_inflow(2, 40, &mut rng, -1.0, 1.0);
    let comb: Vec<f64> = a.to_vec().iter().zip(b.to_vec()).map(|(x, y)| 2.0 * x - 3.0 * y).collect();
    let c = a.with_values(&comb).unwrap();
    let ua = sys.solve_restricted(&a).unwrap();
    let ub = sys.solve_restricted(&b).unwrap();
    let uc = sys.solve_restricted(&c).unwrap();
    let expect: Vec<f64> = ua.data().iter().zip(ub.data()).map(|(x, y)| 2.0 * x - 3.0 * y).collect();
    assert!(rel(uc.data(), &expect) < 1e-12);
}

#[test]
fn wrong_owner_rejected() {
    let p = paper_problem(360);
    let sys = assemble_local(&p, 2, SolverSettings::default()).unwrap();
    assert!(sys.solve_local(&BoundaryTrace::inflow_zeros(3, 40)).is_err());
    assert!(sys.solve_local(&BoundaryTrace::inflow_zeros(2, 20)).is_err());
}

#[test]
fn restricted_adjoint_identity() {
    let p = paper_problem(360);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for m in [1, 4, 10] {
        let sys = assemble_local(&p, m, SolverSettings::default()).unwrap();
        for _ in 0..3 {
            let phi = random_inflow(m, 40, &mut rng, -1.0, 1.0);
            let g = PhaseSpaceField::from_fn(sys.core(), 40, |_, _| rng.gen_range(-1.0..1.0));
            let lhs = interior_inner(&sys.solve_restricted(&phi).unwrap(), &g, &p.grid, &p.quad).unwrap();
            let rhs = boundary_inner(&phi, &sys.apply_s_s_adjoint(&g).unwrap(), &p.quad).unwrap();
            assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(rhs.abs()), "{lhs} {rhs}");
        }
    }
}

#[test]
fn boundary_map_adjoint_identity() {
    let p = paper_problem(360);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for m in [1, 5, 10] {
        let sys = assemble_local(&p, m, SolverSettings::default()).unwrap();
        let phi = random_inflow(m, 40, &mut rng, -1.0, 1.0);
        let p_phi = sys.apply_p(&phi).unwrap();
        let psi = p_phi.with_values(&(0..p_phi.len()).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>()).unwrap();
        let lhs = boundary_inner(&p_phi, &psi, &p.quad).unwrap();
        let rhs = boundary_inner(&phi, &sys.apply_p_adjoint(&psi).unwrap(), &p.quad).unwrap();
        assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(rhs.abs()));
    }
}

fn discrete_vs_continuous_p_star(n_cells: usize) -> f64 {
    let p = paper_problem(n_cells);
    let sys = assemble_local(&p, 4, SolverSettings::default()).unwrap();
    let psi = BoundaryTrace::outflow(
        4,
        p.quad.negative().map(|i| 1.0 + p.quad.nodes()[i].powi(2)).collect(),
        p.quad.positive().map(|i| (3.0 * p.quad.nodes()[i]).cos()).collect(),
    );
    let a = sys.apply_p_adjoint(&psi).unwrap().to_vec();
    let b = sys.apply_p_star_oracle(&psi).unwrap().to_vec();
    rel(&a, &b)
}

#[test]
fn continuous_p_star_converges_to_discrete() {
    let coarse = discrete_vs_continuous_p_star(360);
    let fine = discrete_vs_continuous_p_star(720);
    assert!(coarse < 0.2, "{coarse}");
    assert!(fine < 0.65 * coarse, "{coarse} -> {fine}");
}

#[test]
fn continuous_s_star_converges_to_discrete() {
    let diff = |n: usize| {
        let p = paper_problem(n);
        let sys = assemble_local(&p, 7, SolverSettings::default()).unwrap();
        let g = PhaseSpaceField::from_fn(sys.core(), 40, |j, i| {
            (p.grid.x(j) * 5.0).sin() + p.quad.nodes()[i]
        });
        let a = sys.apply_s_s_adjoint(&g).unwrap().to_vec();
        let b = sys.apply_s_s_adjoint_continuous(&g).unwrap().to_vec();
        rel(&a, &b)
    };
    let coarse = diff(360);
    let fine = diff(720);
    assert!(coarse < 0.2, "{coarse}");
    assert!(fine < 0.65 * coarse, "{coarse} -> {fine}");
}

#[test]
fn p_star_oracle_with_narrow_overlap() {
    // Separate exchange points: three pieces with one jump at each cut.
    let diff = |n: usize| {
        let p = Problem::oscillatory(n, 16, 0.1, 0.1, 10, 0.25).unwrap();
        let sys = assemble_local(&p, 5, SolverSettings::default()).unwrap();
        let (l, r) = sys.exchange_nodes();
        assert!(l.unwrap() < r.unwrap());
        let psi = BoundaryTrace::outflow(5, vec![1.0; 8], vec![-0.5; 8]);
        let a = sys.apply_p_adjoint(&psi).unwrap().to_vec();
        let b = sys.apply_p_star_oracle(&psi).unwrap().to_vec();
        rel(&a, &b)
    };
    let coarse = diff(800);
    let fine = diff(1600);
    assert!(fine < 0.25, "{fine}");
    assert!(fine < 0.65 * coarse, "{coarse} -> {fine}");
}

#[test]
fn global_solution_restricts_to_local_solutions() {
    let p = paper_problem(360);
    let inflow = PhysicalInflow::benchmark(&p.quad);
    let u = solve_global(&p, &inflow).unwrap();
    for m in [1, 4, 10] {
        let sys = assemble_local(&p, m, SolverSettings::default()).unwrap();
        let r = sys.range();
        let phi = BoundaryTrace::inflow(
            m,
            p.quad.positive().map(|i| u.at(r.first, i)).collect(),
            p.quad.negative().map(|i| u.at(r.last, i)).collect(),
        );
        let (local, _) = sys.solve_local(&phi).unwrap();
        let glob = u.restrict(r).unwrap();
        assert!(rel(local.data(), glob.data()) < 1e-12);
    }
}

#[test]
fn global_flux_deviation_is_first_order() {
    let dev = |n: usize| {
        let p = paper_problem(n);
        let u = solve_global(&p, &PhysicalInflow::benchmark(&p.quad)).unwrap();
        flux_deviation(&u, &p.quad)
    };
    let coarse = dev(360);
    let fine = dev(720);
    assert!(coarse < 0.05, "{coarse}");
    assert!(coarse / fine >= 1.6, "{coarse} -> {fine}");
}

#[test]
fn staggered_flux_is_exactly_conserved() {
    // Upwind fluxes between nodes j and j+1 satisfy a discrete conservation law.
    let p = paper_problem(360);
    let u = solve_global(&p, &PhysicalInflow::benchmark(&p.quad)).unwrap();
    let n = p.grid.n_cells();
    let q = &p.quad;
    let stag: Vec<f64> = (0..n)
        .map(|j| {
            q.positive().map(|i| q.weights()[i] * q.nodes()[i] * u.at(j, i)).sum::<f64>()
                + q.negative().map(|i| q.weights()[i] * q.nodes()[i] * u.at(j + 1, i)).sum::<f64>()
        })
        .collect();
    for s in &stag {
        assert!((s - stag[0]).abs() < 1e-10 * stag[0].abs());
    }
}

#[test]
fn boundary_map_decays_faster_than_restricted_map() {
    let p = paper_problem(360);
    let sys = assemble_local(&p, 4, SolverSettings::default()).unwrap();
    let s = jacobi_singular_values(&sys.probe_weighted_matrix(MapKind::Restricted).unwrap());
    let pm = jacobi_singular_values(&sys.probe_weighted_matrix(MapKind::BoundaryToBoundary).unwrap());
    let k = 6;
    assert!(pm[k] / pm[0] < s[k] / s[0]);
}

#[test]
fn matrix_is_weakly_dominant() {
    let p = paper_problem(360);
    let sys = assemble_local(&p, 4, SolverSettings::default()).unwrap();
    assert!(sys.min_dominance_margin() >= -1e-12);
}

#[test]
fn sweep_inverts_ordinate_diagonal_part() {
    let p = Problem::oscillatory(20, 4, 0.5, 0.5, 2, 0.5).unwrap();
    let sys = assemble_local(&p, 1, SolverSettings::default()).unwrap();
    let a = sys.matrix();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let r: Vec<f64> = (0..sys.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let x = transport_sweep(a, &r);
    let nb = a.n_blocks();
    let b = a.block_size();
    for k in 0..nb {
        for i in 0..b {
            let mut s = a.diag(k)[(i, i)] * x[k * b + i];
            if k > 0 {
                s += a.lower(k)[(i, i)] * x[(k - 1) * b + i];
            }
            if k + 1 < nb {
                s += a.upper(k)[(i, i)] * x[(k + 1) * b + i];
            }
            assert!((s - r[k * b + i]).abs() < 1e-12);
        }
    }
}
