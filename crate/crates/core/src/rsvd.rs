//! Randomized low-rank factorization over diagonally weighted inner products.
//!
//! Every operator here maps between coefficient spaces equipped with diagonal
//! inner products <x, y> = sum_j w_j x_j y_j. Work is done in rescaled
//! coordinates x_hat = sqrt(w) x, where the weighted products become Euclidean;
//! factors are mapped back before they are returned.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::disc::{BoundaryTrace, NodeRange, PhaseSpaceField};
use crate::error::{Error, Result};
use crate::linalg::{dot, norm2};
use crate::problem::{Fingerprint, Problem};
use crate::transport::{LocalSystem, MapKind};

/// Directions whose re-orthogonalized norm falls below this fraction of the
/// largest sample norm are dropped.
pub const DROP_TOLERANCE: f64 = 1e-12;

/// Tolerance of the adjoint-consistency check run before each build.
pub const ADJOINT_CHECK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RsvdConfig {
    pub rank: usize,
    pub oversample: usize,
    pub seed: u64,
}

impl RsvdConfig {
    pub fn new(rank: usize, oversample: usize, seed: u64) -> Self {
        Self {
            rank,
            oversample,
            seed,
        }
    }

    pub fn sketch_size(&self) -> usize {
        self.rank + self.oversample
    }

    pub fn validate(&self, domain_dim: usize) -> Result<()> {
        if self.rank < 1 {
            return Err(Error::Config("rank must be at least 1".into()));
        }
        if self.oversample < 4 {
            return Err(Error::Config(format!(
                "oversampling must be at least 4, got {}",
                self.oversample
            )));
        }
        if self.sketch_size() > domain_dim {
            return Err(Error::Config(format!(
                "rank + oversampling = {} exceeds the domain dimension {domain_dim}",
                self.sketch_size()
            )));
        }
        Ok(())
    }
}

/// A linear map between diagonally weighted coefficient spaces together with
/// its adjoint under those weights.
pub trait WeightedOperator: Sync {
    fn domain_weights(&self) -> &[f64];
    fn codomain_weights(&self) -> &[f64];
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>>;
    fn apply_adjoint(&self, y: &[f64]) -> Result<Vec<f64>>;

    fn domain_dim(&self) -> usize {
        self.domain_weights().len()
    }

    fn codomain_dim(&self) -> usize {
        self.codomain_weights().len()
    }
}

/// Dense matrix with Euclidean products on both sides.
#[derive(Debug, Clone)]
pub struct DenseOperator {
    a: DMatrix<f64>,
    dw: Vec<f64>,
    cw: Vec<f64>,
}

impl DenseOperator {
    pub fn new(a: DMatrix<f64>) -> Self {
        let dw = vec![1.0; a.ncols()];
        let cw = vec![1.0; a.nrows()];
        Self { a, dw, cw }
    }

    /// Matrix acting between weighted spaces; `apply_adjoint` is the weighted
    /// transpose W_d^{-1} A^T W_c.
    pub fn weighted(a: DMatrix<f64>, domain_weights: Vec<f64>, codomain_weights: Vec<f64>) -> Result<Self> {
        if domain_weights.len() != a.ncols() || codomain_weights.len() != a.nrows() {
            return Err(Error::invalid("weight lengths do not match the matrix shape"));
        }
        if domain_weights.iter().chain(&codomain_weights).any(|w| !(*w > 0.0)) {
            return Err(Error::invalid("weights must be positive"));
        }
        Ok(Self {
            a,
            dw: domain_weights,
            cw: codomain_weights,
        })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }
}

impl WeightedOperator for DenseOperator {
    fn domain_weights(&self) -> &[f64] {
        &self.dw
    }

    fn codomain_weights(&self) -> &[f64] {
        &self.cw
    }

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.a.ncols() {
            return Err(Error::invalid("input length does not match the operator"));
        }
        let v = &self.a * nalgebra::DVector::from_column_slice(x);
        Ok(v.as_slice().to_vec())
    }

    fn apply_adjoint(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.a.nrows() {
            return Err(Error::invalid("input length does not match the operator"));
        }
        let wy: Vec<f64> = y.iter().zip(&self.cw).map(|(a, b)| a * b).collect();
        let v = self.a.transpose() * nalgebra::DVector::from_vec(wy);
        Ok(v.iter().zip(&self.dw).map(|(a, b)| a / b).collect())
    }
}

/// S_m^s or P_m of one subdomain as a weighted operator on trace coefficients.
pub struct SubdomainOperator<'a> {
    sys: &'a LocalSystem,
    kind: MapKind,
    template: BoundaryTrace,
    dw: Vec<f64>,
    cw: Vec<f64>,
}

impl<'a> SubdomainOperator<'a> {
    pub fn new(sys: &'a LocalSystem, kind: MapKind) -> Result<Self> {
        let cw = match kind {
            MapKind::Restricted => sys.core_weights(),
            MapKind::BoundaryToBoundary => sys.exchange_weights(),
            MapKind::Full => {
                return Err(Error::invalid(
                    "only the restricted and boundary-to-boundary maps carry an adjoint",
                ))
            }
        };
        Ok(Self {
            sys,
            kind,
            template: BoundaryTrace::inflow_zeros(sys.subdomain(), sys.n_v()),
            dw: sys.inflow_weights(),
            cw,
        })
    }

    fn exchange_template(&self) -> Result<BoundaryTrace> {
        let z = PhaseSpaceField::zeros(self.sys.core(), self.sys.n_v());
        self.sys.take_exchange_traces(&z)
    }
}

impl WeightedOperator for SubdomainOperator<'_> {
    fn domain_weights(&self) -> &[f64] {
        &self.dw
    }

    fn codomain_weights(&self) -> &[f64] {
        &self.cw
    }

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let phi = self.template.with_values(x)?;
        match self.kind {
            MapKind::Restricted => Ok(self.sys.solve_restricted(&phi)?.into_vec()),
            _ => Ok(self.sys.apply_p(&phi)?.to_vec()),
        }
    }

    fn apply_adjoint(&self, y: &[f64]) -> Result<Vec<f64>> {
        match self.kind {
            MapKind::Restricted => {
                let g = PhaseSpaceField::from_vec(self.sys.core(), self.sys.n_v(), y.to_vec())?;
                Ok(self.sys.apply_s_s_adjoint(&g)?.to_vec())
            }
            _ => {
                let psi = self.exchange_template()?.with_values(y)?;
                Ok(self.sys.apply_p_adjoint(&psi)?.to_vec())
            }
        }
    }
}

/// Truncated factorization A ~ sum_i sigma_i left_i <right_i, .>_domain with
/// left factors orthonormal in the codomain product and right factors
/// orthonormal in the domain product.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedFactorization {
    pub sigma: Vec<f64>,
    pub left: Vec<Vec<f64>>,
    pub right: Vec<Vec<f64>>,
    /// Orthonormal range basis from Stage I, in the codomain's own coordinates.
    pub range: Vec<Vec<f64>>,
    /// Singular values above the drop tolerance, before truncation to the target rank.
    pub numerical_rank: usize,
}

impl WeightedFactorization {
    pub fn rank(&self) -> usize {
        self.sigma.len()
    }
}

fn gaussian_columns(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Vec<Vec<f64>> {
    (0..cols)
        .map(|_| (0..rows).map(|_| StandardNormal.sample(rng)).collect())
        .collect()
}

/// Classical Gram-Schmidt run twice per column; columns whose norm after both
/// passes is below `DROP_TOLERANCE` times the largest input norm are dropped.
pub fn orthonormalize(columns: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let scale = columns.iter().map(|c| norm2(c)).fold(0.0, f64::max);
    let mut q: Vec<Vec<f64>> = Vec::new();
    if scale == 0.0 {
        return q;
    }
    for c in columns {
        let mut y = c.clone();
        for _ in 0..2 {
            let coeffs: Vec<f64> = q.iter().map(|qi| dot(qi, &y)).collect();
            for (qi, ci) in q.iter().zip(&coeffs) {
                for (yk, qk) in y.iter_mut().zip(qi) {
                    *yk -= ci * qk;
                }
            }
        }
        let n = norm2(&y);
        if n > DROP_TOLERANCE * scale {
            y.iter_mut().for_each(|v| *v /= n);
            q.push(y);
        }
    }
    q
}

fn scale_by(x: &[f64], w: &[f64], power: f64) -> Vec<f64> {
    x.iter().zip(w).map(|(a, b)| a * b.powf(power)).collect()
}

/// Check <A x, y>_c = <x, A^* y>_d on three random pairs.
pub fn check_adjoint(op: &dyn WeightedOperator, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_ad10);
    let mut worst: f64 = 0.0;
    for _ in 0..3 {
        let x: Vec<f64> = (0..op.domain_dim()).map(|_| StandardNormal.sample(&mut rng)).collect();
        let y: Vec<f64> = (0..op.codomain_dim()).map(|_| StandardNormal.sample(&mut rng)).collect();
        let ax = op.apply(&x)?;
        let aty = op.apply_adjoint(&y)?;
        let cw = op.codomain_weights();
        let dw = op.domain_weights();
        let lhs: f64 = ax.iter().zip(&y).zip(cw).map(|((a, b), w)| a * b * w).sum();
        let rhs: f64 = x.iter().zip(&aty).zip(dw).map(|((a, b), w)| a * b * w).sum();
        let wnorm = |v: &[f64], w: &[f64]| v.iter().zip(w).map(|(a, b)| a * a * b).sum::<f64>().sqrt();
        let scale = wnorm(&ax, cw) * wnorm(&y, cw);
        let err = if scale == 0.0 {
            (lhs - rhs).abs()
        } else {
            (lhs - rhs).abs() / scale
        };
        worst = worst.max(err);
    }
    if worst > ADJOINT_CHECK_TOLERANCE {
        return Err(Error::Config(format!(
            "operator and adjoint are inconsistent: relative discrepancy {worst:.3e}"
        )));
    }
    Ok(worst)
}

/// Range finder followed by the adjoint projection and small SVD.
/// `inputs_hat` are Stage I sample directions in rescaled domain coordinates.
fn factor_from_samples(
    op: &dyn WeightedOperator,
    inputs_hat: Vec<Vec<f64>>,
    rank: usize,
) -> Result<WeightedFactorization> {
    let dw = op.domain_weights();
    let cw = op.codomain_weights();
    let outputs: Vec<Vec<f64>> = inputs_hat
        .par_iter()
        .map(|c| op.apply(&scale_by(c, dw, -0.5)).map(|y| scale_by(&y, cw, 0.5)))
        .collect::<Result<_>>()?;
    let q_hat = orthonormalize(&outputs);
    let b_hat: Vec<Vec<f64>> = q_hat
        .par_iter()
        .map(|q| op.apply_adjoint(&scale_by(q, cw, -0.5)).map(|b| scale_by(&b, dw, 0.5)))
        .collect::<Result<_>>()?;
    let range = q_hat.iter().map(|q| scale_by(q, cw, -0.5)).collect();
    if q_hat.is_empty() {
        return Ok(WeightedFactorization {
            sigma: vec![],
            left: vec![],
            right: vec![],
            range,
            numerical_rank: 0,
        });
    }
    let k = q_hat.len();
    let nd = op.domain_dim();
    // B_hat = A_hat^T Q_hat = N Sigma M~^T, hence A_hat ~ Q_hat M~ Sigma N^T.
    let b = DMatrix::from_fn(nd, k, |r, c| b_hat[c][r]);
    let svd = b.svd(true, true);
    let n_mat = svd.u.expect("requested U");
    let mt = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let s_max = order.first().map(|&i| svd.singular_values[i]).unwrap_or(0.0);
    let numerical_rank = order
        .iter()
        .filter(|&&i| s_max > 0.0 && svd.singular_values[i] > DROP_TOLERANCE * s_max)
        .count();
    let keep = rank.min(numerical_rank);
    let mut sigma = Vec::with_capacity(keep);
    let mut left = Vec::with_capacity(keep);
    let mut right = Vec::with_capacity(keep);
    for &i in order.iter().take(keep) {
        sigma.push(svd.singular_values[i]);
        let mut mu_hat = vec![0.0; op.codomain_dim()];
        for (c, q) in q_hat.iter().enumerate() {
            let coef = mt[(i, c)];
            for (m, qv) in mu_hat.iter_mut().zip(q) {
                *m += coef * qv;
            }
        }
        left.push(scale_by(&mu_hat, cw, -0.5));
        let nu_hat: Vec<f64> = n_mat.column(i).iter().copied().collect();
        right.push(scale_by(&nu_hat, dw, -0.5));
    }
    Ok(WeightedFactorization {
        sigma,
        left,
        right,
        range,
        numerical_rank,
    })
}

/// Randomized rank capture of a weighted operator: Gaussian coefficients
/// against the weighted canonical domain basis, forward applications,
/// orthonormalization, adjoint applications, small SVD, truncation to `cfg.rank`.
pub fn rsvd_operator(op: &dyn WeightedOperator, cfg: &RsvdConfig) -> Result<WeightedFactorization> {
    cfg.validate(op.domain_dim())?;
    check_adjoint(op, cfg.seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let omega = gaussian_columns(&mut rng, op.domain_dim(), cfg.sketch_size());
    factor_from_samples(op, omega, cfg.rank)
}

/// Same pipeline with the identity as sketch: k equals the domain dimension.
pub fn full_basis(op: &dyn WeightedOperator, rank: usize) -> Result<WeightedFactorization> {
    check_adjoint(op, 0)?;
    let n = op.domain_dim();
    let inputs = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();
    factor_from_samples(op, inputs, rank)
}

/// Dense matrix version: A ~ U diag(sigma) V^T with orthonormal columns.
#[derive(Debug, Clone)]
pub struct MatrixRsvd {
    pub u: DMatrix<f64>,
    pub sigma: Vec<f64>,
    pub v: DMatrix<f64>,
    /// Orthonormal basis of the sketched range (m x k).
    pub q: DMatrix<f64>,
}

impl MatrixRsvd {
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let s = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.sigma.clone()));
        &self.u * s * self.v.transpose()
    }
}

pub fn rsvd_matrix(a: &DMatrix<f64>, cfg: &RsvdConfig) -> Result<MatrixRsvd> {
    let (m, n) = a.shape();
    let op = DenseOperator::new(a.clone());
    let f = rsvd_operator(&op, cfg)?;
    let cols = |vs: &[Vec<f64>], rows: usize| DMatrix::from_fn(rows, vs.len(), |r, c| vs[c][r]);
    Ok(MatrixRsvd {
        u: cols(&f.left, m),
        sigma: f.sigma,
        v: cols(&f.right, n),
        q: cols(&f.range, m),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RangeEstimate {
    /// Basis orthonormal in the codomain product.
    pub basis: Vec<Vec<f64>>,
    pub draws: usize,
    pub converged: bool,
}

impl RangeEstimate {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }
}

/// Consecutive small residuals required before the range finder stops.
pub const ADAPTIVE_CONSECUTIVE: usize = 5;

/// Adaptive randomized range finder. Each draw is a unit Gaussian direction in
/// rescaled domain coordinates; its image is projected off the current basis
/// and appended when the remainder exceeds `tol`.
pub fn adaptive_range(op: &dyn WeightedOperator, tol: f64, max_k: usize, seed: u64) -> Result<RangeEstimate> {
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let dw = op.domain_weights();
    let cw = op.codomain_weights();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q: Vec<Vec<f64>> = Vec::new();
    let mut small = 0;
    let mut draws = 0;
    let max_draws = max_k + ADAPTIVE_CONSECUTIVE * (max_k + 1);
    while small < ADAPTIVE_CONSECUTIVE && q.len() < max_k && draws < max_draws {
        let mut w = gaussian_columns(&mut rng, op.domain_dim(), 1).pop().unwrap_or_default();
        let n = norm2(&w);
        if n > 0.0 {
            w.iter_mut().for_each(|x| *x /= n);
        }
        draws += 1;
        let mut y = scale_by(&op.apply(&scale_by(&w, dw, -0.5))?, cw, 0.5);
        for _ in 0..2 {
            for qi in &q {
                let c = dot(qi, &y);
                y.iter_mut().zip(qi).for_each(|(a, b)| *a -= c * b);
            }
        }
        let r = norm2(&y);
        if r < tol {
            small += 1;
        } else {
            small = 0;
            y.iter_mut().for_each(|x| *x /= r);
            q.push(y);
        }
    }
    Ok(RangeEstimate {
        basis: q.iter().map(|v| scale_by(v, cw, -0.5)).collect(),
        draws,
        converged: small >= ADAPTIVE_CONSECUTIVE,
    })
}

/// Compressed restricted solution map S_m^s ~ sum_i sigma_i mu_i <nu_i, .>_Gamma.
#[derive(Debug, Clone, PartialEq)]
pub struct LowRankMap {
    pub subdomain: usize,
    pub fingerprint: Fingerprint,
    pub core: NodeRange,
    pub n_v: usize,
    pub sigma: Vec<f64>,
    /// mu_i on D_m^s, node-major.
    pub left: Vec<Vec<f64>>,
    /// nu_i in inflow-trace order.
    pub right: Vec<Vec<f64>>,
    pub boundary_weights: Vec<f64>,
    pub interior_weights: Vec<f64>,
    pub numerical_rank: usize,
}

impl LowRankMap {
    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    /// Largest deviation of the factor Gram matrices from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let gram = |vs: &[Vec<f64>], w: &[f64]| {
            let mut worst: f64 = 0.0;
            for (i, a) in vs.iter().enumerate() {
                for (j, b) in vs.iter().enumerate() {
                    let ip: f64 = a.iter().zip(b).zip(w).map(|((x, y), w)| x * y * w).sum();
                    let target = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((ip - target).abs());
                }
            }
            worst
        };
        gram(&self.left, &self.interior_weights).max(gram(&self.right, &self.boundary_weights))
    }

    /// Boundary coefficients <nu_i, phi>_Gamma.
    pub fn project(&self, phi: &[f64]) -> Vec<f64> {
        self.right
            .iter()
            .map(|nu| {
                nu.iter()
                    .zip(phi)
                    .zip(&self.boundary_weights)
                    .map(|((a, b), w)| a * b * w)
                    .sum()
            })
            .collect()
    }
}

/// Compress S_m^s for the subdomain of `sys` by the randomized pipeline.
pub fn compress_subdomain(problem: &Problem, sys: &LocalSystem, cfg: &RsvdConfig) -> Result<LowRankMap> {
    let op = SubdomainOperator::new(sys, MapKind::Restricted)?;
    let f = rsvd_operator(&op, cfg).map_err(|e| e.on_subdomain(sys.subdomain()))?;
    Ok(wrap_map(problem, sys, &op, f))
}

/// Compress S_m^s with the identity sketch (every weighted boundary basis vector).
pub fn compress_subdomain_full_basis(problem: &Problem, sys: &LocalSystem, rank: usize) -> Result<LowRankMap> {
    let op = SubdomainOperator::new(sys, MapKind::Restricted)?;
    let f = full_basis(&op, rank)?;
    Ok(wrap_map(problem, sys, &op, f))
}

fn wrap_map(problem: &Problem, sys: &LocalSystem, op: &SubdomainOperator<'_>, f: WeightedFactorization) -> LowRankMap {
    LowRankMap {
        subdomain: sys.subdomain(),
        fingerprint: problem.fingerprint(),
        core: sys.core(),
        n_v: sys.n_v(),
        sigma: f.sigma,
        left: f.left,
        right: f.right,
        boundary_weights: op.dw.clone(),
        interior_weights: op.cw.clone(),
        numerical_rank: f.numerical_rank,
    }
}

/// sum_i sigma_i mu_i <nu_i, phi>_Gamma on D_m^s.
pub fn apply_lowrank(map: &LowRankMap, fingerprint: &Fingerprint, phi: &BoundaryTrace) -> Result<PhaseSpaceField> {
    if map.fingerprint != *fingerprint {
        return Err(Error::StaleMap {
            subdomain: map.subdomain,
        });
    }
    if phi.owner != map.subdomain || phi.len() != map.boundary_weights.len() {
        return Err(Error::invalid(format!(
            "trace does not match the inflow set of subdomain {}",
            map.subdomain
        )));
    }
    let coeffs = map.project(&phi.to_vec());
    let mut out = vec![0.0; map.core.len() * map.n_v];
    for ((s, c), mu) in map.sigma.iter().zip(&coeffs).zip(&map.left) {
        let a = s * c;
        out.iter_mut().zip(mu).for_each(|(o, m)| *o += a * m);
    }
    PhaseSpaceField::from_vec(map.core, map.n_v, out)
}

/// Keep the leading `r` triples.
pub fn truncate(map: &LowRankMap, r: usize) -> Result<LowRankMap> {
    if r > map.rank() {
        return Err(Error::invalid(format!(
            "cannot truncate a rank-{} map to rank {r}",
            map.rank()
        )));
    }
    let mut out = map.clone();
    out.sigma.truncate(r);
    out.left.truncate(r);
    out.right.truncate(r);
    Ok(out)
}
