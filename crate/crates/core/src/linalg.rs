//! Linear algebra kernels: block-tridiagonal LU for the transport systems, a
//! compressed sparse row matrix, restarted GMRES, and a one-sided Jacobi SVD.

use nalgebra::{DMatrix, DVector, Dyn, LU};

use crate::error::{Error, Result};

/// Square matrix with dense blocks on the diagonal and the two adjacent off-diagonals.
///
/// `lower[k]` couples block row `k` to block column `k - 1` (unused for k = 0);
/// `upper[k]` couples block row `k` to block column `k + 1` (unused for the last row).
#[derive(Debug, Clone)]
pub struct BlockTridiagonal {
    block: usize,
    diag: Vec<DMatrix<f64>>,
    lower: Vec<DMatrix<f64>>,
    upper: Vec<DMatrix<f64>>,
}

impl BlockTridiagonal {
    pub fn zeros(n_blocks: usize, block: usize) -> Self {
        let z = || vec![DMatrix::zeros(block, block); n_blocks];
        Self {
            block,
            diag: z(),
            lower: z(),
            upper: z(),
        }
    }

    pub fn n_blocks(&self) -> usize {
        self.diag.len()
    }

    pub fn block_size(&self) -> usize {
        self.block
    }

    pub fn dim(&self) -> usize {
        self.block * self.diag.len()
    }

    pub fn diag_mut(&mut self, k: usize) -> &mut DMatrix<f64> {
        &mut self.diag[k]
    }

    pub fn lower_mut(&mut self, k: usize) -> &mut DMatrix<f64> {
        &mut self.lower[k]
    }

    pub fn upper_mut(&mut self, k: usize) -> &mut DMatrix<f64> {
        &mut self.upper[k]
    }

    pub fn diag(&self, k: usize) -> &DMatrix<f64> {
        &self.diag[k]
    }

    pub fn lower(&self, k: usize) -> &DMatrix<f64> {
        &self.lower[k]
    }

    pub fn upper(&self, k: usize) -> &DMatrix<f64> {
        &self.upper[k]
    }

    pub fn transpose(&self) -> Self {
        let n = self.n_blocks();
        let zero = DMatrix::zeros(self.block, self.block);
        let lower = (0..n)
            .map(|k| if k == 0 { zero.clone() } else { self.upper[k - 1].transpose() })
            .collect();
        let upper = (0..n)
            .map(|k| if k + 1 == n { zero.clone() } else { self.lower[k + 1].transpose() })
            .collect();
        Self {
            block: self.block,
            diag: self.diag.iter().map(|d| d.transpose()).collect(),
            lower,
            upper,
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let b = self.block;
        let n = self.n_blocks();
        let mut y = vec![0.0; self.dim()];
        for k in 0..n {
            let yk = &mut y[k * b..(k + 1) * b];
            gemv_acc(&self.diag[k], &x[k * b..(k + 1) * b], yk);
            if k > 0 {
                gemv_acc(&self.lower[k], &x[(k - 1) * b..k * b], yk);
            }
            if k + 1 < n {
                gemv_acc(&self.upper[k], &x[(k + 1) * b..(k + 2) * b], yk);
            }
        }
        y
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let b = self.block;
        let n = self.n_blocks();
        let mut a = DMatrix::zeros(self.dim(), self.dim());
        for k in 0..n {
            a.view_mut((k * b, k * b), (b, b)).copy_from(&self.diag[k]);
            if k > 0 {
                a.view_mut((k * b, (k - 1) * b), (b, b)).copy_from(&self.lower[k]);
            }
            if k + 1 < n {
                a.view_mut((k * b, (k + 1) * b), (b, b)).copy_from(&self.upper[k]);
            }
        }
        a
    }

    pub fn to_csr(&self) -> CsrMatrix {
        let b = self.block;
        let n = self.n_blocks();
        let mut indptr = Vec::with_capacity(self.dim() + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for k in 0..n {
            for r in 0..b {
                let mut push_row = |blk: &DMatrix<f64>, col0: usize| {
                    for c in 0..b {
                        let v = blk[(r, c)];
                        if v != 0.0 {
                            indices.push(col0 + c);
                            values.push(v);
                        }
                    }
                };
                if k > 0 {
                    push_row(&self.lower[k], (k - 1) * b);
                }
                push_row(&self.diag[k], k * b);
                if k + 1 < n {
                    push_row(&self.upper[k], (k + 1) * b);
                }
                indptr.push(indices.len());
            }
        }
        CsrMatrix {
            n: self.dim(),
            indptr,
            indices,
            values,
        }
    }

    /// Block LU without inter-block pivoting; each Schur complement is factored
    /// with partial pivoting. Stable for the M-matrices produced by upwinding.
    pub fn factor(&self) -> Result<BlockLu> {
        let n = self.n_blocks();
        let mut lus: Vec<LU<f64, Dyn, Dyn>> = Vec::with_capacity(n);
        let mut g: Vec<DMatrix<f64>> = Vec::with_capacity(n);
        for k in 0..n {
            let schur = if k == 0 {
                self.diag[0].clone()
            } else {
                &self.diag[k] - &self.lower[k] * &g[k - 1]
            };
            let lu = schur.lu();
            if k + 1 < n {
                let gk = lu.solve(&self.upper[k]).ok_or_else(|| singular(k))?;
                g.push(gk);
            }
            if !lu.is_invertible() {
                return Err(singular(k));
            }
            lus.push(lu);
        }
        Ok(BlockLu {
            block: self.block,
            lus,
            lower: self.lower.clone(),
            g,
        })
    }
}

fn singular(k: usize) -> Error {
    Error::invalid(format!("singular pivot block {k} in block LU"))
}

fn gemv_acc(a: &DMatrix<f64>, x: &[f64], y: &mut [f64]) {
    let (rows, cols) = a.shape();
    // Column-major storage: accumulate column by column.
    for c in 0..cols {
        let xc = x[c];
        if xc == 0.0 {
            continue;
        }
        let col = a.column(c);
        for r in 0..rows {
            y[r] += col[r] * xc;
        }
    }
}

/// Factored block-tridiagonal matrix.
#[derive(Debug, Clone)]
pub struct BlockLu {
    block: usize,
    lus: Vec<LU<f64, Dyn, Dyn>>,
    lower: Vec<DMatrix<f64>>,
    g: Vec<DMatrix<f64>>,
}

impl BlockLu {
    pub fn dim(&self) -> usize {
        self.block * self.lus.len()
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let b = self.block;
        let n = self.lus.len();
        assert_eq!(rhs.len(), b * n, "right-hand side length");
        let mut y = vec![0.0; b * n];
        let mut work = DVector::zeros(b);
        for k in 0..n {
            work.as_mut_slice().copy_from_slice(&rhs[k * b..(k + 1) * b]);
            if k > 0 {
                let prev = y[(k - 1) * b..k * b].to_vec();
                let mut acc = vec![0.0; b];
                gemv_acc(&self.lower[k], &prev, &mut acc);
                for (w, a) in work.iter_mut().zip(acc) {
                    *w -= a;
                }
            }
            self.lus[k].solve_mut(&mut work);
            y[k * b..(k + 1) * b].copy_from_slice(work.as_slice());
        }
        for k in (0..n.saturating_sub(1)).rev() {
            let next = y[(k + 1) * b..(k + 2) * b].to_vec();
            let mut acc = vec![0.0; b];
            gemv_acc(&self.g[k], &next, &mut acc);
            for (yk, a) in y[k * b..(k + 1) * b].iter_mut().zip(acc) {
                *yk -= a;
            }
        }
        y
    }
}

/// Compressed sparse row matrix.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.indptr[r]..self.indptr[r + 1];
        self.indices[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|r| self.row(r).map(|(c, v)| v * x[c]).sum()).collect()
    }

    pub fn transpose_matvec(&self, y: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        for (r, yr) in y.iter().enumerate() {
            for (c, v) in self.row(r) {
                x[c] += v * yr;
            }
        }
        x
    }
}

pub fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Outcome of an iterative solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovOutcome {
    pub matvecs: usize,
    pub relative_residual: f64,
}

/// Right-preconditioned restarted GMRES. Stops when ||b - Ax|| <= tol ||b||.
pub fn gmres(
    apply: impl Fn(&[f64]) -> Vec<f64>,
    precond: impl Fn(&[f64]) -> Vec<f64>,
    b: &[f64],
    restart: usize,
    tol: f64,
    max_matvecs: usize,
) -> Result<(Vec<f64>, KrylovOutcome)> {
    let n = b.len();
    let bnorm = norm2(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok((
            x,
            KrylovOutcome {
                matvecs: 0,
                relative_residual: 0.0,
            },
        ));
    }
    let restart = restart.max(1);
    let mut matvecs = 0;
    loop {
        let ax = apply(&x);
        matvecs += 1;
        let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let beta = norm2(&r);
        if beta <= tol * bnorm {
            return Ok((
                x,
                KrylovOutcome {
                    matvecs,
                    relative_residual: beta / bnorm,
                },
            ));
        }
        if matvecs >= max_matvecs {
            return Err(Error::NonConvergence {
                subdomain: None,
                iterations: matvecs,
                residual: beta / bnorm,
            });
        }
        let mut basis: Vec<Vec<f64>> = vec![r.iter().map(|v| v / beta).collect()];
        let mut z_dirs: Vec<Vec<f64>> = Vec::new();
        let mut h = vec![vec![0.0; restart]; restart + 1];
        let mut cs = vec![0.0; restart];
        let mut sn = vec![0.0; restart];
        let mut g = vec![0.0; restart + 1];
        g[0] = beta;
        let mut used = 0;
        for j in 0..restart {
            let z = precond(&basis[j]);
            let mut w = apply(&z);
            matvecs += 1;
            z_dirs.push(z);
            for _pass in 0..2 {
                for (i, q) in basis.iter().enumerate() {
                    let hij = dot(&w, q);
                    h[i][j] += hij;
                    for (wk, qk) in w.iter_mut().zip(q) {
                        *wk -= hij * qk;
                    }
                }
            }
            let wn = norm2(&w);
            h[j + 1][j] = wn;
            for i in 0..j {
                let t = cs[i] * h[i][j] + sn[i] * h[i + 1][j];
                h[i + 1][j] = -sn[i] * h[i][j] + cs[i] * h[i + 1][j];
                h[i][j] = t;
            }
            let denom = (h[j][j] * h[j][j] + h[j + 1][j] * h[j + 1][j]).sqrt();
            if denom == 0.0 {
                cs[j] = 1.0;
                sn[j] = 0.0;
            } else {
                cs[j] = h[j][j] / denom;
                sn[j] = h[j + 1][j] / denom;
            }
            h[j][j] = cs[j] * h[j][j] + sn[j] * h[j + 1][j];
            h[j + 1][j] = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] *= cs[j];
            used = j + 1;
            if g[j + 1].abs() <= 0.5 * tol * bnorm || wn == 0.0 || matvecs >= max_matvecs {
                break;
            }
            basis.push(w.iter().map(|v| v / wn).collect());
        }
        let mut yv = vec![0.0; used];
        for i in (0..used).rev() {
            let s: f64 = (i + 1..used).map(|k| h[i][k] * yv[k]).sum();
            yv[i] = if h[i][i] == 0.0 { 0.0 } else { (g[i] - s) / h[i][i] };
        }
        for (yi, z) in yv.iter().zip(&z_dirs) {
            for (xk, zk) in x.iter_mut().zip(z) {
                *xk += yi * zk;
            }
        }
    }
}

/// Singular values and right singular vectors of `a` by one-sided Jacobi.
///
/// Returns values in descending order. Independent of nalgebra's SVD, so it can
/// serve as an oracle for code paths that use it.
pub fn jacobi_singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    let mut work = if a.nrows() >= a.ncols() {
        a.clone()
    } else {
        a.transpose()
    };
    let (m, n) = work.shape();
    let tol = 1e-15;
    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for k in 0..m {
                    let (x, y) = (work[(k, p)], work[(k, q)]);
                    alpha += x * x;
                    beta += y * y;
                    gamma += x * y;
                }
                if gamma == 0.0 || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..m {
                    let (x, y) = (work[(k, p)], work[(k, q)]);
                    work[(k, p)] = c * x - s * y;
                    work[(k, q)] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = (0..n).map(|c| work.column(c).norm()).collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

/// Largest singular value.
pub fn spectral_norm(a: &DMatrix<f64>) -> f64 {
    jacobi_singular_values(a).first().copied().unwrap_or(0.0)
}
