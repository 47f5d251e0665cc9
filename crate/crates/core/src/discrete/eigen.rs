use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::problem::{assemble_cells, Cell, Mass, Stiffness};
use crate::error::{Error, Result};

/// Eigenvalue with a Mass-normalized, Mass-orthogonal-to-constants vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub lambda: f64,
    pub vector: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenOptions {
    /// Grids up to this resolution use a dense symmetric solve.
    pub dense_max_n: usize,
    /// Residual tolerance `‖Ay − θy‖ ≤ tol·θ` of the iterative solver.
    pub tol: f64,
    pub max_iters: usize,
    /// Extra block columns beyond the requested count.
    pub guard: usize,
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions { dense_max_n: 24, tol: 1e-10, max_iters: 1000, guard: 4, seed: 0 }
    }
}

/// `‖(S − λM)v‖₂`.
pub fn residual_norm(s: &Stiffness, m: &Mass, pair: &EigenPair) -> f64 {
    let mut y = vec![0.0; pair.vector.len()];
    s.apply(&pair.vector, &mut y);
    y.iter()
        .zip(&pair.vector)
        .zip(&m.diag)
        .map(|((sy, v), w)| (sy - pair.lambda * w * v).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// The `k` smallest eigenpairs of `S v = λ M v` on the Mass-orthogonal
/// complement of the constants, in ascending order.
pub fn lambda1_discrete(s: &Stiffness, m: &Mass, k: usize) -> Result<Vec<EigenPair>> {
    lambda1_discrete_with(s, m, k, &EigenOptions::default(), None)
}

/// [`lambda1_discrete`] with explicit options and optional warm-start
/// vectors (in the original, Mass-weighted coordinates).
pub fn lambda1_discrete_with(
    s: &Stiffness,
    m: &Mass,
    k: usize,
    opts: &EigenOptions,
    warm: Option<&[Vec<f64>]>,
) -> Result<Vec<EigenPair>> {
    let dim = s.dim();
    if k == 0 || k >= dim {
        return Err(Error::Contract(format!("requested {k} eigenpairs of a {dim}-node problem")));
    }
    if m.diag.len() != dim || m.diag.iter().any(|w| !(*w > 0.0)) {
        return Err(Error::Contract("mass must be diagonal and positive".into()));
    }
    let op = Operator::new(s, m);
    let (vals, vecs) = if s.n() <= opts.dense_max_n {
        dense_lowest(&op, k)
    } else {
        let p = (k + opts.guard).min(dim - 1);
        Lobpcg::new(&op, p, opts).run(k, warm)?
    };
    Ok(vals
        .into_iter()
        .zip(vecs)
        .map(|(lambda, y)| EigenPair { lambda, vector: y.iter().zip(&op.inv_sqrt_m).map(|(a, b)| a * b).collect() })
        .collect())
}

/// `A = M^{-1/2} S M^{-1/2}` with the deflation vector `z ∝ M^{1/2} 1`.
struct Operator<'a> {
    s: &'a Stiffness,
    sqrt_m: Vec<f64>,
    inv_sqrt_m: Vec<f64>,
    z: DVector<f64>,
}

impl<'a> Operator<'a> {
    fn new(s: &'a Stiffness, m: &Mass) -> Self {
        let sqrt_m: Vec<f64> = m.diag.iter().map(|w| w.sqrt()).collect();
        let inv_sqrt_m = sqrt_m.iter().map(|w| 1.0 / w).collect();
        let z = DVector::from_vec(sqrt_m.clone()).normalize();
        Operator { s, sqrt_m, inv_sqrt_m, z }
    }

    fn dim(&self) -> usize {
        self.sqrt_m.len()
    }

    fn apply(&self, y: &[f64], out: &mut [f64]) {
        let x: Vec<f64> = y.iter().zip(&self.inv_sqrt_m).map(|(a, b)| a * b).collect();
        self.s.apply(&x, out);
        out.iter_mut().zip(&self.inv_sqrt_m).for_each(|(o, b)| *o *= b);
    }

    fn apply_block(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(x.nrows(), x.ncols());
        let mut buf = vec![0.0; x.nrows()];
        for j in 0..x.ncols() {
            self.apply(x.column(j).as_slice(), &mut buf);
            out.column_mut(j).copy_from_slice(&buf);
        }
        out
    }

    /// Upper bound on the spectrum of `A`.
    fn bound(&self) -> f64 {
        let top = self.inv_sqrt_m.iter().fold(0.0_f64, |a, b| a.max(*b));
        self.s.gershgorin() * top * top
    }
}

fn dense_lowest(op: &Operator, k: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let dim = op.dim();
    let mut a = op.s.to_dense();
    for i in 0..dim {
        for j in 0..dim {
            a[(i, j)] *= op.inv_sqrt_m[i] * op.inv_sqrt_m[j];
        }
    }
    // lift the constant mode above the spectrum
    let lift = 2.0 * op.bound() + 1.0;
    a += &op.z * op.z.transpose() * lift;
    let eig = SymmetricEigen::new(a);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = order[..k].iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = order[..k].iter().map(|&i| eig.eigenvectors.column(i).iter().copied().collect()).collect();
    (vals, vecs)
}

/// Inverse of the constant-coefficient operator built from the
/// weight-averaged cometric, applied by FFT.
struct Preconditioner {
    n: usize,
    inv_symbol: Vec<f64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Preconditioner {
    fn new(op: &Operator) -> Self {
        let n = op.s.n();
        let dim = n * n;
        let mass_mean = op.sqrt_m.iter().map(|w| w * w).sum::<f64>() / dim as f64;
        let mean = mean_cell(op.s);
        let avg = assemble_cells(n, &vec![mean; dim], &vec![1.0 / dim as f64; dim]);
        let mut delta = vec![0.0; dim];
        delta[0] = 1.0;
        let mut col = vec![0.0; dim];
        avg.apply(&delta, &mut col);
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let mut buf: Vec<Complex<f64>> = col.iter().map(|x| Complex::new(*x, 0.0)).collect();
        fft2(&mut buf, n, &fwd);
        let sym: Vec<f64> = buf.iter().map(|c| c.re / mass_mean).collect();
        let top = sym.iter().fold(0.0_f64, |a, b| a.max(*b));
        let floor = sym.iter().skip(1).filter(|x| **x > 1e-12 * top).fold(f64::INFINITY, |a, b| a.min(*b));
        let shift = if floor.is_finite() { 1e-3 * floor } else { 1e-3 * top.max(1.0) };
        let mut inv_symbol: Vec<f64> = sym.iter().map(|x| 1.0 / (x.max(0.0) + shift)).collect();
        inv_symbol[0] = 0.0;
        Preconditioner { n, inv_symbol, fwd, inv }
    }

    fn apply(&self, r: &[f64]) -> Vec<f64> {
        let mut buf: Vec<Complex<f64>> = r.iter().map(|x| Complex::new(*x, 0.0)).collect();
        fft2(&mut buf, self.n, &self.fwd);
        buf.iter_mut().zip(&self.inv_symbol).for_each(|(c, s)| *c *= *s);
        fft2(&mut buf, self.n, &self.inv);
        let norm = (self.n * self.n) as f64;
        buf.iter().map(|c| c.re / norm).collect()
    }
}

/// Recovers the weight-averaged cometric from the stencil: for a
/// translation-invariant field the `(1,0)`, `(0,1)` and `(1,1)` couplings
/// are `xy − xx`, `xy − yy` and `−xy`, averaged with the cell weights.
fn mean_cell(s: &Stiffness) -> Cell {
    let dim = s.dim() as f64;
    let mut acc = [0.0; 3];
    for row in s.stencil() {
        acc[0] += row[1];
        acc[1] += row[5];
        acc[2] += row[3];
    }
    let (c10, c11, c01) = (acc[0] / dim, acc[1] / dim, acc[2] / dim);
    let xy = -c11;
    [xy - c10, xy, xy - c01]
}

fn transpose(buf: &mut [Complex<f64>], n: usize) {
    for i in 0..n {
        for j in i + 1..n {
            buf.swap(i + n * j, j + n * i);
        }
    }
}

fn fft2(buf: &mut [Complex<f64>], n: usize, fft: &Arc<dyn Fft<f64>>) {
    fft.process(buf);
    transpose(buf, n);
    fft.process(buf);
    transpose(buf, n);
}

/// Block preconditioned conjugate gradient with Rayleigh-Ritz on
/// `[X, W, P]`, orthonormalized explicitly and kept orthogonal to the
/// constant mode.
struct Lobpcg<'a> {
    op: &'a Operator<'a>,
    prec: Preconditioner,
    p: usize,
    opts: EigenOptions,
}

impl<'a> Lobpcg<'a> {
    fn new(op: &'a Operator<'a>, p: usize, opts: &EigenOptions) -> Self {
        Lobpcg { op, prec: Preconditioner::new(op), p, opts: *opts }
    }

    /// Modified Gram-Schmidt (two passes) against `z`, `fixed` and the
    /// accepted columns; drops columns that lose more than `1 − 1e-10` of
    /// their norm.
    fn orthonormalize(&self, cols: Vec<DVector<f64>>) -> Vec<DVector<f64>> {
        let mut out: Vec<DVector<f64>> = Vec::with_capacity(cols.len());
        for mut v in cols {
            let before = v.norm();
            if before == 0.0 {
                continue;
            }
            for _ in 0..2 {
                let c = self.op.z.dot(&v);
                v.axpy(-c, &self.op.z, 1.0);
                for q in &out {
                    let c = q.dot(&v);
                    v.axpy(-c, q, 1.0);
                }
            }
            let after = v.norm();
            if after > 1e-10 * before {
                out.push(v / after);
            }
        }
        out
    }

    fn run(&self, k: usize, warm: Option<&[Vec<f64>]>) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        let dim = self.op.dim();
        let p = self.p;
        let mut rng = ChaCha8Rng::seed_from_u64(self.opts.seed);
        let mut start: Vec<DVector<f64>> = warm
            .unwrap_or(&[])
            .iter()
            .take(p)
            .filter(|v| v.len() == dim)
            .map(|v| DVector::from_iterator(dim, v.iter().zip(&self.op.sqrt_m).map(|(a, b)| a * b)))
            .collect();
        let mut x_cols = Vec::new();
        while x_cols.len() < p {
            while start.len() < p {
                start.push(DVector::from_fn(dim, |_, _| rng.gen::<f64>() - 0.5));
            }
            x_cols = self.orthonormalize(start.clone());
            start = x_cols.clone();
        }
        let mut x = DMatrix::from_columns(&x_cols);
        let mut ax = self.op.apply_block(&x);
        let (theta, y) = ritz(&x, &ax, p);
        x = &x * &y;
        ax = &ax * &y;
        let mut theta = theta;
        let mut prev: Option<DMatrix<f64>> = None;
        let floor = 1e-12 * self.op.bound();
        let mut worst = f64::INFINITY;
        for _ in 0..self.opts.max_iters {
            let mut r = ax.clone();
            for j in 0..p {
                let col = x.column(j) * theta[j];
                let mut rc = r.column_mut(j);
                rc -= col;
            }
            worst = (0..k).map(|j| r.column(j).norm() / theta[j].abs().max(floor)).fold(0.0, f64::max);
            if worst <= self.opts.tol {
                let vals = theta[..k].to_vec();
                let vecs = (0..k).map(|j| x.column(j).iter().copied().collect()).collect();
                return Ok((vals, vecs));
            }
            let mut cols: Vec<DVector<f64>> = (0..p).map(|j| x.column(j).into_owned()).collect();
            for j in 0..p {
                let w = self.prec.apply(r.column(j).as_slice());
                cols.push(DVector::from_vec(w));
            }
            if let Some(pm) = &prev {
                cols.extend((0..pm.ncols()).map(|j| pm.column(j).into_owned()));
            }
            let basis = DMatrix::from_columns(&self.orthonormalize(cols));
            let ab = self.op.apply_block(&basis);
            let (t, y) = ritz(&basis, &ab, p);
            let m = basis.ncols();
            let y_rest = y.rows(p, m - p).into_owned();
            prev = Some(basis.columns(p, m - p) * y_rest);
            x = &basis * &y;
            ax = &ab * &y;
            theta = t;
        }
        Err(Error::IterationLimit { iterations: self.opts.max_iters, residual: worst })
    }
}

/// Lowest `p` Ritz pairs of `A` on the orthonormal basis `q`: returns the
/// values and the coefficient matrix.
fn ritz(q: &DMatrix<f64>, aq: &DMatrix<f64>, p: usize) -> (Vec<f64>, DMatrix<f64>) {
    let mut h = q.transpose() * aq;
    let ht = h.transpose();
    h = (h + ht) * 0.5;
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = order[..p].iter().map(|&i| eig.eigenvalues[i]).collect();
    let cols: Vec<DVector<f64>> = order[..p].iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
    (vals, DMatrix::from_columns(&cols))
}
