use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::eigen::{lambda1_discrete_with, EigenOptions, EigenPair};
use super::problem::{assemble, cell_pair, cell_rank, project_psd, to_cell, Cell, DiscreteProblem};
use crate::error::{Error, Result};
use crate::tensor::{Frame, SymTensor, Variance};

/// Backtracking rule of the ascent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRule {
    /// First trial step, as a fraction of the field norm.
    pub initial_step: f64,
    pub armijo: f64,
    pub shrink: f64,
    pub grow: f64,
    /// Smallest trial step relative to the first one before declaring a stall.
    pub min_step: f64,
}

impl Default for StepRule {
    fn default() -> Self {
        StepRule { initial_step: 0.1, armijo: 1e-4, shrink: 0.5, grow: 2.0, min_step: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AscentOptions {
    pub iters: usize,
    pub step: StepRule,
    /// Relative gap below which eigenvalues count as one cluster.
    pub cluster_tol: f64,
    /// Eigenpairs computed per iterate; all of them enter the bundle model.
    pub eigen_count: usize,
    pub eigen: EigenOptions,
    /// Initial constant cometric; the identity when absent.
    pub init: Option<SymTensor>,
}

impl Default for AscentOptions {
    fn default() -> Self {
        AscentOptions {
            iters: 100,
            step: StepRule::default(),
            cluster_tol: 1e-6,
            eigen_count: 8,
            eigen: EigenOptions::default(),
            init: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistoryRow {
    pub iteration: usize,
    pub objective: f64,
    pub cluster_size: usize,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AscentResult {
    /// Final iterate, normalized to `Σ w (g*, h) = 1`.
    pub problem: DiscreteProblem,
    pub history: Vec<HistoryRow>,
    pub objective: f64,
    pub stalled: bool,
    pub converged: bool,
    #[serde(skip)]
    pub eigenpairs: Vec<EigenPair>,
    /// Number of cells whose cometric has rank 0, 1 and 2.
    pub rank_counts: [usize; 3],
}

/// `λ₁ / Σ w (g*, h)`.
pub fn objective(p: &DiscreteProblem, opts: &EigenOptions) -> Result<f64> {
    let (s, m) = assemble(p);
    let l = lambda1_discrete_with(&s, &m, 1, opts, None)?;
    Ok(l[0].lambda / p.pairing())
}

fn cluster_size(pairs: &[EigenPair], tol: f64) -> usize {
    let l1 = pairs[0].lambda;
    pairs.iter().filter(|p| p.lambda <= l1 + tol * l1.abs()).count()
}

fn normalize(cells: &mut [Cell], weights: &[f64], h: &Cell) {
    let pairing: f64 = cells.iter().zip(weights).map(|(c, w)| w * cell_pair(c, h)).sum();
    if pairing > 0.0 {
        cells.iter_mut().for_each(|c| c.iter_mut().for_each(|x| *x /= pairing));
    }
}

/// Weighted field inner product `Σ w (X, Y)`.
fn field_dot(x: &[Cell], y: &[Cell], w: &[f64]) -> f64 {
    x.par_iter().zip(y.par_iter().zip(w.par_iter())).map(|(a, (b, w))| w * cell_pair(a, b)).sum()
}

/// Projection of the symmetric matrix `q` onto `{Q ⪰ 0, tr Q = 1}`.
fn project_spectraplex(q: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new((q + q.transpose()) * 0.5);
    let ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let mut sorted = ev.clone();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    let mut tau = 0.0;
    for (i, s) in sorted.iter().enumerate() {
        acc += s;
        let t = (acc - 1.0) / (i + 1) as f64;
        if s - t > 0.0 {
            tau = t;
        }
    }
    let d: Vec<f64> = ev.iter().map(|e| (e - tau).max(0.0)).collect();
    let v = &eig.eigenvectors;
    v * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d)) * v.transpose()
}

/// Bundle subproblem: minimize `½ s ‖Σ Q_ij ∇_ij‖² + Σ Q_ii δλ_i` over the
/// spectraplex by accelerated projected gradient. `gram[(ij),(kl)]` holds
/// `⟨∇_ij, ∇_kl⟩`.
fn solve_bundle(gram: &DMatrix<f64>, dlam: &[f64], s: f64) -> DMatrix<f64> {
    let m = dlam.len();
    let lip = s * SymmetricEigen::new(gram.clone()).eigenvalues.iter().fold(0.0_f64, |a, b| a.max(*b));
    let step = if lip > 0.0 { 1.0 / lip } else { 1.0 };
    let grad = |q: &DMatrix<f64>| {
        let v = nalgebra::DVector::from_column_slice(q.as_slice());
        let kq = gram * v * s;
        let mut g = DMatrix::from_column_slice(m, m, kq.as_slice());
        for i in 0..m {
            g[(i, i)] += dlam[i];
        }
        g
    };
    let mut q = DMatrix::zeros(m, m);
    q[(0, 0)] = 1.0;
    let mut y = q.clone();
    let mut t = 1.0_f64;
    for _ in 0..400 {
        let next = project_spectraplex(&(&y - grad(&y) * step));
        let tn = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        y = &next + (&next - &q) * ((t - 1.0) / tn);
        if (&next - &q).norm() < 1e-13 {
            q = next;
            break;
        }
        q = next;
        t = tn;
    }
    q
}

/// Projected bundle ascent on `λ₁ / Σ w (g*, h)` over PSD cometric fields.
///
/// Each iterate keeps `Σ w (g*, h) = 1`. The computed eigenpairs define the
/// cutting-plane model `min_{Q} tr(QΛ) + ⟨Σ Q_ij ∇_ij, D⟩` with `∇_ij` the
/// field derivative of `uᵢᵀ S uⱼ − δᵢⱼ λᵢ (g*, h)` and `Q` ranging over
/// PSD unit-trace matrices; the step is the proximal maximizer of that
/// model, so eigenvector rotations inside a cluster do not matter. Steps
/// are projected cell-wise to the PSD cone, renormalized, and accepted
/// under an Armijo test against the model increase; the prox parameter is
/// halved on rejection and doubled on acceptance.
pub fn maximize_lambda1(h: &SymTensor, n: usize, opts: &AscentOptions) -> Result<AscentResult> {
    let init = match opts.init {
        Some(g) => g,
        None => SymTensor::identity(2, Variance::Contravariant, Frame::Grid)?,
    };
    maximize_from(&DiscreteProblem::uniform(n, *h, init)?, opts)
}

/// [`maximize_lambda1`] from an arbitrary initial field.
pub fn maximize_from(start: &DiscreteProblem, opts: &AscentOptions) -> Result<AscentResult> {
    if start.pairing() <= 0.0 {
        return Err(Error::OutOfDomain("initial cometric pairs to zero with h".into()));
    }
    let k = opts.eigen_count.max(1);
    let weights = start.volume_weights().to_vec();
    let hc = to_cell(start.h());
    let mut cells = start.cells();
    normalize(&mut cells, &weights, &hc);
    let mut problem = start.with_cells(&cells);

    let solve = |p: &DiscreteProblem, warm: Option<&[Vec<f64>]>| -> Result<Vec<EigenPair>> {
        let (s, m) = assemble(p);
        lambda1_discrete_with(&s, &m, k, &opts.eigen, warm)
    };
    let mut pairs = solve(&problem, None)?;
    let mut value = pairs[0].lambda;
    let mut history =
        vec![HistoryRow { iteration: 0, objective: value, cluster_size: cluster_size(&pairs, opts.cluster_tol), step: 0.0 }];
    let field_norm = |c: &[Cell]| field_dot(c, c, &weights).sqrt();
    let mut s_prox: Option<f64> = None;
    let mut stalled = false;
    let mut converged = false;

    for it in 1..=opts.iters {
        let m = pairs.len();
        // ∇_ij as cell fields
        let mut grads: Vec<Vec<Cell>> = Vec::with_capacity(m * m);
        for j in 0..m {
            for i in 0..m {
                let mut g = problem.cross_gradient(&pairs[i].vector, &pairs[j].vector);
                if i == j {
                    let l = pairs[i].lambda;
                    g.iter_mut().for_each(|c| {
                        c[0] -= l * hc[0];
                        c[1] -= l * hc[1];
                        c[2] -= l * hc[2];
                    });
                }
                grads.push(g);
            }
        }
        let mut gram = DMatrix::zeros(m * m, m * m);
        for a in 0..m * m {
            for b in a..m * m {
                let v = field_dot(&grads[a], &grads[b], &weights);
                gram[(a, b)] = v;
                gram[(b, a)] = v;
            }
        }
        let dlam: Vec<f64> = pairs.iter().map(|p| p.lambda - value).collect();
        let g_norm = field_norm(&cells);
        let s0 = match s_prox {
            Some(s) => s,
            None => opts.step.initial_step * g_norm / field_dot(&grads[0], &grads[0], &weights).sqrt().max(1e-300),
        };
        let mut s = s0;
        let mut accepted = None;
        loop {
            let q = solve_bundle(&gram, &dlam, s);
            let mut d = vec![[0.0; 3]; cells.len()];
            for (idx, g) in grads.iter().enumerate() {
                let coef = s * q[(idx % m, idx / m)];
                if coef != 0.0 {
                    d.iter_mut().zip(g).for_each(|(dc, gc)| {
                        dc[0] += coef * gc[0];
                        dc[1] += coef * gc[1];
                        dc[2] += coef * gc[2];
                    });
                }
            }
            // model increase: λ_min(diag(δλ) + [⟨∇_ij, d⟩])
            let mut mm = DMatrix::zeros(m, m);
            for i in 0..m {
                for j in 0..m {
                    mm[(i, j)] = field_dot(&grads[i + m * j], &d, &weights);
                }
                mm[(i, i)] += dlam[i];
            }
            let mm = (&mm + mm.transpose()) * 0.5;
            let model = SymmetricEigen::new(mm).eigenvalues.iter().fold(f64::INFINITY, |a, b| a.min(*b));
            if model <= 1e-13 * value.abs() {
                converged = true;
                break;
            }
            let mut trial: Vec<Cell> =
                cells.iter().zip(&d).map(|(c, dc)| project_psd(&[c[0] + dc[0], c[1] + dc[1], c[2] + dc[2]])).collect();
            normalize(&mut trial, &weights, &hc);
            let tp = start.with_cells(&trial);
            let warm: Vec<Vec<f64>> = pairs.iter().map(|p| p.vector.clone()).collect();
            let tpairs = solve(&tp, Some(&warm))?;
            let tv = tpairs[0].lambda;
            if tv >= value + opts.step.armijo * model {
                let step = field_norm(&d) / g_norm;
                accepted = Some((trial, tp, tpairs, tv, step));
                s_prox = Some(s * opts.step.grow);
                break;
            }
            s *= opts.step.shrink;
            if s < opts.step.min_step * s0 {
                stalled = true;
                break;
            }
        }
        match accepted {
            Some((trial, tp, tpairs, tv, step)) => {
                cells = trial;
                problem = tp;
                pairs = tpairs;
                value = tv;
                history.push(HistoryRow {
                    iteration: it,
                    objective: value,
                    cluster_size: cluster_size(&pairs, opts.cluster_tol),
                    step,
                });
            }
            None => break,
        }
    }
    let mut rank_counts = [0usize; 3];
    cells.iter().for_each(|c| rank_counts[cell_rank(c)] += 1);
    Ok(AscentResult { problem, history, objective: value, stalled, converged, eigenpairs: pairs, rank_counts })
}
