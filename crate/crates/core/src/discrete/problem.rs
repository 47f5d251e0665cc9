use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{pair, psd_check, Frame, SymTensor, Variance, PSD_TOL};

/// Stencil offsets `(dx, dy)` of the assembled operator: each cell is cut
/// along its `(0,0)–(1,1)` diagonal, so nodes couple to their four axis
/// neighbours and to the two diagonal ones along that cut.
pub const OFFSETS: [(i64, i64); 7] = [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1)];

/// Upper triangle `(xx, xy, yy)` of a 2×2 symmetric tensor.
pub type Cell = [f64; 3];

/// `(D, G) = D_xx G_xx + 2 D_xy G_xy + D_yy G_yy`.
pub fn cell_pair(d: &Cell, g: &Cell) -> f64 {
    d[0] * g[0] + 2.0 * d[1] * g[1] + d[2] * g[2]
}

pub(crate) fn to_cell(t: &SymTensor) -> Cell {
    [t.get(0, 0), t.get(0, 1), t.get(1, 1)]
}

pub(crate) fn from_cell(c: &Cell, variance: Variance) -> SymTensor {
    SymTensor::from_upper(2, c, variance, Frame::Grid).expect("finite 2x2 tensor")
}

fn offset_index(dx: i64, dy: i64) -> usize {
    OFFSETS.iter().position(|&o| o == (dx, dy)).expect("offset in stencil")
}

/// Node index of `(i, j)` on the periodic `n × n` grid.
pub fn node(n: usize, i: i64, j: i64) -> usize {
    let n = n as i64;
    (i.rem_euclid(n) + n * j.rem_euclid(n)) as usize
}

/// Lower triangle `(i,j), (i+1,j), (i+1,j+1)` and upper triangle
/// `(i,j), (i+1,j+1), (i,j+1)` of a cell, as grid offsets with the
/// coefficients of `∂x` and `∂y` (in units of `n`) on each vertex.
type Triangle = ([(i64, i64); 3], [f64; 3], [f64; 3]);
const TRIANGLES: [Triangle; 2] = [
    ([(0, 0), (1, 0), (1, 1)], [-1.0, 1.0, 0.0], [0.0, -1.0, 1.0]),
    ([(0, 0), (1, 1), (0, 1)], [0.0, 1.0, -1.0], [-1.0, 0.0, 1.0]),
];

/// Grid discretization of `(T², dμ, h)` with a piecewise-constant cometric.
///
/// Cells are indexed like nodes, `i + n j` for the cell with lower-left
/// corner `(i, j)`; the chart is `[0, 1)²` with spacing `1/n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteProblem {
    n: usize,
    h: SymTensor,
    gstar_field: Vec<SymTensor>,
    volume_weights: Vec<f64>,
}

impl DiscreteProblem {
    pub fn new(n: usize, h: SymTensor, gstar_field: Vec<SymTensor>, volume_weights: Vec<f64>) -> Result<Self> {
        if n < 4 {
            return Err(Error::OutOfDomain(format!("grid resolution must be at least 4, got {n}")));
        }
        if h.dim() != 2 || h.variance() != Variance::Covariant {
            return Err(Error::Contract("target must be a 2-dimensional metric".into()));
        }
        let ev = h.eigenvalues();
        if !(ev[0] > 0.0) {
            return Err(Error::OutOfDomain("target metric is not positive definite".into()));
        }
        let cells = n * n;
        if gstar_field.len() != cells || volume_weights.len() != cells {
            return Err(Error::Contract(format!("expected {cells} cells, got {} tensors and {} weights",
                gstar_field.len(), volume_weights.len())));
        }
        for (c, g) in gstar_field.iter().enumerate() {
            if g.dim() != 2 || g.variance() != Variance::Contravariant {
                return Err(Error::Contract(format!("cell {c} does not hold a 2-dimensional cometric")));
            }
            if !psd_check(g, PSD_TOL).psd {
                return Err(Error::Contract(format!("cometric in cell {c} is not positive semidefinite")));
            }
        }
        if volume_weights.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::Contract("volume weights must be positive".into()));
        }
        let total: f64 = volume_weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Contract(format!("volume weights sum to {total}, expected 1")));
        }
        let h = h.with_frame(Frame::Grid);
        let gstar_field = gstar_field.into_iter().map(|g| g.with_frame(Frame::Grid)).collect();
        Ok(DiscreteProblem { n, h, gstar_field, volume_weights })
    }

    /// Constant cometric and uniform weights.
    pub fn uniform(n: usize, h: SymTensor, gstar: SymTensor) -> Result<Self> {
        let cells = n * n;
        Self::new(n, h, vec![gstar; cells], vec![1.0 / cells as f64; cells])
    }

    pub fn with_field(&self, gstar_field: Vec<SymTensor>) -> Result<Self> {
        Self::new(self.n, self.h, gstar_field, self.volume_weights.clone())
    }

    /// Same problem with cells given as `(xx, xy, yy)`; entries are trusted
    /// to be PSD.
    pub(crate) fn with_cells(&self, cells: &[Cell]) -> Self {
        DiscreteProblem {
            n: self.n,
            h: self.h,
            gstar_field: cells.iter().map(|c| from_cell(c, Variance::Contravariant)).collect(),
            volume_weights: self.volume_weights.clone(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> usize {
        self.n * self.n
    }

    pub fn h(&self) -> &SymTensor {
        &self.h
    }

    pub fn gstar_field(&self) -> &[SymTensor] {
        &self.gstar_field
    }

    pub fn volume_weights(&self) -> &[f64] {
        &self.volume_weights
    }

    pub(crate) fn cells(&self) -> Vec<Cell> {
        self.gstar_field.iter().map(to_cell).collect()
    }

    /// `Σ_cells w (g*, h)`.
    pub fn pairing(&self) -> f64 {
        self.gstar_field
            .iter()
            .zip(&self.volume_weights)
            .map(|(g, w)| w * pair(g, &self.h).expect("grid-frame tensors"))
            .sum()
    }

    /// Lumped mass: each triangle gives a third of its weight to each vertex.
    pub fn node_weights(&self) -> Vec<f64> {
        let n = self.n;
        let mut m = vec![0.0; n * n];
        for j in 0..n as i64 {
            for i in 0..n as i64 {
                let w = self.volume_weights[node(n, i, j)] / 6.0;
                for (verts, _, _) in &TRIANGLES {
                    for (dx, dy) in verts {
                        m[node(n, i + dx, j + dy)] += w;
                    }
                }
            }
        }
        m
    }

    /// Per-cell `½ Σ_T sym(du_T ⊗ dv_T)`, covariant, over the two triangles.
    pub fn cross_gradient(&self, u: &[f64], v: &[f64]) -> Vec<Cell> {
        let n = self.n;
        (0..n * n)
            .into_par_iter()
            .map(|c| {
                let (i, j) = ((c % n) as i64, (c / n) as i64);
                let mut g = [0.0; 3];
                for t in &TRIANGLES {
                    let du = triangle_gradient(n, i, j, t, u);
                    let dv = triangle_gradient(n, i, j, t, v);
                    g[0] += 0.5 * du[0] * dv[0];
                    g[1] += 0.25 * (du[0] * dv[1] + du[1] * dv[0]);
                    g[2] += 0.5 * du[1] * dv[1];
                }
                g
            })
            .collect()
    }

    /// Chart gradients of `u` on the two triangles of every cell.
    pub fn triangle_gradients(&self, u: &[f64]) -> Vec<[[f64; 2]; 2]> {
        let n = self.n;
        (0..n * n)
            .map(|c| {
                let (i, j) = ((c % n) as i64, (c / n) as i64);
                [triangle_gradient(n, i, j, &TRIANGLES[0], u), triangle_gradient(n, i, j, &TRIANGLES[1], u)]
            })
            .collect()
    }
}

fn triangle_gradient(n: usize, i: i64, j: i64, t: &Triangle, u: &[f64]) -> [f64; 2] {
    let (verts, ex, ey) = t;
    let mut g = [0.0; 2];
    for (k, (dx, dy)) in verts.iter().enumerate() {
        let val = u[node(n, i + dx, j + dy)];
        g[0] += ex[k] * val;
        g[1] += ey[k] * val;
    }
    [g[0] * n as f64, g[1] * n as f64]
}

/// Sparse symmetric stiffness matrix in stencil form.
#[derive(Debug, Clone, PartialEq)]
pub struct Stiffness {
    n: usize,
    stencil: Vec<[f64; 7]>,
    neighbors: Vec<[usize; 7]>,
}

/// Diagonal lumped mass matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mass {
    pub diag: Vec<f64>,
}

impl Stiffness {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.n * self.n
    }

    pub fn stencil(&self) -> &[[f64; 7]] {
        &self.stencil
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for ((yp, row), nb) in y.iter_mut().zip(&self.stencil).zip(&self.neighbors) {
            *yp = row.iter().zip(nb).map(|(a, &q)| a * x[q]).sum();
        }
    }

    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let mut y = vec![0.0; x.len()];
        self.apply(x, &mut y);
        x.iter().zip(&y).map(|(a, b)| a * b).sum()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for (p, (row, nb)) in self.stencil.iter().zip(&self.neighbors).enumerate() {
            for (a, &q) in row.iter().zip(nb) {
                m[(p, q)] += a;
            }
        }
        m
    }

    /// Largest absolute row sum, a bound on the spectral radius.
    pub fn gershgorin(&self) -> f64 {
        self.stencil.iter().map(|r| r.iter().map(|a| a.abs()).sum::<f64>()).fold(0.0, f64::max)
    }
}

/// Stiffness of `Σ_cells w g*(du, du)` with piecewise-linear `u` on the two
/// triangles of each cell (each carrying half the cell weight), and the
/// lumped mass. The stiffness is linear in the cometric field.
pub fn assemble(p: &DiscreteProblem) -> (Stiffness, Mass) {
    (assemble_cells(p.n, &p.cells(), &p.volume_weights), Mass { diag: p.node_weights() })
}

pub(crate) fn assemble_cells(n: usize, cells: &[Cell], weights: &[f64]) -> Stiffness {
    let nn = (n * n) as f64;
    // local 3x3 matrices per triangle, computed in parallel
    let locals: Vec<[[[f64; 3]; 3]; 2]> = cells
        .par_iter()
        .zip(weights.par_iter())
        .map(|(d, &w)| {
            let scale = 0.5 * w * nn;
            let mut out = [[[0.0; 3]; 3]; 2];
            for (t, (_, ex, ey)) in TRIANGLES.iter().enumerate() {
                for l in 0..3 {
                    for m in 0..3 {
                        out[t][l][m] = scale
                            * (d[0] * ex[l] * ex[m] + d[1] * (ex[l] * ey[m] + ey[l] * ex[m]) + d[2] * ey[l] * ey[m]);
                    }
                }
            }
            out
        })
        .collect();
    let mut stencil = vec![[0.0; 7]; n * n];
    for j in 0..n as i64 {
        for i in 0..n as i64 {
            let c = node(n, i, j);
            for (t, (verts, _, _)) in TRIANGLES.iter().enumerate() {
                for l in 0..3 {
                    let p = node(n, i + verts[l].0, j + verts[l].1);
                    for m in 0..3 {
                        let k = offset_index(verts[m].0 - verts[l].0, verts[m].1 - verts[l].1);
                        stencil[p][k] += locals[c][t][l][m];
                    }
                }
            }
        }
    }
    let neighbors = (0..n * n)
        .map(|p| {
            let (i, j) = ((p % n) as i64, (p / n) as i64);
            OFFSETS.map(|(dx, dy)| node(n, i + dx, j + dy))
        })
        .collect();
    Stiffness { n, stencil, neighbors }
}

/// `d/dt λ(g* + tD) = Σ_cells w (D, ½Σ_T du_T⊗du_T)` for a Mass-normalized
/// eigenvector `u`; by linearity this is `uᵀ S(D) u`.
pub fn eigenvalue_gradient(p: &DiscreteProblem, u: &[f64], direction: &[SymTensor]) -> Result<f64> {
    if direction.len() != p.n * p.n || u.len() != p.n * p.n {
        return Err(Error::Contract("direction or vector does not match the grid".into()));
    }
    let g = p.cross_gradient(u, u);
    Ok(direction
        .par_iter()
        .zip(g.par_iter().zip(p.volume_weights.par_iter()))
        .map(|(d, (gc, w))| w * cell_pair(&to_cell(d), gc))
        .sum())
}

/// Clips the eigenvalues of a 2×2 symmetric tensor at zero.
pub fn project_psd(c: &Cell) -> Cell {
    let (a, b, d) = (c[0], c[1], c[2]);
    let mean = 0.5 * (a + d);
    let rad = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    let (l1, l2) = (mean + rad, mean - rad);
    if l2 >= 0.0 {
        return *c;
    }
    if l1 <= 0.0 {
        return [0.0; 3];
    }
    // rank one: l1 v vᵀ with v the top eigenvector
    let (vx, vy) = if b.abs() > 1e-300 { (l1 - d, b) } else if a >= d { (1.0, 0.0) } else { (0.0, 1.0) };
    let norm = (vx * vx + vy * vy).sqrt();
    let (vx, vy) = (vx / norm, vy / norm);
    [l1 * vx * vx, l1 * vx * vy, l1 * vy * vy]
}

/// Rank of a 2×2 PSD tensor with relative tolerance `1e-9`.
pub fn cell_rank(c: &Cell) -> usize {
    let mean = 0.5 * (c[0] + c[2]);
    let rad = (0.25 * (c[0] - c[2]).powi(2) + c[1] * c[1]).sqrt();
    let top = mean + rad;
    if top <= 0.0 {
        0
    } else if mean - rad > 1e-9 * top {
        2
    } else {
        1
    }
}
