use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::eigen::{lambda1_discrete_with, EigenOptions, EigenPair};
use super::problem::{assemble, cell_pair, to_cell, Cell, DiscreteProblem};
use crate::error::{Error, Result};

/// Default acceptance threshold on `residual / ‖h‖²_F`.
pub const CERTIFICATE_TOL: f64 = 1e-2;

/// `Q`, the components `φ_k = Σ_j B_kj u_j` with `Q = BᵀB`, and the
/// attained value of `Σ_cells w · ½Σ_T ‖h − Σ Q_ij sym(duᵢ⊗duⱼ)‖²_F`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NadirashviliCertificate {
    pub cluster_size: usize,
    pub cluster: Vec<f64>,
    #[serde(with = "matrix_rows")]
    pub q: DMatrix<f64>,
    #[serde(skip)]
    pub components: Vec<Vec<f64>>,
    pub residual: f64,
    pub relative_residual: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrimalBound {
    pub variance: f64,
    /// Largest stretch `sup |dφ(v)|² / h(v, v)` over the triangles.
    pub stretch: f64,
    /// Variance of the rescaled map `φ / √stretch`.
    pub bound: f64,
    /// `Σ w (g*, h) / λ₁`.
    pub dual_value: f64,
    pub gap: f64,
    pub relative_gap: f64,
}

mod matrix_rows {
    use nalgebra::DMatrix;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &DMatrix<f64>, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> = (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DMatrix<f64>, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != m) {
            return Err(serde::de::Error::custom("ragged matrix"));
        }
        Ok(DMatrix::from_fn(n, m, |i, j| rows[i][j]))
    }
}

/// `sym(a ⊗ b)` as a cell.
fn sym(a: &[f64; 2], b: &[f64; 2]) -> Cell {
    [a[0] * b[0], 0.5 * (a[0] * b[1] + a[1] * b[0]), a[1] * b[1]]
}

/// Per-triangle `sym(duᵢ⊗duⱼ)` for `i ≤ j`, with the quadrature weight `w/2`.
struct TriangleData {
    weight: Vec<f64>,
    pairs: Vec<Vec<Cell>>,
}

fn triangle_data(p: &DiscreteProblem, us: &[&[f64]]) -> TriangleData {
    let grads: Vec<Vec<[[f64; 2]; 2]>> = us.iter().map(|u| p.triangle_gradients(u)).collect();
    let cells = p.n() * p.n();
    let m = us.len();
    let mut weight = Vec::with_capacity(2 * cells);
    let mut pairs = vec![Vec::with_capacity(2 * cells); m * (m + 1) / 2];
    for c in 0..cells {
        for t in 0..2 {
            weight.push(0.5 * p.volume_weights()[c]);
            let mut idx = 0;
            for i in 0..m {
                for j in i..m {
                    pairs[idx].push(sym(&grads[i][c][t], &grads[j][c][t]));
                    idx += 1;
                }
            }
        }
    }
    TriangleData { weight, pairs }
}

fn upper_index(m: usize) -> Vec<(usize, usize)> {
    (0..m).flat_map(|i| (i..m).map(move |j| (i, j))).collect()
}

/// Coefficient of `q_ij` in `Σ Q_ij sym(duᵢ⊗duⱼ)` for symmetric `Q`.
fn multiplicity(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        2.0
    }
}

fn to_matrix(q: &DVector<f64>, m: usize) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(m, m);
    for (k, (i, j)) in upper_index(m).into_iter().enumerate() {
        out[(i, j)] = q[k];
        out[(j, i)] = q[k];
    }
    out
}

fn to_vector(q: &DMatrix<f64>) -> DVector<f64> {
    let m = q.nrows();
    DVector::from_iterator(m * (m + 1) / 2, upper_index(m).into_iter().map(|(i, j)| q[(i, j)]))
}

fn project_psd(q: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new((q + q.transpose()) * 0.5);
    let d = eig.eigenvalues.map(|e| e.max(0.0));
    &eig.eigenvectors * DMatrix::from_diagonal(&d) * eig.eigenvectors.transpose()
}

/// Least-squares fit of `h` by `Σ Q_ij sym(duᵢ⊗duⱼ)` over PSD `Q`.
///
/// Returns `(Q, residual)`. The unconstrained minimizer is tried first;
/// when it is not PSD the fit is refined by accelerated projected gradient.
pub fn fit_gram(p: &DiscreteProblem, us: &[&[f64]]) -> (DMatrix<f64>, f64) {
    let m = us.len();
    let data = triangle_data(p, us);
    let hc = to_cell(p.h());
    let idx = upper_index(m);
    let dim = idx.len();
    // residual(q) = qᵀKq − 2bᵀq + ‖h‖²
    let mut k = DMatrix::zeros(dim, dim);
    let mut b = DVector::zeros(dim);
    for a in 0..dim {
        let ma = multiplicity(idx[a].0, idx[a].1);
        b[a] = ma * data.pairs[a].iter().zip(&data.weight).map(|(x, w)| w * cell_pair(x, &hc)).sum::<f64>();
        for c in a..dim {
            let mc = multiplicity(idx[c].0, idx[c].1);
            let v: f64 =
                data.pairs[a].iter().zip(&data.pairs[c]).zip(&data.weight).map(|((x, y), w)| w * cell_pair(x, y)).sum();
            k[(a, c)] = ma * mc * v;
            k[(c, a)] = ma * mc * v;
        }
    }
    let h2 = cell_pair(&hc, &hc);
    let residual = |q: &DVector<f64>| ((q.transpose() * &k * q)[0] - 2.0 * b.dot(q) + h2).max(0.0);

    let eig = SymmetricEigen::new(k.clone());
    let top = eig.eigenvalues.iter().fold(0.0_f64, |a, e| a.max(*e));
    let cut = 1e-13 * top;
    let inv = eig.eigenvalues.map(|e| if e > cut { 1.0 / e } else { 0.0 });
    let coords = eig.eigenvectors.transpose() * &b;
    let q0 = to_matrix(&(&eig.eigenvectors * coords.component_mul(&inv)), m);
    let min_eig = SymmetricEigen::new(q0.clone()).eigenvalues.iter().fold(f64::INFINITY, |a, e| a.min(*e));
    if min_eig >= -1e-12 * q0.norm() {
        let q = project_psd(&q0);
        let r = residual(&to_vector(&q));
        return (q, r);
    }
    let step = if top > 0.0 { 0.5 / top } else { 1.0 };
    let mut q = project_psd(&q0);
    let mut y = q.clone();
    let mut t = 1.0_f64;
    for _ in 0..20_000 {
        let yv = to_vector(&y);
        let g = (&k * &yv - &b) * 2.0;
        // gradient in vector coordinates maps back with the off-diagonal weight
        let mut gm = to_matrix(&g, m);
        for i in 0..m {
            for j in 0..m {
                if i != j {
                    gm[(i, j)] *= 0.5;
                }
            }
        }
        let next = project_psd(&(&y - gm * step));
        let tn = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let diff = (&next - &q).norm();
        y = &next + (&next - &q) * ((t - 1.0) / tn);
        q = next;
        t = tn;
        if diff <= 1e-14 * q.norm().max(1.0) {
            break;
        }
    }
    let r = residual(&to_vector(&q));
    (q, r)
}

/// Builds `h ≈ Σ du_k⊗du_k` from the first-eigenvalue cluster of `p`.
///
/// The cluster consists of the eigenvalues within `cluster_tol · λ₁` of
/// `λ₁`, searched among the lowest `max_cluster` eigenpairs. The
/// certificate fails when the cluster has fewer than three members or
/// the relative residual exceeds `residual_tol`.
pub fn nadirashvili_certificate(
    p: &DiscreteProblem,
    cluster_tol: f64,
    max_cluster: usize,
    residual_tol: f64,
    eigen: &EigenOptions,
) -> Result<NadirashviliCertificate> {
    let (s, m) = assemble(p);
    let pairs = lambda1_discrete_with(&s, &m, max_cluster.max(1), eigen, None)?;
    Ok(certificate_from_pairs(p, &pairs, cluster_tol, residual_tol))
}

/// [`nadirashvili_certificate`] from precomputed eigenpairs.
pub fn certificate_from_pairs(
    p: &DiscreteProblem,
    pairs: &[EigenPair],
    cluster_tol: f64,
    residual_tol: f64,
) -> NadirashviliCertificate {
    let l1 = pairs[0].lambda;
    let cluster: Vec<&EigenPair> = pairs.iter().filter(|e| e.lambda <= l1 + cluster_tol * l1.abs()).collect();
    let us: Vec<&[f64]> = cluster.iter().map(|e| e.vector.as_slice()).collect();
    let (q, residual) = fit_gram(p, &us);
    let h2 = cell_pair(&to_cell(p.h()), &to_cell(p.h()));
    let relative_residual = residual / h2;

    let eig = SymmetricEigen::new(q.clone());
    let top = eig.eigenvalues.iter().fold(0.0_f64, |a, e| a.max(*e));
    let mut components = Vec::new();
    for (k, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam > 1e-12 * top {
            let col = eig.eigenvectors.column(k);
            let scale = lam.sqrt();
            let mut phi = vec![0.0; p.nodes()];
            for (j, u) in us.iter().enumerate() {
                let c = scale * col[j];
                phi.iter_mut().zip(u.iter()).for_each(|(x, v)| *x += c * v);
            }
            components.push(phi);
        }
    }
    let ok = cluster.len() >= 3 && relative_residual <= residual_tol;
    NadirashviliCertificate {
        cluster_size: cluster.len(),
        cluster: cluster.iter().map(|e| e.lambda).collect(),
        q,
        components,
        residual,
        relative_residual,
        ok,
    }
}

/// Largest `|dφ(v)|² / h(v, v)` over all triangles.
pub fn max_stretch(p: &DiscreteProblem, components: &[Vec<f64>]) -> f64 {
    let hc = to_cell(p.h());
    // h⁻¹ for the generalized eigenproblem P v = s h v
    let det = hc[0] * hc[2] - hc[1] * hc[1];
    let hinv = [hc[2] / det, -hc[1] / det, hc[0] / det];
    let cells = p.n() * p.n();
    let mut pull = vec![[[0.0; 3]; 2]; cells];
    for u in components {
        for (c, g) in p.triangle_gradients(u).iter().enumerate() {
            for t in 0..2 {
                let s = sym(&g[t], &g[t]);
                for k in 0..3 {
                    pull[c][t][k] += s[k];
                }
            }
        }
    }
    pull.iter()
        .flatten()
        .map(|pc| {
            // eigenvalues of h⁻¹P
            let a = hinv[0] * pc[0] + hinv[1] * pc[1];
            let b = hinv[0] * pc[1] + hinv[1] * pc[2];
            let c = hinv[1] * pc[0] + hinv[2] * pc[1];
            let d = hinv[1] * pc[1] + hinv[2] * pc[2];
            let tr = a + d;
            let disc = ((a - d) * (a - d) + 4.0 * b * c).max(0.0);
            0.5 * (tr + disc.sqrt())
        })
        .fold(0.0, f64::max)
}

/// Variance of the candidate map after rescaling it to be `h`-short,
/// compared with the dual value `Σ w (g*, h) / λ₁`.
///
/// Components are centered in the Mass inner product first. Discrete weak
/// duality makes `gap ≥ 0` up to rounding.
pub fn primal_lower_bound(components: &[Vec<f64>], p: &DiscreteProblem, lambda1: f64) -> Result<PrimalBound> {
    if components.iter().any(|c| c.len() != p.nodes()) {
        return Err(Error::Contract("component length does not match the grid".into()));
    }
    if !(lambda1 > 0.0) {
        return Err(Error::DegenerateOperator("first eigenvalue must be positive".into()));
    }
    let mass = p.node_weights();
    let centered: Vec<Vec<f64>> = components
        .iter()
        .map(|c| {
            let mean: f64 = c.iter().zip(&mass).map(|(x, w)| x * w).sum();
            c.iter().map(|x| x - mean).collect()
        })
        .collect();
    let variance: f64 = centered.iter().map(|c| c.iter().zip(&mass).map(|(x, w)| w * x * x).sum::<f64>()).sum();
    let stretch = max_stretch(p, &centered);
    let bound = if stretch > 0.0 { variance / stretch } else { 0.0 };
    let dual_value = p.pairing() / lambda1;
    let gap = dual_value - bound;
    Ok(PrimalBound { variance, stretch, bound, dual_value, gap, relative_gap: gap / dual_value })
}

/// λ₁ and its eigenpairs for `p`.
pub fn lambda1_of(p: &DiscreteProblem, k: usize, eigen: &EigenOptions) -> Result<Vec<EigenPair>> {
    let (s, m) = assemble(p);
    lambda1_discrete_with(&s, &m, k, eigen, None)
}
