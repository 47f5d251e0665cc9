//! Sample-based verification of the primal/dual pair: shortness of a map,
//! the equality conditions, weak-duality certificates, Gram pairings and the
//! affine dimension of a map.
//!
//! All integrals here are quadratures against the normalized measure `dμ₁`
//! carried by the sample weights. Exact integrals are the business of the
//! family-specific modules ([`crate::torus`], [`crate::su2`]).

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{pair, Frame, SymTensor, Variance};

/// Finite map into `ℝᴺ` known at quadrature points.
#[derive(Debug, Clone)]
pub struct SampledMap {
    points: Vec<Vec<f64>>,
    values: Vec<Vec<f64>>,
    differentials: Option<Vec<DMatrix<f64>>>,
    weights: Vec<f64>,
    frame: Frame,
}

impl SampledMap {
    /// `values[p]` is `φ(points[p]) ∈ ℝᴺ`; `differentials[p]` is the `N × dim`
    /// matrix of frame derivatives at that point.
    pub fn new(
        points: Vec<Vec<f64>>,
        values: Vec<Vec<f64>>,
        differentials: Option<Vec<DMatrix<f64>>>,
        weights: Vec<f64>,
        frame: Frame,
    ) -> Result<Self> {
        let n = points.len();
        if values.len() != n || weights.len() != n {
            return Err(Error::Contract("points, values and weights differ in length".into()));
        }
        if n == 0 {
            return Err(Error::Contract("empty sample".into()));
        }
        let width = values[0].len();
        if values.iter().any(|v| v.len() != width) {
            return Err(Error::Contract("ragged map values".into()));
        }
        if weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(Error::Contract("negative quadrature weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Contract(format!("weights sum to {total}, expected 1")));
        }
        if let Some(d) = &differentials {
            if d.len() != n || d.iter().any(|j| j.nrows() != width) {
                return Err(Error::Contract("differentials do not match the values".into()));
            }
        }
        Ok(SampledMap { points, values, differentials, weights, frame })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn target_dim(&self) -> usize {
        self.values[0].len()
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn differentials(&self) -> Option<&[DMatrix<f64>]> {
        self.differentials.as_deref()
    }

    /// Scales values and differentials by `c`.
    pub fn scaled(&self, c: f64) -> SampledMap {
        let mut out = self.clone();
        for v in out.values.iter_mut() {
            v.iter_mut().for_each(|x| *x *= c);
        }
        if let Some(d) = out.differentials.as_mut() {
            d.iter_mut().for_each(|j| *j *= c);
        }
        out
    }

    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.target_dim()];
        for (v, w) in self.values.iter().zip(&self.weights) {
            for (mk, vk) in m.iter_mut().zip(v) {
                *mk += w * vk;
            }
        }
        m
    }

    /// `Σ w‖φ‖²`, the variance of a centered map.
    pub fn second_moment(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| w * v.iter().map(|x| x * x).sum::<f64>())
            .sum()
    }

    /// Pullback `(φ*h)_{ab} = Σ_k ∂_a u_k ∂_b u_k` at sample `p`.
    pub fn pullback_at(&self, p: usize) -> Result<SymTensor> {
        let d = self
            .differentials
            .as_ref()
            .ok_or_else(|| Error::Contract("map has no differentials".into()))?;
        let jac = &d[p];
        SymTensor::from_matrix(&(jac.transpose() * jac), Variance::Covariant, self.frame)
    }
}

/// A tensor field given either as one constant tensor or per sample point.
#[derive(Debug, Clone)]
pub enum TensorField {
    Constant(SymTensor),
    PerPoint(Vec<SymTensor>),
}

impl TensorField {
    pub fn at(&self, p: usize) -> &SymTensor {
        match self {
            TensorField::Constant(t) => t,
            TensorField::PerPoint(v) => &v[p],
        }
    }

    fn check_len(&self, n: usize) -> Result<()> {
        match self {
            TensorField::PerPoint(v) if v.len() != n => Err(Error::Contract(format!(
                "tensor field has {} entries for {n} sample points",
                v.len()
            ))),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub ok: bool,
    /// Shortness: the largest `-λ_min(h - φ*h)` seen (0 when all PSD).
    /// Equality: the largest `|(g*, h - φ*h)|` seen.
    pub worst: f64,
}

/// Tests `φ*h_{ℝᴺ} ≤ h` at every sample point.
pub fn shortness_check(phi: &SampledMap, h_field: &TensorField, tol: f64) -> Result<CheckReport> {
    h_field.check_len(phi.len())?;
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for p in 0..phi.len() {
        let h = h_field.at(p);
        let gap = h.sub(&phi.pullback_at(p)?)?;
        let min_eig = gap.eigenvalues()[0];
        ok &= min_eig >= -tol * h.max_abs_entry();
        worst = worst.max(-min_eig);
    }
    Ok(CheckReport { ok, worst })
}

/// Tests `(g*, h - φ*h) ≡ 0` at every sample point.
pub fn equality_condition_check(
    phi: &SampledMap,
    gstar_field: &TensorField,
    h_field: &TensorField,
    tol: f64,
) -> Result<CheckReport> {
    gstar_field.check_len(phi.len())?;
    h_field.check_len(phi.len())?;
    let mut worst: f64 = 0.0;
    for p in 0..phi.len() {
        let gap = h_field.at(p).sub(&phi.pullback_at(p)?)?;
        worst = worst.max(pair(gstar_field.at(p), &gap)?.abs());
    }
    Ok(CheckReport { ok: worst <= tol, worst })
}

/// Largest singular value of `dφ` measured against `h`, over all samples.
/// Dividing the map by this factor makes it short.
pub fn shortness_scale(phi: &SampledMap, h_field: &TensorField) -> Result<f64> {
    h_field.check_len(phi.len())?;
    let mut s2: f64 = 0.0;
    for p in 0..phi.len() {
        let pb = phi.pullback_at(p)?.matrix();
        let chol = Cholesky::new(h_field.at(p).matrix())
            .ok_or_else(|| Error::Contract("target metric is not positive definite".into()))?;
        let l = chol.l();
        let linv = l
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Contract("singular metric".into()))?;
        let m = &linv * pb * linv.transpose();
        let top = SymmetricEigen::new(m).eigenvalues.iter().fold(0.0_f64, |a, &b| a.max(b));
        s2 = s2.max(top);
    }
    Ok(s2.sqrt())
}

/// Outcome of the weak-duality inequality `var(φ) ≤ ∫(g*,h)dμ₁ / λ₁(dμ,g*)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualityCertificate {
    pub variance: f64,
    pub lambda1: f64,
    pub pairing_integral: f64,
    pub slack: f64,
    pub shortness_ok: bool,
    pub equality_ok: bool,
    pub worst_shortness_violation: f64,
    pub worst_equality_residual: f64,
}

/// Assembles a certificate; `slack = pairing_integral / lambda1 - variance`.
pub fn weak_duality_certificate(
    variance: f64,
    lambda1: f64,
    pairing_integral: f64,
    shortness_ok: bool,
    equality_ok: bool,
) -> Result<DualityCertificate> {
    if !(lambda1 > 0.0) {
        return Err(Error::DegenerateSpectrum(lambda1));
    }
    Ok(DualityCertificate {
        variance,
        lambda1,
        pairing_integral,
        slack: pairing_integral / lambda1 - variance,
        shortness_ok,
        equality_ok,
        worst_shortness_violation: 0.0,
        worst_equality_residual: 0.0,
    })
}

impl DualityCertificate {
    pub fn with_residuals(mut self, shortness: f64, equality: f64) -> Self {
        self.worst_shortness_violation = shortness;
        self.worst_equality_residual = equality;
        self
    }

    /// Dual objective `λ₁ / ∫(g*,h)dμ₁`.
    pub fn dual_objective(&self) -> f64 {
        self.lambda1 / self.pairing_integral
    }

    /// `var · λ₁ / pairing`; equals 1 exactly at a certified optimum.
    pub fn duality_product(&self) -> f64 {
        self.variance * self.dual_objective()
    }

    pub fn is_optimal(&self, tol: f64) -> bool {
        self.shortness_ok && self.equality_ok && self.slack.abs() <= tol
    }

    /// Re-derives the slack and checks the certificate invariants; returns
    /// the list of violated statements.
    pub fn consistency_violations(&self, tol: f64) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.lambda1 > 0.0) {
            out.push(format!("lambda1 = {} is not positive", self.lambda1));
            return out;
        }
        let slack = self.pairing_integral / self.lambda1 - self.variance;
        if (slack - self.slack).abs() > tol * slack.abs().max(1.0) {
            out.push(format!("stored slack {} differs from recomputed {}", self.slack, slack));
        }
        if self.shortness_ok && slack < -tol {
            out.push(format!("weak duality violated for a short map: slack {slack}"));
        }
        if self.equality_ok && slack.abs() > tol {
            out.push(format!("equality conditions claimed but slack is {slack}"));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GramPairings {
    /// `⟨I, X_φ⟩ = ∫‖φ‖² dμ₁`.
    pub trace_pairing: f64,
    /// `⟨-Δ, X_φ⟩ = ∫(g*, φ*h) dμ₁`.
    pub laplace_pairing: f64,
}

pub fn gram_pairings(phi: &SampledMap, gstar_field: &TensorField) -> Result<GramPairings> {
    gstar_field.check_len(phi.len())?;
    let mut laplace_pairing = 0.0;
    for (p, w) in phi.weights.iter().enumerate() {
        laplace_pairing += w * pair(gstar_field.at(p), &phi.pullback_at(p)?)?;
    }
    Ok(GramPairings { trace_pairing: phi.second_moment(), laplace_pairing })
}

/// Dimension of the smallest affine subspace containing the sampled image:
/// the rank of the centered Gram matrix `G_kl = Σ w (u_k - ū_k)(u_l - ū_l)`,
/// counting eigenvalues above `tol · max eigenvalue`.
pub fn map_dimension(phi: &SampledMap, tol: f64) -> usize {
    let n = phi.target_dim();
    let mean = phi.mean();
    let mut g = DMatrix::<f64>::zeros(n, n);
    for (v, w) in phi.values.iter().zip(&phi.weights) {
        for k in 0..n {
            let dk = v[k] - mean[k];
            for l in k..n {
                g[(k, l)] += w * dk * (v[l] - mean[l]);
            }
        }
    }
    for k in 0..n {
        for l in 0..k {
            g[(k, l)] = g[(l, k)];
        }
    }
    rank_psd(g, tol)
}

/// Numerical rank of a symmetric PSD matrix.
pub fn rank_psd(g: DMatrix<f64>, tol: f64) -> usize {
    if g.nrows() == 0 {
        return 0;
    }
    let ev = SymmetricEigen::new(g).eigenvalues;
    let top = ev.iter().fold(0.0_f64, |a, &b| a.max(b));
    if top <= 0.0 {
        return 0;
    }
    ev.iter().filter(|&&e| e > tol * top).count()
}
