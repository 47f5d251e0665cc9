use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::quadrature::S3Quadrature;
use super::spectrum::gram_matrix;
use super::scalar::Scalar;
use super::zpoly::{FPoly, QPoly};
use crate::duality::{rank_psd, SampledMap};
use crate::error::{Error, Result};
use crate::tensor::{Frame, SymTensor, Variance};

/// Tolerance for the zero-mean and constancy tests, relative to the
/// coefficient size.
const MOMENT_TOL: f64 = 1e-12;

/// A map `S³ → ℝᴺ` with real-valued polynomial components.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMap {
    components: Vec<FPoly>,
}

/// The constant pullback `φ*h_{ℝᴺ}` in the `σ` frame, with the largest
/// `L²` deviation of any entry from its mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeftInvariantPullback {
    pub tensor: SymTensor,
    pub max_variation: f64,
    pub constant: bool,
}

impl PolyMap {
    pub fn new(components: Vec<FPoly>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Contract("map needs at least one component".into()));
        }
        for (k, c) in components.iter().enumerate() {
            if !c.is_real() {
                return Err(Error::Contract(format!("component {k} is not real-valued on S3")));
            }
        }
        Ok(PolyMap { components })
    }

    /// `φ₀ = (Re ζ₁, Im ζ₁, Re ζ₂, Im ζ₂)`.
    pub fn tautological() -> Self {
        let (z1, z2) = (FPoly::zeta1(), FPoly::zeta2());
        PolyMap { components: vec![z1.re(), z1.im(), z2.re(), z2.im()] }
    }

    /// `φ₁ = (Re ζ₁ζ̄₂, Im ζ₁ζ̄₂, (|ζ₁|² − |ζ₂|²)/2)`.
    pub fn hopf() -> Self {
        let z = &FPoly::zeta1() * &FPoly::zeta2_bar();
        let r1 = &FPoly::zeta1() * &FPoly::zeta1_bar();
        let r2 = &FPoly::zeta2() * &FPoly::zeta2_bar();
        PolyMap { components: vec![z.re(), z.im(), (&r1 - &r2).scale_real(&0.5)] }
    }

    pub fn components(&self) -> &[FPoly] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn scaled(&self, c: f64) -> Self {
        PolyMap { components: self.components.iter().map(|p| p.scale_real(&c)).collect() }
    }

    /// Direct sum `self ⊕ other`.
    pub fn concat(&self, other: &PolyMap) -> Self {
        let mut components = self.components.clone();
        components.extend(other.components.iter().cloned());
        PolyMap { components }
    }

    pub fn means(&self) -> Vec<f64> {
        self.components.iter().map(|p| p.integrate().re).collect()
    }

    /// `Σ_k ∫ u_k² dμ₁`; the components must have zero mean.
    pub fn variance(&self) -> Result<f64> {
        for (k, (p, m)) in self.components.iter().zip(self.means()).enumerate() {
            if m.abs() > MOMENT_TOL * p.coefficient_mass().sqrt().max(1.0) {
                return Err(Error::NonzeroMean { component: k, mean: m });
            }
        }
        Ok(self.components.iter().map(|p| p.norm_sq()).sum())
    }

    /// `(φ*h)_{ab} = Σ_k (Eₐu_k)(E_b u_k)`, checked for constancy on `S³`
    /// by exact moments.
    pub fn pullback_left_invariant(&self) -> LeftInvariantPullback {
        let grads: Vec<[QPoly; 3]> = self
            .components
            .iter()
            .map(|p| {
                let q = p.to_rational();
                [q.derive(1), q.derive(2), q.derive(3)]
            })
            .collect();
        let mut m = DMatrix::zeros(3, 3);
        let mut max_variation: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for a in 0..3 {
            for b in a..3 {
                let entry = grads.iter().fold(QPoly::zero(), |acc, g| &acc + &(&g[a] * &g[b]));
                let c = entry.integrate();
                let dev = (&entry - &QPoly::constant(c.clone())).norm_sq();
                let c = Scalar::to_f64(&c.re);
                max_variation = max_variation.max(Scalar::to_f64(&dev).max(0.0).sqrt());
                scale = scale.max(c.abs());
                m[(a, b)] = c;
                m[(b, a)] = c;
            }
        }
        let tensor = SymTensor::from_matrix(&m, Variance::Covariant, Frame::Su2).expect("3x3 symmetric");
        LeftInvariantPullback { tensor, max_variation, constant: max_variation <= MOMENT_TOL * scale.max(1.0) }
    }

    /// Centered moment Gram matrix `∫ (u_k − ū_k)(u_l − ū_l) dμ₁`.
    pub fn gram(&self) -> DMatrix<f64> {
        let mut g = gram_matrix(&self.components);
        let m = self.means();
        for k in 0..m.len() {
            for l in 0..m.len() {
                g[(k, l)] -= m[k] * m[l];
            }
        }
        g
    }

    /// Affine dimension of the image, as the rank of [`PolyMap::gram`].
    pub fn map_dimension(&self, tol: f64) -> usize {
        rank_psd(self.gram(), tol)
    }

    /// Values and `E`-frame differentials at the quadrature points. Points
    /// are stored as `(Re ζ₁, Im ζ₁, Re ζ₂, Im ζ₂)`.
    pub fn sample(&self, quad: &S3Quadrature) -> Result<SampledMap> {
        let grads: Vec<[FPoly; 3]> =
            self.components.iter().map(|p| [p.derive(1), p.derive(2), p.derive(3)]).collect();
        let n = self.components.len();
        let mut points = Vec::with_capacity(quad.len());
        let mut values = Vec::with_capacity(quad.len());
        let mut diffs = Vec::with_capacity(quad.len());
        for &(z1, z2) in &quad.points {
            points.push(vec![z1.re, z1.im, z2.re, z2.im]);
            values.push(self.components.iter().map(|p| p.eval(z1, z2).re).collect());
            let mut d = DMatrix::zeros(n, 3);
            for (k, g) in grads.iter().enumerate() {
                for a in 0..3 {
                    d[(k, a)] = g[a].eval(z1, z2).re;
                }
            }
            diffs.push(d);
        }
        SampledMap::new(points, values, Some(diffs), quad.weights.clone(), Frame::Su2)
    }
}

/// `φ_{p,q} = p φ₀ ⊕ q φ₁`, always with seven components.
pub fn inflated_map(p: f64, q: f64) -> Result<PolyMap> {
    if !(p >= 0.0 && q >= 0.0 && p.is_finite() && q.is_finite()) {
        return Err(Error::OutOfDomain(format!("inflation weights ({p}, {q}) must be nonnegative")));
    }
    Ok(PolyMap::tautological().scaled(p).concat(&PolyMap::hopf().scaled(q)))
}

pub fn pullback_left_invariant(m: &PolyMap) -> LeftInvariantPullback {
    m.pullback_left_invariant()
}
