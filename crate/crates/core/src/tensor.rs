//! Symmetric 2-tensors in a fixed frame, the metric/cometric pairing and
//! positive-semidefiniteness checks.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// Relative tolerance used for PSD decisions throughout the crate.
pub const PSD_TOL: f64 = 1e-9;

/// Covariant tensors are metrics (`h`), contravariant ones cometrics (`g*`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variance {
    Covariant,
    Contravariant,
}

/// Frame in which the components are expressed.
///
/// A covariant and a contravariant tensor can only be paired when they carry
/// the same tag; the tag names a frame together with its dual coframe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    /// `(dx, dy)` / `(∂x, ∂y)` on the unit-square chart of the torus.
    Torus,
    /// `(σ1, σ2, σ3)` / `(E1, E2, E3)` on SU(2).
    Su2,
    /// Coordinate frame of a grid cell of the discretized torus.
    Grid,
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Frame::Torus => write!(f, "(dx,dy)"),
            Frame::Su2 => write!(f, "(σ1,σ2,σ3)/(E1,E2,E3)"),
            Frame::Grid => write!(f, "grid-cell"),
        }
    }
}

/// Symmetric bilinear form of dimension 2 or 3, stored as its upper triangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymTensor {
    dim: usize,
    upper: [f64; 6],
    variance: Variance,
    frame: Frame,
}

fn slot(dim: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    // row-major upper triangle
    i * dim - i * (i + 1) / 2 + j
}

impl SymTensor {
    /// Builds a tensor from its upper triangle listed row by row
    /// (`[g00, g01, g11]` in dimension 2, `[g00, g01, g02, g11, g12, g22]` in 3).
    pub fn from_upper(dim: usize, upper: &[f64], variance: Variance, frame: Frame) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(Error::Contract(format!("tensor dimension must be 2 or 3, got {dim}")));
        }
        let len = dim * (dim + 1) / 2;
        if upper.len() != len {
            return Err(Error::Contract(format!(
                "expected {len} upper-triangle entries, got {}",
                upper.len()
            )));
        }
        if upper.iter().any(|x| !x.is_finite()) {
            return Err(Error::Contract("non-finite tensor entry".into()));
        }
        let mut store = [0.0; 6];
        store[..len].copy_from_slice(upper);
        Ok(SymTensor { dim, upper: store, variance, frame })
    }

    /// Reads the upper triangle of a square matrix; the lower triangle is ignored.
    pub fn from_matrix(m: &DMatrix<f64>, variance: Variance, frame: Frame) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Contract("matrix is not square".into()));
        }
        let dim = m.nrows();
        let mut upper = Vec::with_capacity(6);
        for i in 0..dim {
            for j in i..dim {
                upper.push(m[(i, j)]);
            }
        }
        Self::from_upper(dim, &upper, variance, frame)
    }

    pub fn diag(entries: &[f64], variance: Variance, frame: Frame) -> Result<Self> {
        let dim = entries.len();
        let mut m = DMatrix::zeros(dim, dim);
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        Self::from_matrix(&m, variance, frame)
    }

    pub fn identity(dim: usize, variance: Variance, frame: Frame) -> Result<Self> {
        Self::diag(&vec![1.0; dim], variance, frame)
    }

    pub fn zero(dim: usize, variance: Variance, frame: Frame) -> Result<Self> {
        Self::diag(&vec![0.0; dim], variance, frame)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn variance(&self) -> Variance {
        self.variance
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    /// Upper triangle, row by row.
    pub fn upper(&self) -> &[f64] {
        &self.upper[..self.dim * (self.dim + 1) / 2]
    }

    /// Same components, relabelled to another frame.
    pub fn with_frame(&self, frame: Frame) -> SymTensor {
        SymTensor { frame, ..*self }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.upper[slot(self.dim, i, j)]
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j))
    }

    pub fn max_abs_entry(&self) -> f64 {
        let len = self.dim * (self.dim + 1) / 2;
        self.upper[..len].iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn scale(&self, c: f64) -> SymTensor {
        let mut out = *self;
        for x in out.upper.iter_mut() {
            *x *= c;
        }
        out
    }

    fn check_compatible(&self, other: &SymTensor) -> Result<()> {
        if self.dim != other.dim || self.frame != other.frame {
            return Err(Error::Contract(format!(
                "incompatible tensors: dim {} in {} vs dim {} in {}",
                self.dim, self.frame, other.dim, other.frame
            )));
        }
        Ok(())
    }

    /// `self + c * other`; both tensors must have the same variance and frame.
    pub fn add_scaled(&self, c: f64, other: &SymTensor) -> Result<SymTensor> {
        self.check_compatible(other)?;
        if self.variance != other.variance {
            return Err(Error::Contract("cannot add a metric to a cometric".into()));
        }
        let mut out = *self;
        for (x, y) in out.upper.iter_mut().zip(other.upper.iter()) {
            *x += c * y;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &SymTensor) -> Result<SymTensor> {
        self.add_scaled(-1.0, other)
    }

    /// The inverse matrix with the opposite variance, e.g. `h ↦ h*`.
    pub fn dual(&self) -> Result<SymTensor> {
        let inv = self
            .matrix()
            .try_inverse()
            .ok_or_else(|| Error::DegenerateOperator("singular tensor has no dual".into()))?;
        let variance = match self.variance {
            Variance::Covariant => Variance::Contravariant,
            Variance::Contravariant => Variance::Covariant,
        };
        SymTensor::from_matrix(&inv, variance, self.frame)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let eig = SymmetricEigen::new(self.matrix());
        let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }
}

/// Pointwise pairing `(g*, h) = g^{ij} h_{ij}`.
pub fn pair(gstar: &SymTensor, h: &SymTensor) -> Result<f64> {
    if gstar.variance != Variance::Contravariant || h.variance != Variance::Covariant {
        return Err(Error::Contract("pair expects (cometric, metric)".into()));
    }
    gstar.check_compatible(h)?;
    let mut s = 0.0;
    for i in 0..gstar.dim {
        for j in 0..gstar.dim {
            s += gstar.get(i, j) * h.get(i, j);
        }
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsdReport {
    pub psd: bool,
    pub min_eigenvalue: f64,
}

/// PSD test with a threshold relative to the largest entry: the tensor passes
/// when its smallest eigenvalue is at least `-tol * max|S_ij|`.
pub fn psd_check(s: &SymTensor, tol: f64) -> PsdReport {
    let min_eigenvalue = s.eigenvalues()[0];
    let threshold = tol * s.max_abs_entry();
    PsdReport { psd: min_eigenvalue >= -threshold, min_eigenvalue }
}

/// Checks homogeneity of the pairing in each argument for a factor `c > 0`.
pub fn scaling_laws_check(gstar: &SymTensor, h: &SymTensor, c: f64) -> Result<bool> {
    if c <= 0.0 {
        return Err(Error::OutOfDomain(format!("scale factor must be positive, got {c}")));
    }
    let base = pair(gstar, h)?;
    let tol = 1e-14 * (c * base).abs().max(f64::MIN_POSITIVE);
    let left = pair(&gstar.scale(c), h)?;
    let right = pair(gstar, &h.scale(c))?;
    Ok((left - c * base).abs() <= tol && (right - c * base).abs() <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn co2(upper: &[f64]) -> SymTensor {
        SymTensor::from_upper(2, upper, Variance::Covariant, Frame::Torus).unwrap()
    }

    #[test]
    fn pair_identities() {
        let g = SymTensor::identity(2, Variance::Contravariant, Frame::Torus).unwrap();
        let h = SymTensor::identity(2, Variance::Covariant, Frame::Torus).unwrap();
        assert_eq!(pair(&g, &h).unwrap(), 2.0);
    }

    #[test]
    fn pair_equilateral_cometric_with_lattice_metric() {
        let h_el_star = co2(&[1.0, 0.5, 1.0]).dual().unwrap();
        let (a, b) = (0.5_f64, 3f64.sqrt() / 2.0);
        let hab = co2(&[1.0, a, a * a + b * b]);
        let expected = 4.0 / 3.0 * (1.0 - a + a * a + b * b);
        assert!((pair(&h_el_star, &hab).unwrap() - expected).abs() < 1e-14);
        assert!((expected - 2.0).abs() < 1e-14);
        for &(a, b) in &[(0.0, 1.0), (0.3, 1.2), (0.1, 2.5)] {
            let hab = co2(&[1.0, a, a * a + b * b]);
            let expected = 4.0 / 3.0 * (1.0 - a + a * a + b * b);
            assert!((pair(&h_el_star, &hab).unwrap() - expected).abs() < 1e-13);
        }
    }

    #[test]
    fn pair_su2_diagonal() {
        let (u, v, w, a, b, c) = (0.2, 0.7, 1.3, 0.25, 0.5, 2.0);
        let g = SymTensor::diag(&[u, v, w], Variance::Contravariant, Frame::Su2).unwrap();
        let h = SymTensor::diag(&[1.0 / a, 1.0 / b, 1.0 / c], Variance::Covariant, Frame::Su2).unwrap();
        assert!((pair(&g, &h).unwrap() - (u / a + v / b + w / c)).abs() < 1e-14);
    }

    #[test]
    fn pair_rejects_mismatches() {
        let g2 = SymTensor::identity(2, Variance::Contravariant, Frame::Torus).unwrap();
        let h3 = SymTensor::identity(3, Variance::Covariant, Frame::Su2).unwrap();
        assert!(matches!(pair(&g2, &h3), Err(Error::Contract(_))));
        let h_grid = SymTensor::identity(2, Variance::Covariant, Frame::Grid).unwrap();
        assert!(pair(&g2, &h_grid).is_err());
        let h2 = SymTensor::identity(2, Variance::Covariant, Frame::Torus).unwrap();
        assert!(pair(&h2, &g2).is_err());
    }

    #[test]
    fn psd_examples() {
        let r = psd_check(&co2(&[1.0, 0.0, 0.0]), PSD_TOL);
        assert!(r.psd);
        assert!(r.min_eigenvalue.abs() < 1e-15);

        let r = psd_check(&co2(&[1.0, 2.0, 1.0]), PSD_TOL);
        assert!(!r.psd);
        assert!((r.min_eigenvalue + 1.0).abs() < 1e-12);

        for &(a, b) in &[(0.0, 0.1), (0.5, 0.2), (0.3, 1.7)] {
            assert!(psd_check(&co2(&[1.0, a, a * a + b * b]), PSD_TOL).psd);
        }
    }

    #[test]
    fn upper_triangle_layout_3d() {
        let t = SymTensor::from_upper(3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0], Variance::Covariant, Frame::Su2)
            .unwrap();
        assert_eq!(t.get(0, 2), 3.0);
        assert_eq!(t.get(2, 0), 3.0);
        assert_eq!(t.get(1, 1), 4.0);
        assert_eq!(t.get(2, 1), 5.0);
        assert_eq!(t.get(2, 2), 6.0);
    }

    #[test]
    fn scaling_laws() {
        let g = co2(&[1.0, 0.5, 1.0]).dual().unwrap();
        let h = SymTensor::identity(2, Variance::Covariant, Frame::Torus).unwrap();
        assert!(scaling_laws_check(&g, &h, 1.0).unwrap());
        assert!(scaling_laws_check(&g, &h, 2.0).unwrap());
        assert!((pair(&g.scale(2.0), &h).unwrap() - 2.0 * pair(&g, &h).unwrap()).abs() < 1e-15);
        assert!(scaling_laws_check(&g, &h, 0.0).is_err());
    }
}
