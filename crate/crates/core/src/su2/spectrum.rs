use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::scalar::Scalar;
use super::zpoly::{laplacian, FPoly, ZPoly};
use crate::duality::rank_psd;
use crate::error::{Error, Result};
use crate::tensor::{Frame, SymTensor, Variance};

/// Relative tolerance for ties between the four eigenvalue expressions.
pub const TIE_TOL: f64 = 1e-12;
/// Rank tolerance of the moment Gram matrix, relative to its largest entry.
pub const RANK_TOL: f64 = 1e-10;

/// `u E₁⊗E₁ + v E₂⊗E₂ + w E₃⊗E₃`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeftInvariantCometric {
    pub u: f64,
    pub v: f64,
    pub w: f64,
}

impl LeftInvariantCometric {
    /// Requires nonnegative entries with at least two of them positive.
    pub fn new(u: f64, v: f64, w: f64) -> Result<Self> {
        if [u, v, w].iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::OutOfDomain(format!("cometric ({u}, {v}, {w}) must be nonnegative")));
        }
        if [u, v, w].iter().filter(|x| **x > 0.0).count() < 2 {
            return Err(Error::DegenerateOperator(format!(
                "cometric ({u}, {v}, {w}) has fewer than two positive entries"
            )));
        }
        Ok(LeftInvariantCometric { u, v, w })
    }

    pub fn entries(&self) -> [f64; 3] {
        [self.u, self.v, self.w]
    }

    pub fn tensor(&self) -> SymTensor {
        SymTensor::diag(&self.entries(), Variance::Contravariant, Frame::Su2).expect("3x3 diagonal")
    }

    pub fn scaled(&self, c: f64) -> Self {
        LeftInvariantCometric { u: c * self.u, v: c * self.v, w: c * self.w }
    }
}

/// The four eigenvalue expressions, named by the table row they come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TableRow {
    /// `u + v + w`: `ζ₁, ζ₂`.
    Linear,
    /// `4(v + w)`: `ζ₁² − ζ̄₂²`, `ζ₁ζ₂ + ζ̄₁ζ̄₂`.
    QuadraticVW,
    /// `4(w + u)`: `ζ₁² + ζ̄₂²`, `ζ₁ζ₂ − ζ̄₁ζ̄₂`.
    QuadraticWU,
    /// `4(u + v)`: `ζ₁ζ̄₂`, `ζ₁ζ̄₁ − ζ₂ζ̄₂`.
    QuadraticUV,
}

impl TableRow {
    pub const ALL: [TableRow; 4] =
        [TableRow::Linear, TableRow::QuadraticVW, TableRow::QuadraticWU, TableRow::QuadraticUV];

    pub fn eigenvalue<T: Scalar>(&self, u: &T, v: &T, w: &T) -> T {
        let four = T::from_ratio(4, 1);
        match self {
            TableRow::Linear => u.clone() + v.clone() + w.clone(),
            TableRow::QuadraticVW => four * (v.clone() + w.clone()),
            TableRow::QuadraticWU => four * (w.clone() + u.clone()),
            TableRow::QuadraticUV => four * (u.clone() + v.clone()),
        }
    }

    pub fn formula(&self) -> &'static str {
        match self {
            TableRow::Linear => "u+v+w",
            TableRow::QuadraticVW => "4(v+w)",
            TableRow::QuadraticWU => "4(w+u)",
            TableRow::QuadraticUV => "4(u+v)",
        }
    }

    /// The two complex eigenfunctions of the row, with display names.
    pub fn functions<T: Scalar>(&self) -> [(&'static str, ZPoly<T>); 2] {
        let (z1, z1b, z2, z2b) = (ZPoly::zeta1(), ZPoly::zeta1_bar(), ZPoly::zeta2(), ZPoly::zeta2_bar());
        match self {
            TableRow::Linear => [("z1", z1), ("z2", z2)],
            TableRow::QuadraticVW => [
                ("z1^2 - conj(z2)^2", &z1.pow(2) - &z2b.pow(2)),
                ("z1 z2 + conj(z1) conj(z2)", &(&z1 * &z2) + &(&z1b * &z2b)),
            ],
            TableRow::QuadraticWU => [
                ("z1^2 + conj(z2)^2", &z1.pow(2) + &z2b.pow(2)),
                ("z1 z2 - conj(z1) conj(z2)", &(&z1 * &z2) - &(&z1b * &z2b)),
            ],
            TableRow::QuadraticUV => [
                ("z1 conj(z2)", &z1 * &z2b),
                ("z1 conj(z1) - z2 conj(z2)", &(&z1 * &z1b) - &(&z2 * &z2b)),
            ],
        }
    }
}

impl fmt::Display for TableRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.formula())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenRowCheck {
    pub function: String,
    pub row: TableRow,
    pub eigenvalue: f64,
    /// `∫ |Δp − λp|² dμ₁`.
    pub residual: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenTableReport {
    pub u: f64,
    pub v: f64,
    pub w: f64,
    pub rows: Vec<EigenRowCheck>,
    pub all_ok: bool,
}

/// Verifies all eight table eigenfunctions for the cometric `(u, v, w)`,
/// in the coefficient field `T` (exact for rationals).
pub fn eigen_table_check<T: Scalar>(u: &T, v: &T, w: &T) -> EigenTableReport {
    let mut rows = Vec::with_capacity(8);
    for row in TableRow::ALL {
        let lambda = row.eigenvalue(u, v, w);
        for (name, p) in row.functions::<T>() {
            let diff = &laplacian([u, v, w], &p) - &p.scale_real(&lambda);
            let res = diff.norm_sq();
            let scale = p.coefficient_mass() * lambda.to_f64().abs().max(1.0).powi(2);
            rows.push(EigenRowCheck {
                function: name.to_string(),
                row,
                eigenvalue: lambda.to_f64(),
                residual: res.to_f64(),
                ok: res.negligible(scale),
            });
        }
    }
    let all_ok = rows.iter().all(|r| r.ok);
    EigenTableReport { u: u.to_f64(), v: v.to_f64(), w: w.to_f64(), rows, all_ok }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lambda1 {
    pub value: f64,
    pub multiplicity: usize,
    pub rows: Vec<TableRow>,
    /// Real and imaginary parts of the attaining eigenfunctions, zero parts
    /// dropped. They span the eigenspace but need not be independent.
    pub basis: Vec<FPoly>,
}

/// Real parts spanning the complex functions' real span.
pub fn real_parts(fs: &[FPoly]) -> Vec<FPoly> {
    let mut out = Vec::new();
    for f in fs {
        for part in [f.re(), f.im()] {
            if part.norm_sq() > 1e-28 * part.coefficient_mass().max(1.0) {
                out.push(part);
            }
        }
    }
    out
}

/// Moment Gram matrix `∫ fᵢ fⱼ dμ₁` of real-valued polynomials.
pub fn gram_matrix(fs: &[FPoly]) -> DMatrix<f64> {
    let n = fs.len();
    let mut g = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = (&fs[i] * &fs[j]).integrate().re;
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    g
}

/// First eigenvalue of `Δ_{g*}` on `SU(2)` from the degree ≤ 2 table, with
/// multiplicity the rank of the moment Gram matrix of all attaining
/// eigenfunctions.
pub fn lambda1_left_invariant(g: &LeftInvariantCometric) -> Result<Lambda1> {
    let g = LeftInvariantCometric::new(g.u, g.v, g.w)?;
    let vals: Vec<(TableRow, f64)> = TableRow::ALL.iter().map(|r| (*r, r.eigenvalue(&g.u, &g.v, &g.w))).collect();
    let value = vals.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
    let rows: Vec<TableRow> =
        vals.iter().filter(|(_, l)| *l - value <= TIE_TOL * value.abs()).map(|(r, _)| *r).collect();
    let complex: Vec<FPoly> = rows.iter().flat_map(|r| r.functions::<f64>().map(|(_, p)| p)).collect();
    let basis = real_parts(&complex);
    let multiplicity = rank_psd(gram_matrix(&basis), RANK_TOL);
    Ok(Lambda1 { value, multiplicity, rows, basis })
}

/// `λ₁` and multiplicity of the Berger metric `σ₁² + σ₂² + t²σ₃²`, whose
/// cometric is `(1, 1, 1/t²)`.
pub fn berger_lambda1(t: f64) -> Result<Lambda1> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::OutOfDomain(format!("Berger parameter t = {t} must be positive")));
    }
    lambda1_left_invariant(&LeftInvariantCometric::new(1.0, 1.0, 1.0 / (t * t))?)
}

/// Checks that a polynomial is a `λ`-eigenfunction on `S³` in floating
/// point.
pub fn is_eigenfunction(g: &LeftInvariantCometric, lambda: f64, p: &FPoly) -> bool {
    let diff = &laplacian([&g.u, &g.v, &g.w], p) - &p.scale(&Complex::new(lambda, 0.0));
    let scale = p.coefficient_mass() * lambda.abs().max(1.0).powi(2);
    diff.norm_sq() <= 1e-22 * scale.max(1.0)
}
