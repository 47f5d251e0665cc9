//! Certified solutions of the primal/dual pair for every flat metric.

use serde::{Deserialize, Serialize};

use super::lattice::{check_normalized, quadratic_form_levels};
use super::trig_map::{equilateral_metric, inflated_map_el, inflated_map_sq, lattice_metric, TrigMap};
use crate::duality::{
    equality_condition_check, map_dimension, shortness_check, weak_duality_certificate, DualityCertificate,
    TensorField,
};
use crate::error::Result;
use crate::tensor::{pair, SymTensor, PSD_TOL};

/// Sample grid for the pointwise checks; exact quadrature for the
/// first-harmonic maps used here.
const CHECK_GRID: usize = 16;

/// A certificate for a constant cometric plus the facts it was derived from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantCertificate {
    pub gstar: SymTensor,
    pub certificate: DualityCertificate,
    pub lambda1_multiplicity: usize,
    pub eigenfunctions_ok: bool,
}

/// Certifies a trigonometric map against a constant cometric on the
/// unit-square chart. `λ₁` comes from lattice enumeration, the variance from
/// Parseval, and the pointwise conditions from grid samples. The equality
/// flag requires both the pairing condition and that every component is a
/// first eigenfunction.
pub fn certify_constant(map: &TrigMap, gstar: &SymTensor, h: &SymTensor) -> Result<ConstantCertificate> {
    let g = [[gstar.get(0, 0), gstar.get(0, 1)], [gstar.get(1, 0), gstar.get(1, 1)]];
    let level = quadratic_form_levels(g, 1)?.remove(0);
    let lambda1 = level.0;
    let sampled = map.sample(CHECK_GRID)?;
    let h_field = TensorField::Constant(*h);
    let g_field = TensorField::Constant(*gstar);
    let short = shortness_check(&sampled, &h_field, PSD_TOL)?;
    let eq_tol = 1e-10 * h.max_abs_entry().max(1.0);
    let eq = equality_condition_check(&sampled, &g_field, &h_field, eq_tol)?;
    let eigenfunctions_ok = map.is_eigenmap(gstar, lambda1, 1e-12);
    let certificate = weak_duality_certificate(
        map.variance(),
        lambda1,
        pair(gstar, h)?,
        short.ok,
        eq.ok && eigenfunctions_ok,
    )?
    .with_residuals(short.worst, eq.worst);
    Ok(ConstantCertificate { gstar: *gstar, certificate, lambda1_multiplicity: level.1.len(), eigenfunctions_ok })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RectangularSolutions {
    /// `g* = h_SQ*` with the map `φ_b`.
    pub square: ConstantCertificate,
    /// `g* = h*_{a', √(1-a'²)}` for `a' = 0, 0.1, …, 0.5`, all with `φ_b`.
    pub family: Vec<(f64, ConstantCertificate)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusSolution {
    pub a: f64,
    pub b: f64,
    pub h: SymTensor,
    pub map: TrigMap,
    pub map_dimension: usize,
    /// The equilateral cometric `h_EL*` certificate, valid for every `(a, b)`.
    pub equilateral: ConstantCertificate,
    pub rectangular: Option<RectangularSolutions>,
}

/// Solves both problems for `(dμ_{h_{a,b}}, h_{a,b})` with `g* = h_EL*` and
/// `φ = φ_{a,b}`; rectangular lattices also get the square and arc-family
/// cometrics.
pub fn solve_pair(a: f64, b: f64) -> Result<TorusSolution> {
    check_normalized(a, b)?;
    let a = a.clamp(0.0, 0.5);
    let h = lattice_metric(a, b);
    let map = inflated_map_el(a, b)?;
    let equilateral = certify_constant(&map, &equilateral_metric().dual()?, &h)?;
    let map_dimension = map_dimension(&map.sample(CHECK_GRID)?, 1e-9);
    let rectangular = if a <= 1e-12 {
        let phi_b = inflated_map_sq(b)?;
        let square = certify_constant(&phi_b, &lattice_metric(0.0, 1.0).dual()?, &h)?;
        let family = (0..=5)
            .map(|i| {
                let ap = i as f64 / 10.0;
                let g = lattice_metric(ap, (1.0 - ap * ap).sqrt()).dual()?;
                Ok((ap, certify_constant(&phi_b, &g, &h)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Some(RectangularSolutions { square, family })
    } else {
        None
    };
    Ok(TorusSolution { a, b, h, map, map_dimension, equilateral, rectangular })
}
