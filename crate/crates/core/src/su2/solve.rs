use serde::{Deserialize, Serialize};

use super::landscape::{phi, phi_extended, phi_minimize, phi_projective_infimum, Region, FLAT_TOL};
use super::maps::{inflated_map, PolyMap};
use super::quadrature::S3Quadrature;
use super::spectrum::{is_eigenfunction, lambda1_left_invariant, LeftInvariantCometric, RANK_TOL};
use crate::duality::{
    equality_condition_check, shortness_check, weak_duality_certificate, DualityCertificate, TensorField,
};
use crate::error::{Error, Result};
use crate::tensor::{pair, Frame, SymTensor, Variance, PSD_TOL};

/// Relative tolerance for treating two metric parameters as equal.
const EQUAL_TOL: f64 = 1e-12;

/// The left-invariant metric `σ₁²/a + σ₂²/b + σ₃²/c`.
pub fn left_invariant_metric(a: f64, b: f64, c: f64) -> Result<SymTensor> {
    if ![a, b, c].iter().all(|x| *x > 0.0 && x.is_finite()) {
        return Err(Error::OutOfDomain(format!("metric parameters ({a}, {b}, {c}) must be positive")));
    }
    SymTensor::diag(&[1.0 / a, 1.0 / b, 1.0 / c], Variance::Covariant, Frame::Su2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Su2Branch {
    /// `a < b < c`: `g* = (0, 1/3, 1)`, `φ = φ_{p,q}` with both parts.
    Generic,
    /// Two smallest parameters equal (Berger `t ≤ 1` after rescaling).
    SmallBerger,
    /// Two largest parameters equal (Berger `t > 1`): `g* = (1, 1, 0)`, `φ₀`.
    LargeBerger,
}

/// A certified solution on `SU(2)` for a left-invariant metric.
#[derive(Debug, Clone, PartialEq)]
pub struct Su2Solution {
    pub branch: Su2Branch,
    /// Metric parameters in the solving frame, `a ≤ b ≤ c` except on the
    /// large Berger branch where the distinguished axis is moved to `σ₃`.
    pub frame_params: [f64; 3],
    /// `frame_params[i]` is the original parameter with index
    /// `permutation[i]`.
    pub permutation: [usize; 3],
    pub h: SymTensor,
    pub gstar: LeftInvariantCometric,
    /// `g*` in the original `E` frame.
    pub gstar_original: LeftInvariantCometric,
    pub map: PolyMap,
    pub map_dimension: usize,
    pub lambda1_multiplicity: usize,
    /// `h − φ*h`, constant and PSD.
    pub shortness_gap: SymTensor,
    pub eigenfunctions_ok: bool,
    pub certificate: DualityCertificate,
}

/// Certifies `map` against the constant cometric `g` and metric `h`:
/// `λ₁` and the variance by moments, shortness and the pairing condition
/// at quadrature points, and that every component is a first
/// eigenfunction.
pub fn certify_left_invariant(
    map: &PolyMap,
    g: &LeftInvariantCometric,
    h: &SymTensor,
) -> Result<(DualityCertificate, usize, bool)> {
    let l1 = lambda1_left_invariant(g)?;
    let sampled = map.sample(&S3Quadrature::default())?;
    let h_field = TensorField::Constant(*h);
    let g_field = TensorField::Constant(g.tensor());
    let short = shortness_check(&sampled, &h_field, PSD_TOL)?;
    let eq_tol = 1e-10 * h.max_abs_entry().max(1.0);
    let eq = equality_condition_check(&sampled, &g_field, &h_field, eq_tol)?;
    let eigen_ok = map.components().iter().all(|p| p.is_empty() || is_eigenfunction(g, l1.value, p));
    let cert = weak_duality_certificate(map.variance()?, l1.value, pair(&g.tensor(), h)?, short.ok, eq.ok && eigen_ok)?
        .with_residuals(short.worst, eq.worst);
    Ok((cert, l1.multiplicity, eigen_ok))
}

fn close(x: f64, y: f64) -> bool {
    (x - y).abs() <= EQUAL_TOL * x.abs().max(y.abs())
}

fn solve_in_frame(branch: Su2Branch, abc: [f64; 3], permutation: [usize; 3]) -> Result<Su2Solution> {
    let [a, b, c] = abc;
    let h = left_invariant_metric(a, b, c)?;
    let (gstar, map) = match branch {
        // p² = 1/c, p² + q² = 1/b, so φ*h = diag(1/b, 1/b, 1/c)
        Su2Branch::Generic | Su2Branch::SmallBerger => {
            let g = if branch == Su2Branch::Generic { [0.0, 1.0 / 3.0, 1.0] } else { [1.0 / 6.0, 1.0 / 6.0, 1.0] };
            let q2 = (1.0 / b - 1.0 / c).max(0.0);
            (LeftInvariantCometric::new(g[0], g[1], g[2])?, inflated_map((1.0 / c).sqrt(), q2.sqrt())?)
        }
        // h = (1/a)(σ₁² + σ₂²) + σ₃²/c with a < c, φ₀ scaled to σ₁, σ₂
        Su2Branch::LargeBerger => {
            (LeftInvariantCometric::new(1.0, 1.0, 0.0)?, inflated_map((1.0 / a).sqrt(), 0.0)?)
        }
    };
    let pb = map.pullback_left_invariant();
    let shortness_gap = h.sub(&pb.tensor)?;
    let (certificate, lambda1_multiplicity, eigenfunctions_ok) = certify_left_invariant(&map, &gstar, &h)?;
    let mut orig = [0.0; 3];
    for (i, &p) in permutation.iter().enumerate() {
        orig[p] = gstar.entries()[i];
    }
    Ok(Su2Solution {
        branch,
        frame_params: abc,
        permutation,
        h,
        gstar,
        gstar_original: LeftInvariantCometric { u: orig[0], v: orig[1], w: orig[2] },
        map_dimension: map.map_dimension(RANK_TOL),
        map,
        lambda1_multiplicity,
        shortness_gap,
        eigenfunctions_ok,
        certificate,
    })
}

/// Solves both problems for `(dμ, σ₁²/a + σ₂²/b + σ₃²/c)`.
///
/// The axes are permuted so that `a ≤ b ≤ c`; a permutation of `E₁, E₂, E₃`
/// (with a sign when odd) is an automorphism, so the certificate carries
/// over unchanged. With two equal parameters the problem is a rescaled
/// Berger sphere and is dispatched accordingly.
pub fn solve_left_invariant(a: f64, b: f64, c: f64) -> Result<Su2Solution> {
    left_invariant_metric(a, b, c)?;
    let params = [a, b, c];
    let mut perm = [0usize, 1, 2];
    perm.sort_by(|&i, &j| params[i].total_cmp(&params[j]));
    let [x, y, z] = perm.map(|i| params[i]);
    if close(y, z) && !close(x, y) {
        // distinguished smallest parameter moves to the σ₃ slot
        let p = [perm[1], perm[2], perm[0]];
        return solve_in_frame(Su2Branch::LargeBerger, [y, z, x], p);
    }
    let branch = if close(x, y) { Su2Branch::SmallBerger } else { Su2Branch::Generic };
    let (x, y) = if branch == Su2Branch::SmallBerger { (x, x) } else { (x, y) };
    solve_in_frame(branch, [x, y, z], perm)
}

/// Certified solution for the Berger metric `σ₁² + σ₂² + t²σ₃²`.
pub fn berger_certificate(t: f64) -> Result<Su2Solution> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::OutOfDomain(format!("Berger parameter t = {t} must be positive")));
    }
    let c = 1.0 / (t * t);
    if t <= 1.0 {
        solve_in_frame(Su2Branch::SmallBerger, [1.0, 1.0, c], [0, 1, 2])
    } else {
        solve_in_frame(Su2Branch::LargeBerger, [1.0, 1.0, c], [0, 1, 2])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BergerSet {
    /// `∂D₁`, the segment `u + v = 1/3`.
    BoundaryD1,
    /// All of `D₀`.
    D0,
    /// The boundary at infinity of `D₀`, realized as `h*_{1,v,0}`,
    /// `1/3 ≤ v ≤ 3`.
    BoundaryAtInfinity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BergerSolutionSet {
    pub a: f64,
    pub label: BergerSet,
    /// `(u, v, w, Φ)`.
    pub samples: Vec<[f64; 4]>,
    pub value: f64,
    pub spread: f64,
    pub global_min: f64,
    pub constant: bool,
    pub matches_global: bool,
}

/// The set of cometrics minimizing Φ for `h_{a,a,1}`, sampled at 50 points
/// and checked for constancy against the global minimum.
pub fn berger_solution_set(a: f64) -> Result<BergerSolutionSet> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::OutOfDomain(format!("Berger parameter a = {a} must be positive")));
    }
    let n = 50;
    let (label, samples, global_min) = if close(a, 1.0) {
        let s = (0..n)
            .map(|i| {
                let (u, v) = (0.35 + 0.3 * (i % 10) as f64, 0.35 + 0.3 * (i / 10) as f64);
                debug_assert_eq!(super::landscape::region(u, v), Region::D0);
                Ok([u, v, 1.0, phi(u, v, a, a)?])
            })
            .collect::<Result<Vec<_>>>()?;
        (BergerSet::D0, s, phi_minimize(a, a, 100, 100)?.value)
    } else if a < 1.0 {
        let s = (0..n)
            .map(|i| {
                let u = i as f64 / (n - 1) as f64 / 3.0;
                let v = 1.0 / 3.0 - u;
                Ok([u, v, 1.0, phi(u, v, a, a)?])
            })
            .collect::<Result<Vec<_>>>()?;
        (BergerSet::BoundaryD1, s, phi_minimize(a, a, 100, 100)?.value)
    } else {
        let s = (0..n)
            .map(|i| {
                let v = 1.0 / 3.0 + (3.0 - 1.0 / 3.0) * i as f64 / (n - 1) as f64;
                Ok([1.0, v, 0.0, phi_extended([1.0, v, 0.0], [a, a, 1.0])?])
            })
            .collect::<Result<Vec<_>>>()?;
        (BergerSet::BoundaryAtInfinity, s, phi_projective_infimum([a, a, 1.0], 60)?.value)
    };
    let lo = samples.iter().map(|s| s[3]).fold(f64::INFINITY, f64::min);
    let hi = samples.iter().map(|s| s[3]).fold(f64::NEG_INFINITY, f64::max);
    let value = samples[0][3];
    Ok(BergerSolutionSet {
        a,
        label,
        samples,
        value,
        spread: hi - lo,
        global_min,
        constant: hi - lo <= FLAT_TOL,
        matches_global: (value - global_min).abs() <= FLAT_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generic_example() {
        let s = solve_left_invariant(0.25, 0.5, 1.0).unwrap();
        assert_eq!(s.branch, Su2Branch::Generic);
        let c = s.certificate;
        assert!((c.variance - 1.25).abs() < 1e-14);
        assert!((c.dual_objective() - 0.8).abs() < 1e-14);
        assert!(c.is_optimal(1e-12), "{c:?}");
        assert_eq!(s.map_dimension, 7);
        assert_eq!(s.lambda1_multiplicity, 7);
        let gap = s.shortness_gap;
        assert!((gap.get(0, 0) - 2.0).abs() < 1e-13 && gap.get(1, 1).abs() < 1e-13 && gap.get(2, 2).abs() < 1e-13);
    }

    #[test]
    fn permuted_parameters_reuse_the_solution() {
        let s = solve_left_invariant(1.0, 0.25, 0.5).unwrap();
        assert_eq!(s.permutation, [1, 2, 0]);
        assert!((s.certificate.variance - 1.25).abs() < 1e-14);
        let g = s.gstar_original;
        assert_eq!((g.u, g.v, g.w), (1.0, 0.0, 1.0 / 3.0));
    }

    #[test]
    fn berger_branches() {
        for t in [0.1, 0.3, 1.0 / 6f64.sqrt(), 0.7, 1.0] {
            let s = berger_certificate(t).unwrap();
            assert_eq!(s.branch, Su2Branch::SmallBerger);
            assert!((s.certificate.variance - (1.0 + 3.0 * t * t) / 4.0).abs() < 1e-14);
            assert!(s.certificate.is_optimal(1e-12), "t = {t}: {:?}", s.certificate);
            assert_eq!(s.map_dimension, if t < 1.0 { 7 } else { 4 });
        }
        for t in [1.5, 3.0] {
            let s = berger_certificate(t).unwrap();
            assert_eq!(s.branch, Su2Branch::LargeBerger);
            assert!((s.certificate.variance - 1.0).abs() < 1e-14);
            assert!((s.certificate.lambda1 - 2.0).abs() < 1e-14);
            assert!(s.certificate.is_optimal(1e-12));
            assert_eq!(s.map_dimension, 4);
        }
    }

    #[test]
    fn dispatch_of_equal_parameters() {
        assert_eq!(solve_left_invariant(0.5, 0.5, 2.0).unwrap().branch, Su2Branch::SmallBerger);
        let s = solve_left_invariant(0.5, 2.0, 2.0).unwrap();
        assert_eq!(s.branch, Su2Branch::LargeBerger);
        assert!(s.certificate.is_optimal(1e-12));
        assert!(solve_left_invariant(0.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn berger_sets() {
        let s = berger_solution_set(0.25).unwrap();
        assert_eq!(s.label, BergerSet::BoundaryD1);
        assert!(s.constant && s.matches_global, "{s:?}");
        assert!((s.value - 1.75).abs() < 1e-12);
        let s = berger_solution_set(1.0).unwrap();
        assert_eq!(s.label, BergerSet::D0);
        assert!(s.constant && s.matches_global && (s.value - 1.0).abs() < 1e-12);
        let s = berger_solution_set(4.0).unwrap();
        assert_eq!(s.label, BergerSet::BoundaryAtInfinity);
        assert!(s.constant && s.matches_global && (s.value - 0.25).abs() < 1e-12);
    }
}
