//! Rank-2 lattices, their duals and the Laplace spectrum of the flat torus
//! `ℝ²/Γ`, whose eigenvalues are `4π²‖γ*‖²` for `γ*` in the dual lattice.

use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Exact rationals used for exact eigenvalue grouping.
pub type Rational = Ratio<i128>;

/// Slack on the normalized-domain inequalities, sized for parameters given
/// as 7-digit decimals (e.g. `b = 0.8660254`).
pub const DOMAIN_SLACK: f64 = 1e-7;

/// Relative tolerance when grouping floating-point norms into levels.
pub const LEVEL_REL_TOL: f64 = 1e-12;

const FOUR_PI_SQ: f64 = 4.0 * PI * PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lattice2 {
    pub v1: [f64; 2],
    pub v2: [f64; 2],
    pub normalized: bool,
}

impl Lattice2 {
    pub fn new(v1: [f64; 2], v2: [f64; 2]) -> Result<Self> {
        let det = det2(v1, v2);
        if !(det.abs() > 1e-14 * norm(v1) * norm(v2)) {
            return Err(Error::DegenerateBasis(det));
        }
        Ok(Lattice2 { v1, v2, normalized: false })
    }

    /// The lattice `ℤ(1,0) ⊕ ℤ(a,b)` with `0 ≤ a ≤ 1/2`, `b ≥ √(1-a²)`.
    pub fn normalized(a: f64, b: f64) -> Result<Self> {
        check_normalized(a, b)?;
        Ok(Lattice2 { v1: [1.0, 0.0], v2: [a, b], normalized: true })
    }
}

/// Rejects `(a, b)` outside `0 ≤ a ≤ 1/2`, `b ≥ √(1-a²)` (up to [`DOMAIN_SLACK`]).
pub fn check_normalized(a: f64, b: f64) -> Result<()> {
    let ok = a.is_finite()
        && b.is_finite()
        && a >= -DOMAIN_SLACK
        && a <= 0.5 + DOMAIN_SLACK
        && b >= (1.0 - a * a).max(0.0).sqrt() - DOMAIN_SLACK;
    if ok {
        Ok(())
    } else {
        Err(Error::OutOfDomain(format!(
            "(a, b) = ({a}, {b}) is not normalized: need 0 <= a <= 1/2 and b >= sqrt(1 - a^2)"
        )))
    }
}

fn dot(u: [f64; 2], v: [f64; 2]) -> f64 {
    u[0] * v[0] + u[1] * v[1]
}

fn norm(u: [f64; 2]) -> f64 {
    dot(u, u).sqrt()
}

fn det2(u: [f64; 2], v: [f64; 2]) -> f64 {
    u[0] * v[1] - u[1] * v[0]
}

/// Result of bringing a basis to the normalized form `(1,0), (a,b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizedLattice {
    pub a: f64,
    pub b: f64,
    /// Rows express the reduced basis in the input basis (unimodular).
    pub basis_change: [[i64; 2]; 2],
    /// Length of the shortest vector; the lattice is divided by it.
    pub scale: f64,
    /// Angle of the shortest vector, undone by a rotation.
    pub rotation: f64,
    /// Whether a reflection `y ↦ -y` was applied after the rotation.
    pub reflected: bool,
}

/// Gauss-reduces the basis, then rotates, reflects and rescales so that the
/// shortest vector is `(1,0)` and the second lies in the fundamental domain.
pub fn normalize_lattice(v1: [f64; 2], v2: [f64; 2]) -> Result<NormalizedLattice> {
    Lattice2::new(v1, v2)?;
    let (mut u, mut w) = (v1, v2);
    let (mut ru, mut rw) = ([1_i64, 0], [0_i64, 1]);
    if dot(w, w) < dot(u, u) {
        std::mem::swap(&mut u, &mut w);
        std::mem::swap(&mut ru, &mut rw);
    }
    loop {
        let m = (dot(u, w) / dot(u, u)).round();
        let mi = m as i64;
        w = [w[0] - m * u[0], w[1] - m * u[1]];
        rw = [rw[0] - mi * ru[0], rw[1] - mi * ru[1]];
        if dot(w, w) < dot(u, u) {
            std::mem::swap(&mut u, &mut w);
            std::mem::swap(&mut ru, &mut rw);
        } else {
            break;
        }
    }
    let uu = dot(u, u);
    let mut a = dot(u, w) / uu;
    if a < 0.0 {
        w = [-w[0], -w[1]];
        rw = [-rw[0], -rw[1]];
        a = -a;
    }
    let det = det2(u, w);
    Ok(NormalizedLattice {
        a,
        b: det.abs() / uu,
        basis_change: [ru, rw],
        scale: uu.sqrt(),
        rotation: u[1].atan2(u[0]),
        reflected: det < 0.0,
    })
}

/// Basis of `Γ* = ℤ(1,-a/b) ⊕ ℤ(0,1/b)`.
pub fn dual_lattice(a: f64, b: f64) -> Result<[[f64; 2]; 2]> {
    if !(b > 0.0) {
        return Err(Error::OutOfDomain(format!("dual lattice needs b > 0, got {b}")));
    }
    Ok([[1.0, -a / b], [0.0, 1.0 / b]])
}

/// `⟨dual_i, primal_j⟩`, the identity for a correct dual basis.
pub fn duality_pairing(a: f64, b: f64) -> Result<[[f64; 2]; 2]> {
    let d = dual_lattice(a, b)?;
    let p = [[1.0, 0.0], [a, b]];
    Ok([
        [dot(d[0], p[0]), dot(d[0], p[1])],
        [dot(d[1], p[0]), dot(d[1], p[1])],
    ])
}

/// One eigenvalue of the flat torus with the dual vectors realizing it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralLevel {
    pub eigenvalue: f64,
    pub multiplicity: usize,
    pub generators: Vec<[f64; 2]>,
    /// Integer coordinates of the generators in the dual basis.
    #[serde(skip)]
    pub frequencies: Vec<[i64; 2]>,
}

/// Integer vectors `k ≠ 0` with `kᵀGk ≤ r2`, using the box bound
/// `|k_i| ≤ √(r2 · (G⁻¹)_ii)`.
fn enumerate(g: [[f64; 2]; 2], r2: f64) -> Vec<([i64; 2], f64)> {
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    let m0 = (r2 * g[1][1] / det).sqrt().ceil() as i64;
    let m1 = (r2 * g[0][0] / det).sqrt().ceil() as i64;
    let mut out = Vec::new();
    for i in -m0..=m0 {
        for j in -m1..=m1 {
            if i == 0 && j == 0 {
                continue;
            }
            let (x, y) = (i as f64, j as f64);
            let q = g[0][0] * x * x + 2.0 * g[0][1] * x * y + g[1][1] * y * y;
            if q <= r2 {
                out.push(([i, j], q));
            }
        }
    }
    out
}

/// First `k` levels of `4π² kᵀGk` over nonzero integer `k`, for a positive
/// definite quadratic form `G`. Values are grouped with relative tolerance
/// [`LEVEL_REL_TOL`].
pub fn quadratic_form_levels(g: [[f64; 2]; 2], k: usize) -> Result<Vec<(f64, Vec<[i64; 2]>)>> {
    if k == 0 {
        return Err(Error::Contract("number of levels must be at least 1".into()));
    }
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    if !(g[0][0] > 0.0 && det > 0.0) {
        return Err(Error::DegenerateOperator("quadratic form is not positive definite".into()));
    }
    // Lattice-point count in the ellipse kᵀGk ≤ r² is about πr²/√det; ask
    // for enough points to hold k levels and grow until they are present.
    let mut r2 = ((2 * k + 1) as f64 * det.sqrt() / PI).max(g[0][0].min(g[1][1]));
    loop {
        let mut pts = enumerate(g, r2);
        pts.sort_by(|x, y| x.1.total_cmp(&y.1));
        let mut levels: Vec<(f64, Vec<[i64; 2]>)> = Vec::new();
        for (v, q) in pts {
            match levels.last_mut() {
                Some((q0, vs)) if (q - *q0).abs() <= LEVEL_REL_TOL * q0.abs() => vs.push(v),
                _ => levels.push((q, vec![v])),
            }
        }
        // the k-th level is complete only if its whole tolerance band was enumerated
        if levels.len() >= k && levels[k - 1].0 * (1.0 + 2.0 * LEVEL_REL_TOL) <= r2 {
            levels.truncate(k);
            return Ok(levels.into_iter().map(|(q, vs)| (FOUR_PI_SQ * q, vs)).collect());
        }
        r2 *= 2.0;
    }
}

fn dual_vector(a: f64, b: f64, f: [i64; 2]) -> [f64; 2] {
    let (m, n) = (f[0] as f64, f[1] as f64);
    [m, (n - m * a) / b]
}

/// Quadratic form of `‖m(1,-a/b) + n(0,1/b)‖²` in `(m, n)`.
fn dual_gram(a: f64, b: f64) -> [[f64; 2]; 2] {
    let b2 = b * b;
    [[1.0 + a * a / b2, -a / b2], [-a / b2, 1.0 / b2]]
}

/// First `k` Laplace levels of the flat torus `ℝ²/(ℤ(1,0) ⊕ ℤ(a,b))`.
pub fn spectrum(a: f64, b: f64, k: usize) -> Result<Vec<SpectralLevel>> {
    dual_lattice(a, b)?;
    Ok(quadratic_form_levels(dual_gram(a, b), k)?
        .into_iter()
        .map(|(eigenvalue, freqs)| SpectralLevel {
            eigenvalue,
            multiplicity: freqs.len(),
            generators: freqs.iter().map(|&f| dual_vector(a, b, f)).collect(),
            frequencies: freqs,
        })
        .collect())
}

/// Exact variant for rational `a` and `b²`: levels are grouped by exact
/// comparison of `b²‖γ*‖² = m²b² + (n - ma)²`.
pub fn spectrum_exact(a: Rational, b_sq: Rational, k: usize) -> Result<Vec<SpectralLevel>> {
    if !b_sq.is_positive() {
        return Err(Error::OutOfDomain("b^2 must be positive".into()));
    }
    let af = a.to_f64().unwrap_or(f64::NAN);
    let bf = b_sq.to_f64().unwrap_or(f64::NAN).sqrt();
    // Use the float enumeration to find a radius that holds k levels, then
    // re-enumerate slightly wider and group exactly.
    let rough = quadratic_form_levels(dual_gram(af, bf), k)?;
    let r2 = rough.last().map(|l| l.0).unwrap_or(0.0) / FOUR_PI_SQ * (1.0 + 1e-6) + 1e-9;
    let mut pts: Vec<([i64; 2], Rational)> = enumerate(dual_gram(af, bf), r2 * (1.0 + 1e-6))
        .into_iter()
        .map(|(f, _)| {
            let m = Rational::from_integer(f[0] as i128);
            let n = Rational::from_integer(f[1] as i128);
            let s = n - m * a;
            (f, m * m * b_sq + s * s)
        })
        .collect();
    pts.sort_by(|x, y| x.1.cmp(&y.1));
    let mut levels: Vec<(Rational, Vec<[i64; 2]>)> = Vec::new();
    for (f, q) in pts {
        match levels.last_mut() {
            Some((q0, fs)) if *q0 == q => fs.push(f),
            _ => levels.push((q, vec![f])),
        }
    }
    levels.truncate(k);
    Ok(levels
        .into_iter()
        .map(|(q, freqs)| {
            let norm2 = (q / b_sq).to_f64().unwrap_or(f64::NAN);
            SpectralLevel {
                eigenvalue: FOUR_PI_SQ * norm2,
                multiplicity: freqs.len(),
                generators: freqs.iter().map(|&f| dual_vector(af, bf, f)).collect(),
                frequencies: freqs,
            }
        })
        .collect())
}

/// Multiplicity of the first eigenvalue for normalized `(a, b)`:
/// 6 for the equilateral lattice, 4 on the rest of the arc `b = √(1-a²)`,
/// 2 otherwise. `tol` is the tolerance on the case distinctions.
pub fn multiplicity_rule(a: f64, b: f64, tol: f64) -> usize {
    let on_arc = (b - (1.0 - a * a).max(0.0).sqrt()).abs() <= tol;
    if on_arc && (a - 0.5).abs() <= tol {
        6
    } else if on_arc {
        4
    } else {
        2
    }
}

/// Best rational approximation with denominator at most `max_den`, accepted
/// only if within `tol` of `x`.
pub fn recognize_rational(x: f64, max_den: i128, tol: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    // continued-fraction convergents
    let (mut h0, mut h1) = (0_i128, 1_i128);
    let (mut k0, mut k1) = (1_i128, 0_i128);
    let mut r = x;
    for _ in 0..64 {
        let q = r.floor();
        if q.abs() > 1e15 {
            break;
        }
        let qi = q as i128;
        let h2 = qi * h1 + h0;
        let k2 = qi * k1 + k0;
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let approx = h1 as f64 / k1 as f64;
        if (approx - x).abs() <= tol {
            return Some(Rational::new(h1, k1));
        }
        let frac = r - q;
        if frac.abs() < 1e-300 {
            break;
        }
        r = 1.0 / frac;
    }
    if k1 > 0 && (h1 as f64 / k1 as f64 - x).abs() <= tol {
        Some(Rational::new(h1, k1))
    } else if x.abs() <= tol {
        Some(Rational::zero())
    } else {
        None
    }
}
