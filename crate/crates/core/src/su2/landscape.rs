use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Φ variation below which a located minimum set is reported as flat.
pub const FLAT_TOL: f64 = 1e-9;
const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Pieces of the closed quadrant `Q` of cometrics `h*_{u,v} = uE₁² + vE₂² + E₃²`
/// on which one eigenvalue expression is the smallest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    /// `λ₁ = u + v + 1`.
    D0,
    /// `u + v ≤ 1/3`, `λ₁ = 4(u + v)`.
    D1,
    /// `−u + v/3 ≥ 1`, `λ₁ = 4(u + 1)`.
    D2,
    /// `u/3 − v ≥ 1`, `λ₁ = 4(v + 1)`.
    D3,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::D0 => "D0",
            Region::D1 => "D1",
            Region::D2 => "D2",
            Region::D3 => "D3",
        })
    }
}

/// Region membership from the defining inequalities; boundary points go to
/// `D₁`, `D₂`, `D₃` rather than `D₀`.
pub fn region(u: f64, v: f64) -> Region {
    if u + v <= 1.0 / 3.0 {
        Region::D1
    } else if -u + v / 3.0 >= 1.0 {
        Region::D2
    } else if u / 3.0 - v >= 1.0 {
        Region::D3
    } else {
        Region::D0
    }
}

/// `min{u+v+w, 4(v+w), 4(w+u), 4(u+v)}`.
pub fn lambda1_uvw(u: f64, v: f64, w: f64) -> f64 {
    (u + v + w).min(4.0 * (v + w)).min(4.0 * (w + u)).min(4.0 * (u + v))
}

fn check_metric(a: f64, b: f64, c: f64) -> Result<()> {
    if [a, b, c].iter().all(|x| *x > 0.0 && x.is_finite()) {
        Ok(())
    } else {
        Err(Error::OutOfDomain(format!("metric parameters ({a}, {b}, {c}) must be positive")))
    }
}

/// Scale-invariant objective `(u/a + v/b + w/c) / λ₁(u, v, w)` on PSD
/// left-invariant cometrics with at least two positive entries.
pub fn phi_extended(uvw: [f64; 3], abc: [f64; 3]) -> Result<f64> {
    let [u, v, w] = uvw;
    let [a, b, c] = abc;
    check_metric(a, b, c)?;
    if uvw.iter().any(|x| !(*x >= 0.0)) || uvw.iter().filter(|x| **x > 0.0).count() < 2 {
        return Err(Error::OutOfDomain(format!("cometric ({u}, {v}, {w}) needs two positive entries")));
    }
    Ok((u / a + v / b + w / c) / lambda1_uvw(u, v, w))
}

/// `Φ(u, v) = (u/a + v/b + 1) / λ₁(h*_{u,v})` on `Q̄ \ {0}`.
pub fn phi(u: f64, v: f64, a: f64, b: f64) -> Result<f64> {
    check_metric(a, b, 1.0)?;
    if !(u >= 0.0 && v >= 0.0) || (u == 0.0 && v == 0.0) {
        return Err(Error::OutOfDomain(format!("(u, v) = ({u}, {v}) is outside Q minus the origin")));
    }
    Ok((u / a + v / b + 1.0) / lambda1_uvw(u, v, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LandscapeSample {
    pub u: f64,
    pub v: f64,
    pub region: Region,
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiMinimum {
    pub u: f64,
    pub v: f64,
    pub value: f64,
    pub region: Region,
    /// Φ is constant (within [`FLAT_TOL`]) along `flat_segment`, which
    /// contains the minimizer.
    pub flat: bool,
    pub flat_segment: Option<[[f64; 2]; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiLandscape {
    pub a: f64,
    pub b: f64,
    pub extent: f64,
    pub samples: Vec<LandscapeSample>,
    pub minimum: PhiMinimum,
}

/// Segments of `[0, U]²` along which Φ is linear-fractional: the box edges
/// and region boundaries, cut at their mutual intersections. `∂D₁` first.
fn segments(extent: f64) -> Vec<[[f64; 2]; 2]> {
    let e = extent;
    let third = 1.0 / 3.0;
    let top = (e - 3.0) / 3.0;
    vec![
        [[0.0, third], [third, 0.0]],
        [[0.0, 0.0], [0.0, third]],
        [[0.0, third], [0.0, 3.0]],
        [[0.0, 3.0], [0.0, e]],
        [[0.0, 0.0], [third, 0.0]],
        [[third, 0.0], [3.0, 0.0]],
        [[3.0, 0.0], [e, 0.0]],
        [[0.0, 3.0], [top, e]],
        [[3.0, 0.0], [e, top]],
        [[e, 0.0], [e, top]],
        [[e, top], [e, e]],
        [[0.0, e], [top, e]],
        [[top, e], [e, e]],
    ]
}

fn lerp(s: &[[f64; 2]; 2], t: f64) -> (f64, f64) {
    (s[0][0] + t * (s[1][0] - s[0][0]), s[0][1] + t * (s[1][1] - s[0][1]))
}

/// Φ with the origin mapped to `+∞`, for searches that touch it.
fn phi_or_inf(u: f64, v: f64, a: f64, b: f64) -> f64 {
    phi(u, v, a, b).unwrap_or(f64::INFINITY)
}

/// Golden-section search of `f` on `[0, 1]`, also comparing the endpoints.
fn golden_section(f: impl Fn(f64) -> f64, iters: usize) -> (f64, f64) {
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..iters {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = f(x2);
        }
    }
    let mid = 0.5 * (lo + hi);
    [(0.0, f(0.0)), (1.0, f(1.0)), (mid, f(mid))].into_iter().fold((mid, f(mid)), |best, c| {
        if c.1 < best.1 {
            c
        } else {
            best
        }
    })
}

/// Minimizes Φ over `[0, U]²`: a coarse grid including the box edges, then
/// golden-section refinement along each box edge and region boundary. Φ is
/// linear-fractional on every region, so the minimum over the box lies on
/// one of those segments.
pub fn phi_minimize_in(a: f64, b: f64, extent: f64, grid_n: usize, refine_iters: usize) -> Result<PhiMinimum> {
    check_metric(a, b, 1.0)?;
    if !(extent >= 3.0) {
        return Err(Error::OutOfDomain(format!("search box extent {extent} must be at least 3")));
    }
    if grid_n < 2 {
        return Err(Error::OutOfDomain("grid needs at least 2 cells per side".into()));
    }
    let h = extent / grid_n as f64;
    let grid_best = (0..=grid_n)
        .into_par_iter()
        .flat_map_iter(|i| (0..=grid_n).map(move |j| (i as f64 * h, j as f64 * h)))
        .map(|(u, v)| (u, v, phi_or_inf(u, v, a, b)))
        .reduce(|| (0.0, 0.0, f64::INFINITY), |x, y| if y.2 < x.2 { y } else { x });

    let segs = segments(extent);
    let seg_best: Vec<(f64, f64, f64)> = segs
        .par_iter()
        .map(|s| {
            let (t, val) = golden_section(
                |t| {
                    let (u, v) = lerp(s, t);
                    phi_or_inf(u, v, a, b)
                },
                refine_iters,
            );
            let (u, v) = lerp(s, t);
            (u, v, val)
        })
        .collect();

    let mut best = grid_best;
    for c in &seg_best {
        if c.2 < best.2 {
            best = *c;
        }
    }
    let (u, v, value) = best;

    let mut flat_segment = None;
    for (s, c) in segs.iter().zip(&seg_best) {
        if c.2 - value > FLAT_TOL {
            continue;
        }
        let vals: Vec<f64> = (0..=50)
            .map(|k| {
                let (u, v) = lerp(s, k as f64 / 50.0);
                phi_or_inf(u, v, a, b)
            })
            .collect();
        let (lo, hi) = vals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &x| (l.min(x), h.max(x)));
        if hi - lo < FLAT_TOL {
            flat_segment = Some(*s);
            break;
        }
    }
    Ok(PhiMinimum { u, v, value, region: region(u, v), flat: flat_segment.is_some(), flat_segment })
}

/// [`phi_minimize_in`] on the default box `[0, 5]²`.
pub fn phi_minimize(a: f64, b: f64, grid_n: usize, refine_iters: usize) -> Result<PhiMinimum> {
    phi_minimize_in(a, b, 5.0, grid_n, refine_iters)
}

/// Samples Φ on a `(grid_n+1)²` grid over `[0, U]²` (origin omitted) and
/// locates the minimum.
pub fn landscape(a: f64, b: f64, grid_n: usize, extent: f64) -> Result<PhiLandscape> {
    let minimum = phi_minimize_in(a, b, extent, grid_n.max(2), 100)?;
    let h = extent / grid_n.max(1) as f64;
    let samples = (0..=grid_n)
        .into_par_iter()
        .flat_map_iter(|i| (0..=grid_n).map(move |j| (i as f64 * h, j as f64 * h)))
        .filter(|(u, v)| *u > 0.0 || *v > 0.0)
        .map(|(u, v)| Ok(LandscapeSample { u, v, region: region(u, v), phi: phi(u, v, a, b)? }))
        .collect::<Result<Vec<_>>>()?;
    Ok(PhiLandscape { a, b, extent, samples, minimum })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectiveMinimum {
    /// Minimizer normalized to `u + v + w = 1`.
    pub point: [f64; 3],
    pub value: f64,
}

/// Infimum of the scale-invariant objective over all PSD left-invariant
/// cometrics with two positive entries.
///
/// On the simplex `u + v + w = 1` the objective is linear-fractional on each
/// cell cut out by the tie lines of the four eigenvalue expressions, so it
/// is minimized at a vertex of that arrangement. All vertices are
/// enumerated; a grid pass guards the enumeration.
pub fn phi_projective_infimum(abc: [f64; 3], grid_n: usize) -> Result<ProjectiveMinimum> {
    let [a, b, c] = abc;
    check_metric(a, b, c)?;
    // lines ℓ·(u,v,w) = 0: simplex edges and pairwise ties
    let lines: [[f64; 3]; 9] = [
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [1.0, -3.0, -3.0],
        [-3.0, 1.0, -3.0],
        [-3.0, -3.0, 1.0],
        [1.0, -1.0, 0.0],
        [0.0, 1.0, -1.0],
        [1.0, 0.0, -1.0],
    ];
    let mut cands = Vec::new();
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let (p, q) = (lines[i], lines[j]);
            let x = [p[1] * q[2] - p[2] * q[1], p[2] * q[0] - p[0] * q[2], p[0] * q[1] - p[1] * q[0]];
            let s = x[0] + x[1] + x[2];
            if s.abs() < 1e-14 {
                continue;
            }
            let pt = [x[0] / s, x[1] / s, x[2] / s];
            if pt.iter().all(|y| *y >= -1e-15) {
                cands.push(pt.map(|y| y.max(0.0)));
            }
        }
    }
    let n = grid_n.max(2);
    for i in 0..=n {
        for j in 0..=n - i {
            let (u, v) = (i as f64 / n as f64, j as f64 / n as f64);
            cands.push([u, v, (1.0 - u - v).max(0.0)]);
        }
    }
    let best = cands
        .par_iter()
        .filter_map(|p| phi_extended(*p, abc).ok().map(|v| (*p, v)))
        .reduce(|| ([0.0; 3], f64::INFINITY), |x, y| if y.1 < x.1 { y } else { x });
    if !best.1.is_finite() {
        return Err(Error::DegenerateOperator("no admissible cometric found".into()));
    }
    Ok(ProjectiveMinimum { point: best.0, value: best.1 })
}
