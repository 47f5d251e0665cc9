use std::f64::consts::PI;

use num_complex::Complex;

/// Gauss-Legendre nodes and weights on `[0, 1]`, weights summing to 1.
pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 1.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = 0.5 * (1.0 - x);
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    (p1, n as f64 * (x * p1 - p0) / (x * x - 1.0))
}

/// Product rule on `S³`: `ζ₁ = √s e^{iθ₁}`, `ζ₂ = √(1−s) e^{iθ₂}` with
/// `s` uniform on `[0, 1]` and independent uniform angles under the
/// normalized Haar measure. With `ns` Gauss nodes and `nt` angles it
/// integrates `ζ₁^α ζ̄₁^β ζ₂^γ ζ̄₂^δ` exactly when `α+γ < 2ns` and
/// `|α−β|, |γ−δ| < nt`.
#[derive(Debug, Clone)]
pub struct S3Quadrature {
    pub points: Vec<(Complex<f64>, Complex<f64>)>,
    pub weights: Vec<f64>,
}

impl S3Quadrature {
    pub fn new(ns: usize, nt: usize) -> Self {
        let (s, ws) = gauss_legendre_unit(ns);
        let nt2 = (nt * nt) as f64;
        let mut points = Vec::with_capacity(ns * nt * nt);
        let mut weights = Vec::with_capacity(ns * nt * nt);
        for (si, wi) in s.iter().zip(&ws) {
            let (r1, r2) = (si.sqrt(), (1.0 - si).sqrt());
            for j in 0..nt {
                let t1 = 2.0 * PI * j as f64 / nt as f64;
                for k in 0..nt {
                    let t2 = 2.0 * PI * k as f64 / nt as f64;
                    points.push((Complex::from_polar(r1, t1), Complex::from_polar(r2, t2)));
                    weights.push(wi / nt2);
                }
            }
        }
        S3Quadrature { points, weights }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl Default for S3Quadrature {
    /// Exact through degree 8.
    fn default() -> Self {
        S3Quadrature::new(6, 9)
    }
}
