//! Maps `ℝ²/ℤ² → ℝᴺ` whose components are finite trigonometric sums.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::duality::SampledMap;
use crate::error::{Error, Result};
use crate::tensor::{Frame, SymTensor, Variance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Wave {
    Cos,
    Sin,
}

/// `amplitude · cos(2π⟨freq, x⟩)` or the sine counterpart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub freq: [i64; 2],
    pub wave: Wave,
    pub amplitude: f64,
}

impl TrigTerm {
    pub fn cos(freq: [i64; 2], amplitude: f64) -> Self {
        TrigTerm { freq, wave: Wave::Cos, amplitude }
    }

    pub fn sin(freq: [i64; 2], amplitude: f64) -> Self {
        TrigTerm { freq, wave: Wave::Sin, amplitude }
    }

    fn phase(&self, x: [f64; 2]) -> f64 {
        2.0 * PI * (self.freq[0] as f64 * x[0] + self.freq[1] as f64 * x[1])
    }

    fn value(&self, x: [f64; 2]) -> f64 {
        match self.wave {
            Wave::Cos => self.amplitude * self.phase(x).cos(),
            Wave::Sin => self.amplitude * self.phase(x).sin(),
        }
    }

    /// `(∂x, ∂y)` of the term.
    fn gradient(&self, x: [f64; 2]) -> [f64; 2] {
        let d = match self.wave {
            Wave::Cos => -self.amplitude * self.phase(x).sin(),
            Wave::Sin => self.amplitude * self.phase(x).cos(),
        } * 2.0
            * PI;
        [d * self.freq[0] as f64, d * self.freq[1] as f64]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigMap {
    components: Vec<Vec<TrigTerm>>,
}

impl TrigMap {
    /// Zero-amplitude terms are dropped; a component may end up empty (the
    /// zero function), which keeps the target dimension fixed.
    pub fn new(components: Vec<Vec<TrigTerm>>) -> Result<Self> {
        let mut out = Vec::with_capacity(components.len());
        for comp in components {
            let mut kept = Vec::new();
            for t in comp {
                if t.freq == [0, 0] {
                    return Err(Error::Contract("constant term in a trigonometric map".into()));
                }
                if !t.amplitude.is_finite() {
                    return Err(Error::Contract("non-finite amplitude".into()));
                }
                if t.amplitude != 0.0 {
                    kept.push(t);
                }
            }
            out.push(kept);
        }
        Ok(TrigMap { components: out })
    }

    pub fn components(&self) -> &[Vec<TrigTerm>] {
        &self.components
    }

    pub fn target_dim(&self) -> usize {
        self.components.len()
    }

    pub fn nonzero_components(&self) -> usize {
        self.components.iter().filter(|c| !c.is_empty()).count()
    }

    pub fn scaled(&self, c: f64) -> TrigMap {
        let components = self
            .components
            .iter()
            .map(|comp| comp.iter().map(|t| TrigTerm { amplitude: c * t.amplitude, ..*t }).collect())
            .collect();
        TrigMap { components }
    }

    pub fn eval(&self, x: [f64; 2]) -> Vec<f64> {
        self.components.iter().map(|c| c.iter().map(|t| t.value(x)).sum()).collect()
    }

    /// `N × 2` Jacobian in the `(∂x, ∂y)` frame.
    pub fn differential(&self, x: [f64; 2]) -> DMatrix<f64> {
        let mut j = DMatrix::zeros(self.components.len(), 2);
        for (k, comp) in self.components.iter().enumerate() {
            for t in comp {
                let g = t.gradient(x);
                j[(k, 0)] += g[0];
                j[(k, 1)] += g[1];
            }
        }
        j
    }

    /// Exact `∫‖φ‖² dxdy` by Parseval. Terms are merged per
    /// `(±freq, wave)` first, since `cos` is even and `sin` odd in the frequency.
    pub fn variance(&self) -> f64 {
        let mut total = 0.0;
        for comp in &self.components {
            let mut merged: BTreeMap<([i64; 2], Wave), f64> = BTreeMap::new();
            for t in comp {
                let canonical = t.freq[0] > 0 || (t.freq[0] == 0 && t.freq[1] > 0);
                let (f, sign) = if canonical { (t.freq, 1.0) } else { ([-t.freq[0], -t.freq[1]], -1.0) };
                let amp = match t.wave {
                    Wave::Cos => t.amplitude,
                    Wave::Sin => sign * t.amplitude,
                };
                *merged.entry((f, t.wave)).or_insert(0.0) += amp;
            }
            total += merged.values().map(|r| r * r / 2.0).sum::<f64>();
        }
        total
    }

    /// Every term has eigenvalue `4π² g*(k,k) = lambda` for the constant
    /// cometric `gstar`, within relative `tol`.
    pub fn is_eigenmap(&self, gstar: &SymTensor, lambda: f64, tol: f64) -> bool {
        self.components.iter().flatten().all(|t| {
            let (m, n) = (t.freq[0] as f64, t.freq[1] as f64);
            let q = gstar.get(0, 0) * m * m + 2.0 * gstar.get(0, 1) * m * n + gstar.get(1, 1) * n * n;
            (4.0 * PI * PI * q - lambda).abs() <= tol * lambda.abs()
        })
    }

    /// Samples on the uniform `n × n` grid with weights `1/n²`; exact as a
    /// quadrature for trigonometric polynomials of degree below `n`.
    pub fn sample(&self, n: usize) -> Result<SampledMap> {
        if n == 0 {
            return Err(Error::Contract("grid size must be positive".into()));
        }
        let mut points = Vec::with_capacity(n * n);
        let mut values = Vec::with_capacity(n * n);
        let mut diffs = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let x = [i as f64 / n as f64, j as f64 / n as f64];
                points.push(x.to_vec());
                values.push(self.eval(x));
                diffs.push(self.differential(x));
            }
        }
        SampledMap::new(points, values, Some(diffs), vec![1.0 / (n * n) as f64; n * n], Frame::Torus)
    }

    /// Pullback of the Euclidean metric on an `n × n` grid.
    pub fn pullback(&self, n: usize) -> Result<PullbackReport> {
        let s = self.sample(n)?;
        let tensors: Vec<SymTensor> = (0..s.len()).map(|p| s.pullback_at(p)).collect::<Result<_>>()?;
        let mut mean = [0.0; 3];
        for t in &tensors {
            mean[0] += t.get(0, 0);
            mean[1] += t.get(0, 1);
            mean[2] += t.get(1, 1);
        }
        mean.iter_mut().for_each(|m| *m /= tensors.len() as f64);
        let mean = SymTensor::from_upper(2, &mean, Variance::Covariant, Frame::Torus)?;
        let max_deviation = tensors
            .iter()
            .map(|t| t.sub(&mean).map(|d| d.max_abs_entry()))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        Ok(PullbackReport { mean, max_deviation })
    }

    /// Largest entrywise deviation of the pullback from `h` at the given points.
    pub fn pullback_residual(&self, h: &SymTensor, points: &[[f64; 2]]) -> f64 {
        let mut worst: f64 = 0.0;
        for &x in points {
            let j = self.differential(x);
            let p = j.transpose() * &j;
            for a in 0..2 {
                for b in 0..2 {
                    worst = worst.max((p[(a, b)] - h.get(a, b)).abs());
                }
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PullbackReport {
    pub mean: SymTensor,
    pub max_deviation: f64,
}

/// `h_{a,b} = dx² + 2a dxdy + (a²+b²) dy²` on the unit-square chart.
pub fn lattice_metric(a: f64, b: f64) -> SymTensor {
    SymTensor::from_upper(2, &[1.0, a, a * a + b * b], Variance::Covariant, Frame::Torus)
        .expect("two-dimensional upper triangle")
}

/// `h_EL = dx² + dxdy + dy²`.
pub fn equilateral_metric() -> SymTensor {
    lattice_metric(0.5, 0.75f64.sqrt())
}

/// The six-component map `(p e^{2πix}, q e^{2πiy}, r e^{2πi(x+y)})/√(8π²)`
/// written in real coordinates.
pub fn psi_pqr(p: f64, q: f64, r: f64) -> Result<TrigMap> {
    if p < 0.0 || q < 0.0 || r < 0.0 {
        return Err(Error::OutOfDomain("amplitudes must be nonnegative".into()));
    }
    let c = 1.0 / (8.0 * PI * PI).sqrt();
    let mut comps = Vec::with_capacity(6);
    for (amp, f) in [(p, [1, 0]), (q, [0, 1]), (r, [1, 1])] {
        comps.push(vec![TrigTerm::cos(f, c * amp)]);
        comps.push(vec![TrigTerm::sin(f, c * amp)]);
    }
    TrigMap::new(comps)
}

/// `(p, q, r) = (√(2(1-a)), √(2(a²+b²-a)), √(2a))`.
pub fn inflation_amplitudes(a: f64, b: f64) -> (f64, f64, f64) {
    (
        (2.0 * (1.0 - a)).max(0.0).sqrt(),
        (2.0 * (a * a + b * b - a)).max(0.0).sqrt(),
        (2.0 * a).max(0.0).sqrt(),
    )
}

/// Isometric embedding of `(ℝ²/ℤ², h_{a,b})` into `ℝ⁶` by first
/// eigenfunctions of the equilateral metric.
pub fn inflated_map_el(a: f64, b: f64) -> Result<TrigMap> {
    super::lattice::check_normalized(a, b)?;
    let (p, q, r) = inflation_amplitudes(a.max(0.0), b);
    psi_pqr(p, q, r)
}

/// `(cos 2πx, sin 2πx, b cos 2πy, b sin 2πy)/(2π)`, isometric for `h_{0,b}`.
pub fn inflated_map_sq(b: f64) -> Result<TrigMap> {
    if !(b >= 1.0 - super::lattice::DOMAIN_SLACK) {
        return Err(Error::OutOfDomain(format!("rectangular map needs b >= 1, got {b}")));
    }
    let c = 1.0 / (2.0 * PI);
    TrigMap::new(vec![
        vec![TrigTerm::cos([1, 0], c)],
        vec![TrigTerm::sin([1, 0], c)],
        vec![TrigTerm::cos([0, 1], c * b)],
        vec![TrigTerm::sin([0, 1], c * b)],
    ])
}
