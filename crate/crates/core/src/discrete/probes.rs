//! Randomized checks of the structural properties of the discrete operator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::eigen::{lambda1_discrete_with, EigenOptions};
use super::problem::{assemble, eigenvalue_gradient, from_cell, Cell, DiscreteProblem};
use crate::error::Result;
use crate::tensor::{SymTensor, Variance};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub trials: usize,
    /// Worst value of the probed quantity; its meaning depends on the probe.
    pub worst: f64,
    pub ok: bool,
}

fn random_psd_cell(rng: &mut ChaCha8Rng) -> Cell {
    let (a, b, c, d): (f64, f64, f64, f64) =
        (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let eps = 0.05;
    [a * a + b * b + eps, a * c + b * d, c * c + d * d + eps]
}

/// Field with independent random PSD cells.
pub fn random_field(n: usize, rng: &mut ChaCha8Rng) -> Vec<SymTensor> {
    (0..n * n).map(|_| from_cell(&random_psd_cell(rng), Variance::Contravariant)).collect()
}

fn lambda1(p: &DiscreteProblem, eigen: &EigenOptions) -> Result<f64> {
    let (s, m) = assemble(p);
    Ok(lambda1_discrete_with(&s, &m, 1, eigen, None)?[0].lambda)
}

fn combine(a: &[SymTensor], b: &[SymTensor], t: f64) -> Vec<SymTensor> {
    a.iter().zip(b).map(|(x, y)| x.scale(t).add_scaled(1.0 - t, y).expect("same frame")).collect()
}

/// `λ₁(t g₁ + (1−t) g₂) − t λ₁(g₁) − (1−t) λ₁(g₂)` over random pairs and
/// `t ∈ {¼, ½, ¾}`; `worst` is the smallest excess.
pub fn concavity_probe(base: &DiscreteProblem, trials: usize, seed: u64, eigen: &EigenOptions) -> Result<ProbeReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::INFINITY;
    for _ in 0..trials {
        let g1 = random_field(base.n(), &mut rng);
        let g2 = random_field(base.n(), &mut rng);
        let l1 = lambda1(&base.with_field(g1.clone())?, eigen)?;
        let l2 = lambda1(&base.with_field(g2.clone())?, eigen)?;
        for t in [0.25, 0.5, 0.75] {
            let lt = lambda1(&base.with_field(combine(&g1, &g2, t))?, eigen)?;
            worst = worst.min(lt - t * l1 - (1.0 - t) * l2);
        }
    }
    Ok(ProbeReport { trials, worst, ok: worst >= -1e-9 })
}

/// Relative error of `λ₁(c g*) = c λ₁(g*)` for the given factors.
pub fn scaling_probe(p: &DiscreteProblem, factors: &[f64], eigen: &EigenOptions) -> Result<ProbeReport> {
    let base = lambda1(p, eigen)?;
    let mut worst: f64 = 0.0;
    for &c in factors {
        let scaled = p.with_field(p.gstar_field().iter().map(|g| g.scale(c)).collect())?;
        worst = worst.max((lambda1(&scaled, eigen)? - c * base).abs() / (c * base).abs());
    }
    Ok(ProbeReport { trials: factors.len(), worst, ok: worst <= 1e-10 })
}

/// Smallest `vᵀSv / vᵀMv − λ₁` over random vectors with zero Mass-mean.
pub fn rayleigh_probe(p: &DiscreteProblem, trials: usize, seed: u64, eigen: &EigenOptions) -> Result<ProbeReport> {
    let (s, m) = assemble(p);
    let l1 = lambda1_discrete_with(&s, &m, 1, eigen, None)?[0].lambda;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total: f64 = m.diag.iter().sum();
    let mut worst = f64::INFINITY;
    let mut sv = vec![0.0; s.dim()];
    for trial in 0..trials {
        let mut v: Vec<f64> = (0..s.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        // half the trials start near the first eigenspace
        if trial % 2 == 1 {
            let u = &lambda1_discrete_with(&s, &m, 1, eigen, None)?[0].vector;
            v.iter_mut().zip(u).for_each(|(x, y)| *x = y + 1e-3 * *x);
        }
        let mean: f64 = v.iter().zip(&m.diag).map(|(x, w)| x * w).sum::<f64>() / total;
        v.iter_mut().for_each(|x| *x -= mean);
        s.apply(&v, &mut sv);
        let num: f64 = v.iter().zip(&sv).map(|(a, b)| a * b).sum();
        let den: f64 = v.iter().zip(&m.diag).map(|(a, w)| w * a * a).sum();
        worst = worst.min(num / den - l1);
    }
    Ok(ProbeReport { trials, worst, ok: worst >= -1e-9 * l1.max(1.0) })
}

/// Relative error between [`eigenvalue_gradient`] and a central difference
/// of λ₁ with step `step`, over random directions. Trials where λ₁ is not
/// simple (relative gap below `1e-3`) are skipped.
pub fn gradient_probe(
    p: &DiscreteProblem,
    trials: usize,
    step: f64,
    seed: u64,
    eigen: &EigenOptions,
) -> Result<ProbeReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (s, m) = assemble(p);
    let pairs = lambda1_discrete_with(&s, &m, 2, eigen, None)?;
    let simple = pairs[1].lambda - pairs[0].lambda > 1e-3 * pairs[0].lambda;
    let mut worst: f64 = 0.0;
    let mut done = 0;
    if simple {
        for _ in 0..trials {
            let dir: Vec<SymTensor> = (0..p.n() * p.n())
                .map(|_| {
                    let c = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
                    from_cell(&c, Variance::Contravariant)
                })
                .collect();
            let shifted = |t: f64| -> Result<f64> {
                let f = p.gstar_field().iter().zip(&dir).map(|(g, d)| g.add_scaled(t, d).expect("frame")).collect();
                lambda1(&p.with_field(f)?, eigen)
            };
            let fd = (shifted(step)? - shifted(-step)?) / (2.0 * step);
            let an = eigenvalue_gradient(p, &pairs[0].vector, &dir)?;
            worst = worst.max((fd - an).abs() / an.abs().max(1e-12));
            done += 1;
        }
    }
    Ok(ProbeReport { trials: done, worst, ok: simple && worst <= 1e-5 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Frame;

    fn base(n: usize, seed: u64) -> DiscreteProblem {
        let h = SymTensor::identity(2, Variance::Covariant, Frame::Grid).unwrap();
        let g = SymTensor::identity(2, Variance::Contravariant, Frame::Grid).unwrap();
        let p = DiscreteProblem::uniform(n, h, g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        p.with_field(random_field(n, &mut rng)).unwrap()
    }

    #[test]
    fn probes_pass_on_random_fields() {
        let eigen = EigenOptions::default();
        let p = base(8, 3);
        assert!(concavity_probe(&p, 3, 1, &eigen).unwrap().ok);
        assert!(scaling_probe(&p, &[2.0, 0.5, 7.0], &eigen).unwrap().ok);
        assert!(rayleigh_probe(&p, 20, 2, &eigen).unwrap().ok);
        let g = gradient_probe(&p, 5, 1e-4, 4, &eigen).unwrap();
        assert!(g.ok, "{g:?}");
    }
}
