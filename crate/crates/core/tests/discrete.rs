use std::f64::consts::PI;

use inflatlab::discrete::{
    assemble, certificate_from_pairs, gradient_probe, lambda1_of, maximize_lambda1, primal_lower_bound, random_field,
    AscentOptions, DiscreteProblem, EigenOptions, CERTIFICATE_TOL,
};
use inflatlab::torus::{inflated_map_el, lattice_metric, TrigMap};
use inflatlab::{Frame, SymTensor, Variance};
use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn identity_cometric() -> SymTensor {
    SymTensor::identity(2, Variance::Contravariant, Frame::Grid).unwrap()
}

fn sample_nodes(map: &TrigMap, n: usize) -> Vec<Vec<f64>> {
    let vals: Vec<Vec<f64>> =
        (0..n * n).map(|k| map.eval([(k % n) as f64 / n as f64, (k / n) as f64 / n as f64])).collect();
    (0..map.target_dim()).map(|c| vals.iter().map(|v| v[c]).collect()).collect()
}

/// Mass-orthonormal basis of the span of `vs`, as columns.
fn orthonormal(vs: &[Vec<f64>], mass: &[f64]) -> DMatrix<f64> {
    let root: Vec<f64> = mass.iter().map(|w| w.sqrt()).collect();
    let a = DMatrix::from_fn(mass.len(), vs.len(), |i, j| vs[j][i] * root[i]);
    let svd = a.svd(true, false);
    let u = svd.u.unwrap();
    let keep: Vec<usize> =
        (0..vs.len()).filter(|&k| svd.singular_values[k] > 1e-10 * svd.singular_values.max()).collect();
    DMatrix::from_fn(mass.len(), keep.len(), |i, j| u[(i, keep[j])])
}

/// Largest principal angle between two subspaces, in degrees.
fn subspace_angle(a: &[Vec<f64>], b: &[Vec<f64>], mass: &[f64]) -> f64 {
    let (qa, qb) = (orthonormal(a, mass), orthonormal(b, mass));
    assert_eq!(qa.ncols(), qb.ncols());
    let s = (qa.transpose() * qb).singular_values();
    s.min().clamp(-1.0, 1.0).acos().to_degrees()
}

#[test]
fn ascent_recovers_the_continuum_map() {
    let (a, b) = (0.3, 1.1);
    let r = maximize_lambda1(&lattice_metric(a, b), 32, &AscentOptions::default()).unwrap();
    let target = 4.0 * PI * PI / (1.0 - a + a * a + b * b);
    assert!((r.objective / target - 1.0).abs() < 0.02);
    let cert = certificate_from_pairs(&r.problem, &r.eigenpairs, 1e-3, CERTIFICATE_TOL);
    assert_eq!(cert.cluster_size, 6);
    assert!(cert.ok && cert.relative_residual < 1e-2);
    let phi = sample_nodes(&inflated_map_el(a, b).unwrap(), 32);
    let angle = subspace_angle(&cert.components, &phi, &r.problem.node_weights());
    assert!(angle <= 5.0, "angle {angle}");
    let bound = primal_lower_bound(&cert.components, &r.problem, r.objective).unwrap();
    assert!(bound.gap >= -1e-9 && bound.relative_gap <= 0.05, "{bound:?}");
}

#[test]
fn sampled_continuum_map_has_a_small_gap() {
    let (a, b) = (0.2, 1.5);
    let r = maximize_lambda1(&lattice_metric(a, b), 24, &AscentOptions::default()).unwrap();
    let phi = sample_nodes(&inflated_map_el(a, b).unwrap(), 24);
    let bound = primal_lower_bound(&phi, &r.problem, r.objective).unwrap();
    assert!(bound.gap >= -1e-9);
    assert!(bound.relative_gap < 0.05, "{bound:?}");
}

#[test]
fn square_torus_is_stationary_at_identity() {
    let h = lattice_metric(0.0, 1.0);
    let r = maximize_lambda1(&h, 16, &AscentOptions { iters: 10, ..Default::default() }).unwrap();
    let first = r.history[0].objective;
    assert!((r.objective - first).abs() <= 1e-9 * first);
    assert!((r.objective / (2.0 * PI * PI) - 1.0).abs() < 0.02);
}

#[test]
fn gradient_matches_finite_differences() {
    let h = lattice_metric(0.0, 1.0);
    let eigen = EigenOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    let mut seed = 0;
    while checked < 20 {
        let p = DiscreteProblem::uniform(6, h, identity_cometric()).unwrap().with_field(random_field(6, &mut rng)).unwrap();
        let report = gradient_probe(&p, 1, 1e-4, seed, &eigen).unwrap();
        seed += 1;
        if report.trials == 0 {
            continue;
        }
        assert!(report.ok, "{report:?}");
        checked += 1;
    }
}

#[test]
fn planted_gram_is_recovered_up_to_gauge() {
    let n = 10;
    let base = DiscreteProblem::uniform(n, lattice_metric(0.0, 1.0), identity_cometric()).unwrap();
    let pairs = lambda1_of(&base, 4, &EigenOptions::default()).unwrap();
    // h = Σ du_k⊗du_k is constant for the four lowest modes
    let mut h = [0.0; 3];
    for e in &pairs {
        let c = base.cross_gradient(&e.vector, &e.vector)[0];
        (0..3).for_each(|k| h[k] += c[k]);
    }
    let h = SymTensor::from_upper(2, &h, Variance::Covariant, Frame::Grid).unwrap();
    let planted = DiscreteProblem::uniform(n, h, identity_cometric()).unwrap();
    let pairs = lambda1_of(&planted, 4, &EigenOptions::default()).unwrap();
    let cert = certificate_from_pairs(&planted, &pairs, 1e-6, CERTIFICATE_TOL);
    assert!(cert.relative_residual <= 1e-10);
    let ev = SymmetricEigen::new(cert.q.clone()).eigenvalues;
    assert!(ev.iter().all(|e| (e - 1.0).abs() < 1e-8), "{ev}");
}

fn psd_cell() -> impl Strategy<Value = [f64; 3]> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_map(|(a, b, c, d)| [a * a + b * b + 0.01, a * c + b * d, c * c + d * d + 0.01])
}

fn field(n: usize) -> impl Strategy<Value = Vec<SymTensor>> {
    proptest::collection::vec(psd_cell(), n * n).prop_map(|cells| {
        cells.iter().map(|c| SymTensor::from_upper(2, c, Variance::Contravariant, Frame::Grid).unwrap()).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn assembly_is_linear(g1 in field(5), g2 in field(5), al in 0.0..3.0f64, be in 0.0..3.0f64) {
        let base = DiscreteProblem::uniform(5, lattice_metric(0.1, 1.2), identity_cometric()).unwrap();
        let comb: Vec<SymTensor> = g1.iter().zip(&g2).map(|(x, y)| x.scale(al).add_scaled(be, y).unwrap()).collect();
        let s1 = assemble(&base.with_field(g1).unwrap()).0.to_dense();
        let s2 = assemble(&base.with_field(g2).unwrap()).0.to_dense();
        let sc = assemble(&base.with_field(comb).unwrap()).0.to_dense();
        let diff = (&sc - (s1 * al + s2 * be)).abs().max();
        prop_assert!(diff <= 1e-13 * sc.abs().max().max(1.0));
    }

    #[test]
    fn weak_duality_for_random_candidates(g in field(6), seed in 0u64..1000) {
        let p = DiscreteProblem::uniform(6, lattice_metric(0.3, 1.1), identity_cometric()).unwrap().with_field(g).unwrap();
        let l1 = lambda1_of(&p, 1, &EigenOptions::default()).unwrap()[0].lambda;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let comps: Vec<Vec<f64>> = (0..3).map(|_| (0..36).map(|_| rand::Rng::gen_range(&mut rng, -1.0..1.0)).collect()).collect();
        let b = primal_lower_bound(&comps, &p, l1).unwrap();
        prop_assert!(b.bound <= p.pairing() / l1 + 1e-9);
        prop_assert!(b.gap >= -1e-9);
    }
}
