use inflatlab::su2::{
    berger_certificate, eigen_table_check, inflated_map, lambda1_uvw, phi, region, solve_left_invariant, QPoly,
    Region, Su2Branch,
};
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn monomials(max_degree: u32) -> Vec<QPoly> {
    let mut out = Vec::new();
    for a in 0..=max_degree {
        for b in 0..=max_degree - a {
            for c in 0..=max_degree - a - b {
                for d in 0..=max_degree - a - b - c {
                    out.push(QPoly::monomial([a, b, c, d], Complex::new(BigRational::one(), BigRational::zero())));
                }
            }
        }
    }
    out
}

#[test]
fn bracket_relations_on_low_degree_monomials() {
    let minus_two = Complex::new(BigRational::from_integer((-2).into()), BigRational::zero());
    for p in monomials(4) {
        for (x, y, z) in [(1, 2, 3), (2, 3, 1), (3, 1, 2)] {
            let lhs = &p.derive(y).derive(x) - &p.derive(x).derive(y);
            let rhs = p.derive(z).scale(&minus_two);
            assert_eq!(lhs, rhs, "[E{x}, E{y}] on {p:?}");
        }
    }
}

#[test]
fn eigen_table_for_random_rational_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let mut q = || BigRational::new(rng.gen_range(1i64..40).into(), rng.gen_range(1i64..12).into());
        let (u, v, w) = (q(), q(), q());
        let r = eigen_table_check(&u, &v, &w);
        assert!(r.all_ok, "{r:?}");
        assert_eq!(r.rows.len(), 8);
    }
}

#[test]
fn phi_is_continuous_across_region_boundaries() {
    let eps = 1e-11;
    let (a, b) = (0.3, 0.7);
    for i in 1..40 {
        let s = i as f64 / 40.0;
        // ∂D1: u + v = 1/3
        let (u, v) = (s / 3.0, (1.0 - s) / 3.0);
        check_jump(u, v, [1.0, 1.0], eps, a, b);
        // ∂D2: v = 3(1 + u)
        let u = 4.0 * s;
        check_jump(u, 3.0 * (1.0 + u), [-1.0, 3.0], eps, a, b);
        // ∂D3: u = 3(1 + v)
        let v = 4.0 * s;
        check_jump(3.0 * (1.0 + v), v, [3.0, -1.0], eps, a, b);
    }
}

fn check_jump(u: f64, v: f64, normal: [f64; 2], eps: f64, a: f64, b: f64) {
    let inside = phi(u - eps * normal[0], v - eps * normal[1], a, b).unwrap();
    let outside = phi(u + eps * normal[0], v + eps * normal[1], a, b).unwrap();
    assert_ne!(region(u - eps * normal[0], v - eps * normal[1]), region(u + eps * normal[0], v + eps * normal[1]));
    assert!((inside - outside).abs() <= 1e-9, "jump at ({u}, {v}): {inside} vs {outside}");
}

#[test]
fn region_formulas_on_a_grid() {
    for i in 1..=50 {
        for j in 1..=50 {
            let (u, v) = (0.1 * i as f64, 0.1 * j as f64);
            let expected = match region(u, v) {
                Region::D0 => u + v + 1.0,
                Region::D1 => 4.0 * (u + v),
                Region::D2 => 4.0 * (u + 1.0),
                Region::D3 => 4.0 * (v + 1.0),
            };
            let direct = [u + v + 1.0, 4.0 * (v + 1.0), 4.0 * (1.0 + u), 4.0 * (u + v)]
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            assert!((lambda1_uvw(u, v, 1.0) - direct).abs() < 1e-12);
            assert!((expected - direct).abs() < 1e-12, "({u}, {v})");
        }
    }
}

#[test]
fn duality_product_on_the_generic_branch() {
    for i in 1..10 {
        for j in (i + 1)..10 {
            let (a, b) = (i as f64 / 10.0, j as f64 / 10.0);
            let s = solve_left_invariant(a, b, 1.0).unwrap();
            assert_eq!(s.branch, Su2Branch::Generic);
            let c = s.certificate;
            assert!((c.duality_product() - 1.0).abs() < 1e-10, "({a}, {b}): {c:?}");
            assert!(c.shortness_ok && c.equality_ok && s.eigenfunctions_ok);
            assert!((c.variance - (1.0 / b + 3.0) / 4.0).abs() < 1e-12);
        }
    }
}

#[test]
fn duality_product_on_berger_spheres() {
    for k in 1..=30 {
        let t = k as f64 / 10.0;
        let s = berger_certificate(t).unwrap();
        let c = s.certificate;
        assert!((c.duality_product() - 1.0).abs() < 1e-10, "t = {t}: {c:?}");
        assert!(c.is_optimal(1e-9));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn inflated_pullback_is_constant(p in 0.0..3.0f64, q in 0.0..3.0f64) {
        let pb = inflated_map(p, q).unwrap().pullback_left_invariant();
        prop_assert!(pb.constant && pb.max_variation <= 1e-12);
        let d = [p * p + q * q, p * p + q * q, p * p];
        for i in 0..3 {
            prop_assert!((pb.tensor.get(i, i) - d[i]).abs() <= 1e-12 * d[i].max(1.0));
        }
    }

    #[test]
    fn solution_is_equivariant(a in 0.05..3.0f64, b in 0.05..3.0f64, c in 0.05..3.0f64, k in 0.1..10.0f64) {
        let base = solve_left_invariant(a, b, c).unwrap();
        let perm = solve_left_invariant(c, a, b).unwrap();
        let scaled = solve_left_invariant(k * a, k * b, k * c).unwrap();
        let v = base.certificate.variance;
        prop_assert!((perm.certificate.variance - v).abs() <= 1e-10 * v);
        // h scales by 1/k, so the variance does too
        prop_assert!((scaled.certificate.variance - v / k).abs() <= 1e-10 * v / k);
        prop_assert!(base.certificate.slack.abs() <= 1e-9 * v);
    }
}
