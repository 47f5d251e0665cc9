//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test --release -p inflatlab --test acceptance`.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use inflatlab::discrete::{
    certificate_from_pairs, concavity_probe, gradient_probe, lambda1_of, maximize_lambda1, primal_lower_bound,
    random_field, scaling_probe, AscentOptions, DiscreteProblem, EigenOptions, CERTIFICATE_TOL,
};
use inflatlab::duality::{shortness_scale, weak_duality_certificate, TensorField};
use inflatlab::su2::{
    berger_certificate, berger_lambda1, berger_solution_set, eigen_table_check, inflated_map, phi, phi_minimize,
    s3_integrate, solve_left_invariant, BergerSet, FPoly, QPoly,
};
use inflatlab::torus::{
    inflation_amplitudes, lattice_metric, multiplicity_rule, psi_pqr, quadratic_form_levels,
    solve_pair, spectrum, spectrum_exact, Rational, TrigMap, TrigTerm,
};
use inflatlab::{pair, Frame, SymTensor, Variance};
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit: f64, what: &str) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit, format!("{what} took {:.2}s, limit {limit}s", elapsed.as_secs_f64()))
}

/// Normalized `(a, b)` grid: 20 values of `a` in `[0, 1/2]`, 20 of `b` from
/// the arc upwards.
fn ab_grid() -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(400);
    for i in 0..20 {
        let a = 0.5 * i as f64 / 19.0;
        let arc = (1.0 - a * a).sqrt();
        for j in 0..20 {
            out.push((a, arc + 0.12 * j as f64));
        }
    }
    out
}

fn torus_spectra() -> Outcome {
    let start = Instant::now();
    let el = spectrum_exact(Rational::new(1, 2), Rational::new(3, 4), 1).map_err(|e| e.to_string())?;
    ensure(el[0].multiplicity == 6, format!("equilateral multiplicity {}", el[0].multiplicity))?;
    ensure((el[0].eigenvalue - 16.0 * PI * PI / 3.0).abs() <= 1e-12 * el[0].eigenvalue, "equilateral eigenvalue")?;
    let sq = spectrum_exact(Rational::zero(), Rational::one(), 1).map_err(|e| e.to_string())?;
    ensure(sq[0].multiplicity == 4, format!("square multiplicity {}", sq[0].multiplicity))?;
    ensure((sq[0].eigenvalue - 4.0 * PI * PI).abs() <= 1e-12 * sq[0].eigenvalue, "square eigenvalue")?;
    let mut counts = [0usize; 3];
    for (a, b) in ab_grid() {
        let l = &spectrum(a, b, 1).map_err(|e| e.to_string())?[0];
        let expected = 4.0 * PI * PI / (b * b);
        ensure((l.eigenvalue - expected).abs() <= 1e-12 * expected, format!("λ₁ at ({a}, {b})"))?;
        let rule = multiplicity_rule(a, b, 1e-12);
        ensure(l.multiplicity == rule, format!("multiplicity {} vs {rule} at ({a}, {b})", l.multiplicity))?;
        counts[rule / 2 - 1] += 1;
    }
    within(start.elapsed(), 1.0, "torus spectra")?;
    Ok(format!("400 grid points (mult 2/4/6: {}/{}/{}), {:.3}s", counts[0], counts[1], counts[2], start.elapsed().as_secs_f64()))
}

fn su2_table() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let mut q = || BigRational::new(rng.gen_range(1i64..50).into(), rng.gen_range(1i64..16).into());
        let (u, v, w) = (q(), q(), q());
        let r = eigen_table_check(&u, &v, &w);
        ensure(r.all_ok && r.rows.len() == 8, format!("table fails at ({u}, {v}, {w})"))?;
    }
    let minus_two = Complex::new(BigRational::from_integer((-2).into()), BigRational::zero());
    let mut checked = 0;
    for e0 in 0..=4u32 {
        for e1 in 0..=4 - e0 {
            for e2 in 0..=4 - e0 - e1 {
                for e3 in 0..=4 - e0 - e1 - e2 {
                    let p = QPoly::monomial([e0, e1, e2, e3], Complex::new(BigRational::one(), BigRational::zero()));
                    for (x, y, z) in [(1, 2, 3), (2, 3, 1), (3, 1, 2)] {
                        let lhs = &p.derive(y).derive(x) - &p.derive(x).derive(y);
                        ensure(lhs == p.derive(z).scale(&minus_two), format!("bracket [{x},{y}] on {:?}", [e0, e1, e2, e3]))?;
                    }
                    checked += 1;
                }
            }
        }
    }
    within(start.elapsed(), 5.0, "eigen table")?;
    Ok(format!("100 rational triples, brackets on {checked} monomials, {:.3}s", start.elapsed().as_secs_f64()))
}

fn berger_table() -> Outcome {
    let tc = 1.0 / 6f64.sqrt();
    for (t, mult) in [(0.2, 3), (tc, 7), (0.8, 4)] {
        let l = berger_lambda1(t).map_err(|e| e.to_string())?;
        ensure(l.multiplicity == mult, format!("multiplicity {} at t = {t}, expected {mult}", l.multiplicity))?;
    }
    for k in 1..=60 {
        let t = k as f64 / 20.0;
        let expected = if t <= tc { 8.0 } else { 2.0 + 1.0 / (t * t) };
        let l = berger_lambda1(t).map_err(|e| e.to_string())?.value;
        ensure((l - expected).abs() <= 1e-12 * expected, format!("λ₁({t}) = {l}, expected {expected}"))?;
    }
    let l = berger_lambda1(tc).map_err(|e| e.to_string())?.value;
    ensure((l - 8.0).abs() <= 1e-12 * 8.0, "λ₁ at the critical t")?;
    Ok("multiplicities 3/7/4, λ₁ on 60 values of t".into())
}

fn phi_landscape() -> Outcome {
    let start = Instant::now();
    let pairs = [(0.1, 0.2), (0.1, 0.9), (0.2, 0.5), (0.3, 0.4), (0.3, 0.8), (0.4, 0.6), (0.5, 0.7), (0.6, 0.9), (0.7, 0.8), (0.05, 0.95)];
    let mut worst_point: f64 = 0.0;
    let mut worst_value: f64 = 0.0;
    for (a, b) in pairs {
        let m = phi_minimize(a, b, 100, 100).map_err(|e| e.to_string())?;
        let d = (m.u.powi(2) + (m.v - 1.0 / 3.0).powi(2)).sqrt();
        let dv = (m.value - (1.0 / b + 3.0) / 4.0).abs();
        worst_point = worst_point.max(d);
        worst_value = worst_value.max(dv);
        ensure(d <= 1e-6 && dv <= 1e-9, format!("({a}, {b}): minimizer ({}, {}), value {}", m.u, m.v, m.value))?;
    }
    for (a, label) in [(0.25, BergerSet::BoundaryD1), (1.0, BergerSet::D0), (4.0, BergerSet::BoundaryAtInfinity)] {
        let s = berger_solution_set(a).map_err(|e| e.to_string())?;
        ensure(s.label == label, format!("a = {a}: label {:?}", s.label))?;
        ensure(s.constant && s.spread <= 1e-9, format!("a = {a}: spread {}", s.spread))?;
        ensure(s.matches_global, format!("a = {a}: value {} vs global {}", s.value, s.global_min))?;
    }
    within(start.elapsed(), 10.0, "landscape")?;
    Ok(format!(
        "minimizer error {worst_point:.1e}, value error {worst_value:.1e}, Berger sets flat, {:.2}s",
        start.elapsed().as_secs_f64()
    ))
}

fn pullbacks() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let points: Vec<[f64; 2]> = (0..100).map(|_| [rng.gen::<f64>(), rng.gen::<f64>()]).collect();
    let mut worst_exact: f64 = 0.0;
    let mut weakest_perturbed = f64::INFINITY;
    // a > 0 keeps all three amplitudes positive; see the notes in the README
    for a in [0.05f64, 0.15, 0.25, 0.35, 0.5] {
        for extra in [0.0, 0.3, 1.0] {
            let b = (1.0 - a * a).sqrt() + extra;
            let h = lattice_metric(a, b);
            let (p, q, r) = inflation_amplitudes(a, b);
            let exact = psi_pqr(p, q, r).map_err(|e| e.to_string())?.pullback_residual(&h, &points);
            worst_exact = worst_exact.max(exact);
            for d in [[1e-3, 0.0, 0.0], [0.0, 1e-3, 0.0], [0.0, 0.0, 1e-3], [-1e-3, 0.0, 0.0], [0.0, -1e-3, 0.0], [0.0, 0.0, -1e-3]] {
                let m = psi_pqr(p + d[0], q + d[1], r + d[2]).map_err(|e| e.to_string())?;
                weakest_perturbed = weakest_perturbed.min(m.pullback_residual(&h, &points));
            }
        }
    }
    ensure(worst_exact <= 1e-10, format!("exact amplitudes leave residual {worst_exact:e}"))?;
    ensure(weakest_perturbed >= 1e-4, format!("a perturbation leaves residual only {weakest_perturbed:e}"))?;
    let mut worst_moment: f64 = 0.0;
    for _ in 0..20 {
        let (p, q) = (rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0));
        let pb = inflated_map(p, q).map_err(|e| e.to_string())?.pullback_left_invariant();
        let d = [p * p + q * q, p * p + q * q, p * p];
        let off = pb.tensor.get(0, 1).abs().max(pb.tensor.get(0, 2).abs()).max(pb.tensor.get(1, 2).abs());
        let diag = (0..3).map(|i| (pb.tensor.get(i, i) - d[i]).abs()).fold(off, f64::max);
        worst_moment = worst_moment.max(pb.max_variation).max(diag);
    }
    ensure(worst_moment <= 1e-12, format!("SU(2) pullback residual {worst_moment:e}"))?;
    Ok(format!(
        "torus residual {worst_exact:.1e}, perturbed ≥ {weakest_perturbed:.1e}, SU(2) residual {worst_moment:.1e}"
    ))
}

fn duality_products() -> Outcome {
    let mut worst: f64 = 0.0;
    for (a, b) in ab_grid() {
        let s = solve_pair(a, b).map_err(|e| e.to_string())?;
        let var = s.map.variance();
        let expected = (1.0 - a + a * a + b * b) / (4.0 * PI * PI);
        let c = s.equilateral.certificate;
        let product = var * c.lambda1 / c.pairing_integral;
        worst = worst.max((product - 1.0).abs());
        ensure((var - expected).abs() <= 1e-12 * expected, format!("Parseval variance at ({a}, {b})"))?;
        ensure((product - 1.0).abs() <= 1e-12, format!("torus product {product} at ({a}, {b})"))?;
    }
    for i in 1..10 {
        for j in (i + 1)..10 {
            let (a, b) = (i as f64 / 10.0, j as f64 / 10.0);
            let s = solve_left_invariant(a, b, 1.0).map_err(|e| e.to_string())?;
            let target = phi(0.0, 1.0 / 3.0, a, b).map_err(|e| e.to_string())?;
            let c = s.certificate;
            ensure((c.variance - target).abs() <= 1e-10, format!("generic variance at ({a}, {b})"))?;
            ensure((c.duality_product() - 1.0).abs() <= 1e-10, format!("generic product at ({a}, {b})"))?;
        }
    }
    for k in 1..=30 {
        let t = k as f64 / 10.0;
        let c = berger_certificate(t).map_err(|e| e.to_string())?.certificate;
        let expected = if t <= 1.0 { (1.0 + 3.0 * t * t) / 4.0 } else { 1.0 };
        ensure((c.variance - expected).abs() <= 1e-10, format!("Berger variance at t = {t}: {}", c.variance))?;
        ensure((c.duality_product() - 1.0).abs() <= 1e-10, format!("Berger product at t = {t}"))?;
    }
    Ok(format!("torus worst |Var·Λ − 1| = {worst:.1e}; SU(2) generic and Berger branches match"))
}

fn moment_oracle() -> Outcome {
    let start = Instant::now();
    let samples = 1_000_000;
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let points: Vec<(Complex<f64>, Complex<f64>)> = (0..samples)
        .map(|_| {
            let x: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            (Complex::new(x[0] / r, x[1] / r), Complex::new(x[2] / r, x[3] / r))
        })
        .collect();
    let mut mrng = ChaCha8Rng::seed_from_u64(21);
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        // half the monomials have matching exponents, so a nonzero moment
        let e: [u32; 4] = if k % 2 == 0 {
            let (a, c) = (mrng.gen_range(0..4), mrng.gen_range(0..4));
            [a, a, c, c]
        } else {
            std::array::from_fn(|_| mrng.gen_range(0..4))
        };
        let p = FPoly::monomial(e, Complex::new(1.0, 0.0));
        let exact = s3_integrate(&p);
        let (mut sum, mut sq_re, mut sq_im) = (Complex::new(0.0, 0.0), 0.0, 0.0);
        for &(z1, z2) in &points {
            let v = p.eval(z1, z2);
            sum += v;
            sq_re += v.re * v.re;
            sq_im += v.im * v.im;
        }
        let n = samples as f64;
        let mean = sum / n;
        let se_re = ((sq_re / n - mean.re * mean.re).max(0.0) / n).sqrt();
        let se_im = ((sq_im / n - mean.im * mean.im).max(0.0) / n).sqrt();
        let z_re = (mean.re - exact.re).abs() / se_re.max(1e-300);
        let z_im = (mean.im - exact.im).abs() / se_im.max(1e-300);
        let z = if se_re == 0.0 && (mean.re - exact.re).abs() < 1e-12 { 0.0 } else { z_re }
            .max(if se_im == 0.0 && (mean.im - exact.im).abs() < 1e-12 { 0.0 } else { z_im });
        worst = worst.max(z);
        ensure(z <= 3.0, format!("monomial {e:?}: exact {exact}, Monte Carlo {mean}, {z:.2} standard errors"))?;
    }
    within(start.elapsed(), 10.0, "moment oracle")?;
    Ok(format!("20 monomials, worst deviation {worst:.2} standard errors, {:.2}s", start.elapsed().as_secs_f64()))
}

fn identity_cometric() -> SymTensor {
    SymTensor::identity(2, Variance::Contravariant, Frame::Grid).expect("identity")
}

fn gradient() -> Outcome {
    let eigen = EigenOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let h = lattice_metric(0.2, 1.3);
    let (mut done, mut seed, mut worst) = (0, 0u64, 0.0f64);
    while done < 20 {
        let p = DiscreteProblem::uniform(16, h, identity_cometric())
            .and_then(|p| p.with_field(random_field(16, &mut rng)))
            .map_err(|e| e.to_string())?;
        let r = gradient_probe(&p, 1, 1e-4, seed, &eigen).map_err(|e| e.to_string())?;
        seed += 1;
        if r.trials == 0 {
            continue;
        }
        ensure(r.ok, format!("relative error {:e}", r.worst))?;
        worst = worst.max(r.worst);
        done += 1;
    }
    Ok(format!("20 instances at n = 16, worst relative error {worst:.1e}"))
}

const INSTANCES: [(f64, f64); 3] = [(0.3, 1.1), (0.2, 1.5), (0.5, 0.8660254)];

fn discrete_maximization() -> Outcome {
    let mut lines = Vec::new();
    for (a, b) in INSTANCES {
        let start = Instant::now();
        let r = maximize_lambda1(&lattice_metric(a, b), 32, &AscentOptions::default()).map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        let target = 4.0 * PI * PI / (1.0 - a + a * a + b * b);
        let rel = (r.objective / target - 1.0).abs();
        ensure(rel <= 0.02, format!("({a}, {b}): objective {} vs {target}", r.objective))?;
        ensure(r.history.windows(2).all(|w| w[1].objective >= w[0].objective - 1e-12), "history not monotone")?;
        within(elapsed, 300.0, "ascent")?;
        lines.push(format!("({a}, {b}) {:.2e} in {:.1}s", rel, elapsed.as_secs_f64()));
    }
    Ok(lines.join("; "))
}

fn nadirashvili() -> Outcome {
    let mut lines = Vec::new();
    for (a, b) in INSTANCES {
        let r = maximize_lambda1(&lattice_metric(a, b), 32, &AscentOptions::default()).map_err(|e| e.to_string())?;
        let cert = certificate_from_pairs(&r.problem, &r.eigenpairs, 1e-3, CERTIFICATE_TOL);
        ensure(cert.ok, format!("({a}, {b}): cluster {} residual {:e}", cert.cluster_size, cert.relative_residual))?;
        let bound = primal_lower_bound(&cert.components, &r.problem, r.objective).map_err(|e| e.to_string())?;
        ensure(bound.gap >= -1e-9 && bound.relative_gap <= 0.05, format!("({a}, {b}): gap {:e}", bound.relative_gap))?;
        lines.push(format!("residual {:.1e} gap {:.1e}", cert.relative_residual, bound.relative_gap));
    }
    // planted: h is Σ du⊗du over the lowest cluster of the identity field
    let base = DiscreteProblem::uniform(16, lattice_metric(0.0, 1.0), identity_cometric()).map_err(|e| e.to_string())?;
    let pairs = lambda1_of(&base, 4, &EigenOptions::default()).map_err(|e| e.to_string())?;
    let mut h = [0.0; 3];
    for e in &pairs {
        let c = base.cross_gradient(&e.vector, &e.vector)[0];
        (0..3).for_each(|k| h[k] += c[k]);
    }
    let h = SymTensor::from_upper(2, &h, Variance::Covariant, Frame::Grid).map_err(|e| e.to_string())?;
    let planted = DiscreteProblem::uniform(16, h, identity_cometric()).map_err(|e| e.to_string())?;
    let pairs = lambda1_of(&planted, 4, &EigenOptions::default()).map_err(|e| e.to_string())?;
    let cert = certificate_from_pairs(&planted, &pairs, 1e-6, CERTIFICATE_TOL);
    ensure(cert.relative_residual <= 1e-10, format!("planted residual {:e}", cert.relative_residual))?;
    lines.push(format!("planted {:.1e}", cert.relative_residual));
    Ok(lines.join("; "))
}

fn dimensions() -> Outcome {
    for (a, b) in [(0.1, 1.2), (0.3, 1.1), (0.5, 0.75f64.sqrt()), (0.25, 3.0)] {
        let d = solve_pair(a, b).map_err(|e| e.to_string())?.map_dimension;
        ensure(d == 6, format!("φ_(a,b) at ({a}, {b}) has dimension {d}"))?;
    }
    for b in [1.0, 1.5, 4.0] {
        let d = solve_pair(0.0, b).map_err(|e| e.to_string())?.map_dimension;
        ensure(d == 4, format!("rectangular map at b = {b} has dimension {d}"))?;
    }
    for t in [0.2, 0.5, 0.9] {
        let d = berger_certificate(t).map_err(|e| e.to_string())?.map_dimension;
        ensure(d == 7, format!("Berger t = {t} has dimension {d}"))?;
    }
    for t in [1.0, 1.5, 3.0] {
        let d = berger_certificate(t).map_err(|e| e.to_string())?.map_dimension;
        ensure(d == 4, format!("Berger t = {t} has dimension {d}"))?;
    }
    for (a, b) in [(0.2, 0.5), (0.6, 0.9)] {
        let d = solve_left_invariant(a, b, 1.0).map_err(|e| e.to_string())?.map_dimension;
        ensure(d == 7, format!("generic ({a}, {b}, 1) has dimension {d}"))?;
    }
    Ok("6 / 4 / 7 / 4 / 7".into())
}

/// Random trigonometric map with frequencies in `[-2, 2]²`.
fn random_trig_map(rng: &mut ChaCha8Rng) -> TrigMap {
    let dims = rng.gen_range(1..5);
    let comps = (0..dims)
        .map(|_| {
            (0..rng.gen_range(1..4))
                .map(|_| {
                    let mut f = [rng.gen_range(-2i64..=2), rng.gen_range(-2i64..=2)];
                    if f == [0, 0] {
                        f = [1, 0];
                    }
                    let amp = rng.gen_range(-1.0..1.0);
                    if rng.gen::<bool>() {
                        TrigTerm::cos(f, amp)
                    } else {
                        TrigTerm::sin(f, amp)
                    }
                })
                .collect()
        })
        .collect();
    TrigMap::new(comps).expect("valid map")
}

fn property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst_slack = f64::INFINITY;
    for _ in 0..1000 {
        let a = rng.gen_range(0.0..0.5);
        let b = (1.0f64 - a * a).sqrt() + rng.gen_range(0.0..2.0);
        let h = lattice_metric(a, b);
        let map = random_trig_map(&mut rng);
        // the 9×9 grid integrates the degree ≤ 4 pullback exactly
        let sampled = map.sample(9).map_err(|e| e.to_string())?;
        let field = TensorField::Constant(h);
        let s = shortness_scale(&sampled, &field).map_err(|e| e.to_string())?;
        if s == 0.0 {
            continue;
        }
        let variance = sampled.scaled(1.0 / s).second_moment();
        let (x, y, z): (f64, f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let g = SymTensor::from_upper(2, &[x * x + 0.01, x * y, y * y + z * z + 0.01], Variance::Contravariant, Frame::Torus)
            .map_err(|e| e.to_string())?;
        let gm = [[g.get(0, 0), g.get(0, 1)], [g.get(1, 0), g.get(1, 1)]];
        let lambda1 = quadratic_form_levels(gm, 1).map_err(|e| e.to_string())?[0].0;
        let pairing = pair(&g, &h).map_err(|e| e.to_string())?;
        let c = weak_duality_certificate(variance, lambda1, pairing, true, false).map_err(|e| e.to_string())?;
        worst_slack = worst_slack.min(c.slack);
        ensure(c.slack >= -1e-9, format!("slack {:e}", c.slack))?;
    }
    let eigen = EigenOptions::default();
    let base = DiscreteProblem::uniform(12, lattice_metric(0.3, 1.1), identity_cometric()).map_err(|e| e.to_string())?;
    let conc = concavity_probe(&base, 10, 13, &eigen).map_err(|e| e.to_string())?;
    ensure(conc.ok, format!("concavity defect {:e}", conc.worst))?;
    let mut frng = ChaCha8Rng::seed_from_u64(14);
    let random = base.with_field(random_field(12, &mut frng)).map_err(|e| e.to_string())?;
    let scal = scaling_probe(&random, &[0.5, 2.0, 3.7, 10.0], &eigen).map_err(|e| e.to_string())?;
    ensure(scal.ok, format!("scaling error {:e}", scal.worst))?;
    Ok(format!(
        "min slack {worst_slack:.2e} over 1000 pairs; concavity excess ≥ {:.1e}; scaling error {:.1e}",
        conc.worst, scal.worst
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("torus spectra", torus_spectra),
        ("SU(2) eigen table and brackets", su2_table),
        ("Berger first eigenvalue and multiplicity", berger_table),
        ("Φ landscape minima", phi_landscape),
        ("pullback identities", pullbacks),
        ("duality products", duality_products),
        ("moment oracle", moment_oracle),
        ("eigenvalue gradient", gradient),
        ("discrete maximization", discrete_maximization),
        ("constructive certificate", nadirashvili),
        ("inflation dimensions", dimensions),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.2}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
