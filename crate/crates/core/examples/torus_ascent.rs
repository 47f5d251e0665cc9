//! Runs the discrete first-eigenvalue ascent for a flat torus and prints
//! the history, the reconstructed map and the primal bound.
//!
//! `cargo run --release --example torus_ascent -- A B N ITERS`

use std::f64::consts::PI;
use std::time::Instant;

use inflatlab::discrete::{
    certificate_from_pairs, maximize_lambda1, primal_lower_bound, AscentOptions, CERTIFICATE_TOL,
};
use inflatlab::torus::lattice_metric;

fn main() {
    let args: Vec<f64> = std::env::args().skip(1).map(|a| a.parse().expect("numeric argument")).collect();
    let (a, b) = (args.first().copied().unwrap_or(0.3), args.get(1).copied().unwrap_or(1.1));
    let n = args.get(2).copied().unwrap_or(32.0) as usize;
    let iters = args.get(3).copied().unwrap_or(100.0) as usize;
    let target = 4.0 * PI * PI / (1.0 - a + a * a + b * b);
    let start = Instant::now();
    let opts = AscentOptions { iters, ..Default::default() };
    let r = maximize_lambda1(&lattice_metric(a, b), n, &opts).expect("ascent");
    for row in &r.history {
        println!("{:4} {:.10} {} {:.3e}", row.iteration, row.objective / target, row.cluster_size, row.step);
    }
    println!("time {:.1}s stalled {} converged {} ranks {:?}", start.elapsed().as_secs_f64(), r.stalled, r.converged, r.rank_counts);
    let lams: Vec<f64> = r.eigenpairs.iter().map(|e| e.lambda / target).collect();
    println!("spectrum/target {lams:?}");
    let cert = certificate_from_pairs(&r.problem, &r.eigenpairs, 1e-3, CERTIFICATE_TOL);
    println!("cluster {} rel residual {:.3e} ok {}", cert.cluster_size, cert.relative_residual, cert.ok);
    let bound = primal_lower_bound(&cert.components, &r.problem, r.objective).expect("bound");
    println!("{bound:?}");
}
