use std::f64::consts::PI;
use std::path::Path;

use inflatlab::discrete::{
    certificate_from_pairs, maximize_lambda1, primal_lower_bound, AscentOptions, AscentResult, EigenOptions,
    CERTIFICATE_TOL,
};
use inflatlab::torus::{check_normalized, lattice_metric};
use serde_json::{json, Map, Value};

use crate::args::{DiscreteMaximize, Format};
use crate::output::{envelope, render, to_value, Body, Failure, Report};

pub fn validate(p: &DiscreteMaximize) -> Result<(), Failure> {
    check_normalized(p.a, p.b)?;
    if p.n < 4 {
        return Err(Failure::Precondition(format!("--n must be at least 4, got {}", p.n)));
    }
    if !(p.cluster_tol > 0.0 && p.cluster_tol < 1.0) {
        return Err(Failure::Precondition(format!("--cluster-tol must lie in (0, 1), got {}", p.cluster_tol)));
    }
    Ok(())
}

pub fn eigen_options(p: &DiscreteMaximize) -> EigenOptions {
    EigenOptions { seed: p.seed, ..EigenOptions::default() }
}

/// Optimal value of the continuum problem on the same torus.
pub fn continuum_objective(a: f64, b: f64) -> f64 {
    let a = a.clamp(0.0, 0.5);
    4.0 * PI * PI / (1.0 - a + a * a + b * b)
}

fn history_csv(r: &AscentResult) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in &r.history {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Precondition(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn maximize_cmd(p: &DiscreteMaximize) -> Result<Report, Failure> {
    validate(p)?;
    let opts = AscentOptions { iters: p.iters, eigen: eigen_options(p), ..AscentOptions::default() };
    let r = maximize_lambda1(&lattice_metric(p.a, p.b), p.n, &opts)?;
    let lambda1 = r.eigenpairs[0].lambda;
    let cert = certificate_from_pairs(&r.problem, &r.eigenpairs, p.cluster_tol, CERTIFICATE_TOL);
    let bound = primal_lower_bound(&cert.components, &r.problem, lambda1)?;
    let target = continuum_objective(p.a, p.b);
    let eigenvalues: Vec<f64> = r.eigenpairs.iter().map(|e| e.lambda).collect();
    let summary = json!({
        "objective": r.objective,
        "lambda1": lambda1,
        "pairing": r.problem.pairing(),
        "eigenvalues": eigenvalues,
        "converged": r.converged,
        "stalled": r.stalled,
        "iterations": r.history.len().saturating_sub(1),
        "rank_counts": r.rank_counts,
        "continuum_objective": target,
        "relative_error": (r.objective - target).abs() / target,
        "certificate": to_value(&cert),
        "bound": to_value(&bound),
    });
    let summary = envelope("discrete maximize", to_value(p), summary);
    let mut full = summary.clone();
    let obj = full.as_object_mut().expect("envelope is an object");
    obj.insert("history".into(), to_value(&r.history));
    obj.insert("field".into(), to_value(&r.problem));

    let csv = history_csv(&r)?;
    let body = match (&p.out, p.format) {
        (_, Format::Csv) => Body::Text(csv.clone()),
        (Some(_), Format::Json) => Body::Json(summary),
        (None, Format::Json) => Body::Json(full.clone()),
    };
    if let Some(dir) = &p.out {
        write_dir(dir, &csv, &r, &full)?;
    }
    let failure = r.stalled.then(|| {
        Failure::Numerical(format!("ascent stalled after {} iterations at objective {}", r.history.len() - 1, r.objective))
    });
    Ok(Report { body, failure })
}

fn write_dir(dir: &Path, csv: &str, r: &AscentResult, full: &Value) -> Result<(), Failure> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("history.csv"), csv)?;
    let mut field = Map::new();
    field.insert("schema".into(), json!(crate::output::SCHEMA));
    if let Value::Object(m) = to_value(&r.problem) {
        field.extend(m);
    }
    std::fs::write(dir.join("field.json"), render(&Body::Json(Value::Object(field))))?;
    std::fs::write(dir.join("result.json"), render(&Body::Json(full.clone())))?;
    Ok(())
}
