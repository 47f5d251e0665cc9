use inflatlab::discrete::{certificate_from_pairs, lambda1_of, primal_lower_bound, DiscreteProblem, CERTIFICATE_TOL};
use inflatlab::DualityCertificate;
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use crate::args::{CheckDuality, DiscreteMaximize, Format, Su2Berger, Su2Landscape, Su2Solve, Su2Table, TorusParams, TorusSpectrum};
use crate::discrete::{eigen_options, validate};
use crate::output::{Body, Failure, Report, SCHEMA};
use crate::{su2, torus};

/// Largest tolerated difference `|x − y| / max(1, |x|)` between stored and
/// recomputed closed-form results.
pub const RECOMPUTE_TOL: f64 = 1e-12;
/// Same for discrete quantities that depend on eigenvectors, which the
/// iterative solver only resolves to its residual tolerance.
pub const EIGENVECTOR_TOL: f64 = 1e-8;
/// Tolerance of the slack and weak-duality consistency checks.
pub const CONSISTENCY_TOL: f64 = 1e-9;

fn params<T: DeserializeOwned>(stored: &Value) -> Result<T, Failure> {
    let p = stored.get("params").ok_or_else(|| Failure::Precondition("input has no params".into()))?;
    Ok(serde_json::from_value(p.clone())?)
}

/// Recomputes a closed-form result from its stored parameters.
fn recompute(command: &str, stored: &Value) -> Result<Value, Failure> {
    match command {
        "torus spectrum" => torus::spectrum_cmd(&params::<TorusSpectrum>(stored)?),
        "torus solve" => torus::solve_cmd(&params::<TorusParams>(stored)?),
        "su2 table" => su2::table_cmd(&params::<Su2Table>(stored)?),
        "su2 solve" => su2::solve_cmd(&params::<Su2Solve>(stored)?),
        "su2 berger" => su2::berger_cmd(&params::<Su2Berger>(stored)?),
        "su2 landscape" => {
            let p = Su2Landscape { format: Format::Json, ..params::<Su2Landscape>(stored)? };
            match su2::landscape_cmd(&p)? {
                Body::Json(v) => Ok(v),
                Body::Text(_) => unreachable!("json format requested"),
            }
        }
        other => Err(Failure::Precondition(format!("cannot check output of command {other:?}"))),
    }
}

#[derive(Default)]
struct Diff {
    max: f64,
    mismatches: Vec<String>,
}

impl Diff {
    fn walk(&mut self, path: &str, stored: &Value, fresh: &Value, tol: f64) {
        match (stored, fresh) {
            (Value::Number(x), Value::Number(y)) => {
                let (x, y) = (x.as_f64().unwrap_or(f64::NAN), y.as_f64().unwrap_or(f64::NAN));
                let d = (x - y).abs() / x.abs().max(1.0);
                if d.is_nan() || d > tol {
                    self.mismatches.push(format!("{path}: stored {x}, recomputed {y}"));
                }
                if d > self.max || d.is_nan() {
                    self.max = d;
                }
            }
            (Value::Array(xs), Value::Array(ys)) => {
                if xs.len() != ys.len() {
                    self.mismatches.push(format!("{path}: length {} vs {}", xs.len(), ys.len()));
                    return;
                }
                for (k, (x, y)) in xs.iter().zip(ys).enumerate() {
                    self.walk(&format!("{path}[{k}]"), x, y, tol);
                }
            }
            (Value::Object(xs), Value::Object(ys)) => {
                for (k, x) in xs {
                    match ys.get(k) {
                        Some(y) => self.walk(&format!("{path}.{k}"), x, y, tol),
                        None => self.mismatches.push(format!("{path}.{k}: not recomputed")),
                    }
                }
                for k in ys.keys().filter(|k| !xs.contains_key(*k)) {
                    self.mismatches.push(format!("{path}.{k}: missing from input"));
                }
            }
            (x, y) if x == y => {}
            (x, y) => self.mismatches.push(format!("{path}: stored {x}, recomputed {y}")),
        }
    }
}

/// Every embedded duality certificate must satisfy its own invariants.
fn certificate_violations(path: &str, v: &Value, out: &mut Vec<String>) {
    match v {
        Value::Object(m) => {
            if m.contains_key("slack") && m.contains_key("pairing_integral") {
                match serde_json::from_value::<DualityCertificate>(v.clone()) {
                    Ok(c) => out.extend(c.consistency_violations(CONSISTENCY_TOL).into_iter().map(|s| format!("{path}: {s}"))),
                    Err(e) => out.push(format!("{path}: malformed certificate: {e}")),
                }
            }
            for (k, x) in m {
                certificate_violations(&format!("{path}.{k}"), x, out);
            }
        }
        Value::Array(xs) => {
            for (k, x) in xs.iter().enumerate() {
                certificate_violations(&format!("{path}[{k}]"), x, out);
            }
        }
        _ => {}
    }
}

fn number(v: &Value, path: &[&str]) -> Result<f64, Failure> {
    let mut cur = v;
    for key in path {
        cur = cur.get(key).ok_or_else(|| Failure::Precondition(format!("input lacks {}", path.join("."))))?;
    }
    cur.as_f64().ok_or_else(|| Failure::Precondition(format!("{} is not a number", path.join("."))))
}

/// Re-verifies a discrete run from its stored final field.
fn check_discrete(stored: &Value, diff: &mut Diff, violations: &mut Vec<String>) -> Result<(), Failure> {
    let p: DiscreteMaximize = params(stored)?;
    validate(&p)?;
    let field = stored
        .get("field")
        .ok_or_else(|| Failure::Precondition("input lacks the final field; pass result.json".into()))?;
    let field: DiscreteProblem = serde_json::from_value(field.clone())?;
    // re-validate through the checked constructor
    let field = DiscreteProblem::new(
        field.n(),
        *field.h(),
        field.gstar_field().to_vec(),
        field.volume_weights().to_vec(),
    )?;
    let pairing = field.pairing();
    if (pairing - 1.0).abs() > RECOMPUTE_TOL {
        violations.push(format!("field pairing is {pairing}, not 1"));
    }
    let eigen = eigen_options(&p);
    let count = stored.get("eigenvalues").and_then(Value::as_array).map_or(8, |a| a.len().max(1));
    let pairs = lambda1_of(&field, count, &eigen)?;
    let lambda1 = pairs[0].lambda;
    let cert = certificate_from_pairs(&field, &pairs, p.cluster_tol, CERTIFICATE_TOL);
    let bound = primal_lower_bound(&cert.components, &field, lambda1)?;
    let fresh = json!({ "objective": lambda1 / pairing, "lambda1": lambda1, "pairing": pairing });
    let stored_view = json!({
        "objective": stored.get("objective"),
        "lambda1": stored.get("lambda1"),
        "pairing": stored.get("pairing"),
    });
    diff.walk("", &stored_view, &fresh, RECOMPUTE_TOL);
    let fresh = json!({
        "certificate": { "cluster_size": cert.cluster_size, "ok": cert.ok },
        "bound": { "dual_value": bound.dual_value, "bound": bound.bound, "stretch": bound.stretch },
    });
    let stored_view = json!({
        "certificate": {
            "cluster_size": stored.pointer("/certificate/cluster_size"),
            "ok": stored.pointer("/certificate/ok"),
        },
        "bound": {
            "dual_value": stored.pointer("/bound/dual_value"),
            "bound": stored.pointer("/bound/bound"),
            "stretch": stored.pointer("/bound/stretch"),
        },
    });
    diff.walk("", &stored_view, &fresh, EIGENVECTOR_TOL);
    let (b, d) = (number(stored, &["bound", "bound"])?, number(stored, &["bound", "dual_value"])?);
    if b > d * (1.0 + CONSISTENCY_TOL) {
        violations.push(format!("primal bound {b} exceeds dual value {d}"));
    }
    if bound.gap < -CONSISTENCY_TOL * bound.dual_value {
        violations.push(format!("recomputed gap {} is negative", bound.gap));
    }
    Ok(())
}

pub fn duality_cmd(c: &CheckDuality) -> Result<Report, Failure> {
    let text = std::fs::read_to_string(&c.input)?;
    let stored: Value = serde_json::from_str(&text)?;
    if stored.get("schema").and_then(Value::as_u64) != Some(SCHEMA) {
        return Err(Failure::Precondition(format!("input schema is not {SCHEMA}")));
    }
    let command = stored
        .get("command")
        .and_then(Value::as_str)
        .ok_or_else(|| Failure::Precondition("input has no command".into()))?
        .to_string();
    let mut diff = Diff::default();
    let mut violations = Vec::new();
    if command == "discrete maximize" {
        check_discrete(&stored, &mut diff, &mut violations)?;
    } else {
        let fresh = recompute(&command, &stored)?;
        diff.walk("", &stored, &fresh, RECOMPUTE_TOL);
    }
    certificate_violations("", &stored, &mut violations);
    let ok = diff.mismatches.is_empty() && violations.is_empty();
    let out = json!({
        "schema": SCHEMA,
        "command": "check duality",
        "source_command": command,
        "tolerance": RECOMPUTE_TOL,
        "max_difference": diff.max,
        "mismatches": diff.mismatches,
        "violations": violations,
        "ok": ok,
    });
    let failure = (!ok).then(|| {
        Failure::Verification(format!(
            "{} mismatches and {} violations",
            diff.mismatches.len(),
            violations.len()
        ))
    });
    Ok(Report { body: Body::Json(out), failure })
}
