use inflatlab::su2::{
    berger_certificate, berger_lambda1, berger_solution_set, eigen_table_check, landscape, Su2Solution,
};
use inflatlab::torus::{recognize_rational, Rational};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Format, Su2Berger, Su2Landscape, Su2Solve, Su2Table};
use crate::output::{envelope, to_value, Body, Failure};
use crate::torus::{SNAP_DEN, SNAP_TOL};

fn big(r: Rational) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

pub fn table_cmd(p: &Su2Table) -> Result<Value, Failure> {
    for (name, x) in [("u", p.u), ("v", p.v), ("w", p.w)] {
        if !(x > 0.0 && x.is_finite()) {
            return Err(Failure::Precondition(format!("--{name} must be positive, got {x}")));
        }
    }
    let snap = |x: f64| recognize_rational(x, SNAP_DEN, SNAP_TOL).map(big);
    let (report, exact) = match (snap(p.u), snap(p.v), snap(p.w)) {
        (Some(u), Some(v), Some(w)) => (eigen_table_check(&u, &v, &w), true),
        _ => (eigen_table_check(&p.u, &p.v, &p.w), false),
    };
    Ok(envelope("su2 table", to_value(p), json!({ "exact": exact, "report": to_value(&report) })))
}

#[derive(Serialize)]
struct CsvRow {
    u: f64,
    v: f64,
    region: String,
    phi: f64,
}

pub fn landscape_cmd(p: &Su2Landscape) -> Result<Body, Failure> {
    if p.grid == 0 {
        return Err(Failure::Precondition("--grid must be at least 1".into()));
    }
    if !(p.extent > 0.0 && p.extent.is_finite()) {
        return Err(Failure::Precondition(format!("--extent must be positive, got {}", p.extent)));
    }
    let l = landscape(p.a, p.b, p.grid, p.extent)?;
    match p.format {
        Format::Json => Ok(Body::Json(envelope("su2 landscape", to_value(p), json!({ "landscape": to_value(&l) })))),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for s in &l.samples {
                w.serialize(CsvRow { u: s.u, v: s.v, region: s.region.to_string(), phi: s.phi })?;
            }
            let bytes = w.into_inner().map_err(|e| Failure::Precondition(format!("csv: {e}")))?;
            Ok(Body::Text(String::from_utf8(bytes).expect("csv output is UTF-8")))
        }
    }
}

/// Flattened view of a solution; map components are listed as monomial
/// terms `coefficient · z^exponent` with exponents on `(z₁, z̄₁, z₂, z̄₂)`.
fn solution_view(s: &Su2Solution) -> Value {
    let components: Vec<Value> = s
        .map
        .components()
        .iter()
        .map(|c| {
            let terms: Vec<Value> =
                c.terms().map(|(e, z)| json!({ "exponent": e, "re": z.re, "im": z.im })).collect();
            Value::Array(terms)
        })
        .collect();
    json!({
        "branch": to_value(&s.branch),
        "frame_params": s.frame_params,
        "permutation": s.permutation,
        "h": to_value(&s.h),
        "gstar": to_value(&s.gstar),
        "gstar_original": to_value(&s.gstar_original),
        "map": { "components": components, "dimension": s.map_dimension },
        "lambda1_multiplicity": s.lambda1_multiplicity,
        "shortness_gap": to_value(&s.shortness_gap),
        "eigenfunctions_ok": s.eigenfunctions_ok,
        "certificate": to_value(&s.certificate),
        "duality_product": s.certificate.duality_product(),
        "optimal": s.certificate.is_optimal(1e-9),
    })
}

pub fn solve_cmd(p: &Su2Solve) -> Result<Value, Failure> {
    let s = inflatlab::su2::solve_left_invariant(p.a, p.b, p.c)?;
    Ok(envelope("su2 solve", to_value(p), json!({ "solution": solution_view(&s) })))
}

pub fn berger_cmd(p: &Su2Berger) -> Result<Value, Failure> {
    let l = berger_lambda1(p.t)?;
    // h_t has cometric (1, 1, 1/t²), proportional to (t², t², 1)
    let set = berger_solution_set(p.t * p.t)?;
    let s = berger_certificate(p.t)?;
    let payload = json!({
        "lambda1": l.value,
        "multiplicity": l.multiplicity,
        "rows": to_value(&l.rows),
        "solution_set": to_value(&set),
        "solution": solution_view(&s),
    });
    Ok(envelope("su2 berger", to_value(p), payload))
}
