use inflatlab::torus::{check_normalized, recognize_rational, solve_pair, spectrum, spectrum_exact, SpectralLevel};
use serde_json::{json, Value};

use crate::args::{TorusParams, TorusSpectrum};
use crate::output::{envelope, to_value, Failure};

/// Inputs within this distance of a fraction with denominator at most
/// `SNAP_DEN` are treated as that fraction.
pub const SNAP_DEN: i128 = 1000;
pub const SNAP_TOL: f64 = 1e-7;

pub fn spectrum_cmd(p: &TorusSpectrum) -> Result<Value, Failure> {
    check_normalized(p.a, p.b)?;
    if p.levels == 0 {
        return Err(Failure::Precondition("--levels must be at least 1".into()));
    }
    let snapped = recognize_rational(p.a, SNAP_DEN, SNAP_TOL).zip(recognize_rational(p.b * p.b, SNAP_DEN, SNAP_TOL));
    let (levels, exact) = match snapped {
        Some((a, b_sq)) => (spectrum_exact(a, b_sq, p.levels)?, true),
        None => (spectrum(p.a, p.b, p.levels)?, false),
    };
    let levels: Vec<Value> = levels.iter().map(level_view).collect();
    Ok(envelope("torus spectrum", to_value(p), json!({ "exact": exact, "levels": levels })))
}

fn level_view(l: &SpectralLevel) -> Value {
    json!({
        "eigenvalue": l.eigenvalue,
        "multiplicity": l.multiplicity,
        "generators": l.generators,
        "frequencies": l.frequencies,
    })
}

pub fn solve_cmd(p: &TorusParams) -> Result<Value, Failure> {
    let s = solve_pair(p.a, p.b)?;
    let c = &s.equilateral.certificate;
    let payload = json!({
        "solution": to_value(&s),
        "variance": s.map.variance(),
        "dual_objective": c.dual_objective(),
        "duality_product": c.duality_product(),
        "optimal": c.is_optimal(1e-9),
    });
    Ok(envelope("torus solve", to_value(p), payload))
}
