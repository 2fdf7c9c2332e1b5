use super::SchemeLevel;
use crate::geometry::SchemePoint;
use crate::numerics::float_to_decimal;
use rug::Complex;
use serde_json::{json, Value};

fn pair(z: &Complex, digits: usize) -> Value {
    json!([float_to_decimal(z.real(), digits), float_to_decimal(z.imag(), digits)])
}

/// One level as JSON: `n`, the points in `z` and `tau = phi(e)` coordinates
/// (decimal strings, `null` at infinity) and the coefficients of `v_n`.
pub fn level_to_json(level: &SchemeLevel, digits: usize) -> Value {
    let points: Vec<Value> = level
        .points()
        .iter()
        .map(|p| match p {
            SchemePoint::Finite { z, phi } => json!({ "z": pair(z, digits), "tau": pair(phi, digits) }),
            SchemePoint::Infinity => json!({ "z": Value::Null, "tau": Value::Null }),
        })
        .collect();
    let v: Vec<Value> = level.v().coeffs().iter().map(|c| pair(c, digits)).collect();
    let mut out = json!({ "n": level.n(), "points": points, "v": v });
    if let Some(flux) = level.flux() {
        out["flux"] = serde_json::to_value(flux).expect("flux info serializes");
    }
    out
}

/// A list of levels as a JSON array.
pub fn levels_to_json(levels: &[&SchemeLevel], digits: usize) -> Value {
    Value::Array(levels.iter().map(|l| level_to_json(l, digits)).collect())
}
