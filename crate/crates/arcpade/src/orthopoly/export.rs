use super::{OrthoError, OrthoResult, Sa2Report};
use crate::numerics::{float_to_decimal, to_c64, RootOptions};
use rug::Complex;
use serde_json::{json, Value};
use std::fmt::Write;

fn pair(z: &Complex, digits: usize) -> Value {
    json!([float_to_decimal(z.real(), digits), float_to_decimal(z.imag(), digits)])
}

/// `q_n` (ascending coefficients), `gamma_n`, `G_{w_n}`, residuals and
/// solver diagnostics as JSON. Numbers carried at working precision are
/// written as decimal strings.
pub fn ortho_to_json(result: &OrthoResult, digits: usize) -> Value {
    json!({
        "n": result.n(),
        "q": result.q().coeffs().iter().map(|c| pair(c, digits)).collect::<Vec<_>>(),
        "gamma": pair(result.gamma(), digits),
        "gm": pair(result.gm(), digits),
        "residuals": result.residuals().iter().map(|c| pair(c, digits)).collect::<Vec<_>>(),
        "diagnostics": serde_json::to_value(result.diagnostics()).expect("diagnostics serialize"),
    })
}

/// `re,im,distance` for every zero of `q_n`, distance measured to the arc.
pub fn zeros_to_csv(result: &OrthoResult, roots: &RootOptions, digits: usize) -> Result<String, OrthoError> {
    let curve = result.curve();
    let mut out = String::from("re,im,distance\n");
    for z in result.zeros_with(roots)? {
        let d = curve.distance_to_arc(to_c64(&z));
        writeln!(
            out,
            "{},{},{:.6e}",
            float_to_decimal(z.real(), digits),
            float_to_decimal(z.imag(), digits),
            d
        )
        .expect("writing to a string");
    }
    Ok(out)
}

/// Boundary residuals `d_n^±` as CSV.
pub fn sa2_to_csv(report: &Sa2Report) -> String {
    let mut out = String::from("re_t,im_t,re_d_plus,im_d_plus,re_d_minus,im_d_minus\n");
    for s in &report.samples {
        writeln!(
            out,
            "{:.17e},{:.17e},{:.6e},{:.6e},{:.6e},{:.6e}",
            s.t[0], s.t[1], s.d_plus[0], s.d_plus[1], s.d_minus[0], s.d_minus[1]
        )
        .expect("writing to a string");
    }
    out
}
