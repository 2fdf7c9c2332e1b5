use super::{speedconv_ratio, MeasureSpec, PadeError, PadeResult};
use crate::numerics::abs_f64;
use num_complex::Complex64;
use rug::Complex;
use serde::{Deserialize, Serialize};
use std::fmt::Write;

/// Rectangular probe grid; points closer than `tube` to `F` are skipped.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldGrid {
    pub re: [f64; 2],
    pub im: [f64; 2],
    pub nx: usize,
    pub ny: usize,
    pub tube: f64,
}

impl Default for FieldGrid {
    fn default() -> Self {
        Self {
            re: [-3.0, 3.0],
            im: [-3.0, 3.0],
            nx: 25,
            ny: 25,
            tube: 0.1,
        }
    }
}

impl FieldGrid {
    pub fn points(&self) -> impl Iterator<Item = Complex64> + '_ {
        let step = |range: [f64; 2], n: usize, k: usize| {
            if n <= 1 {
                range[0]
            } else {
                range[0] + (range[1] - range[0]) * k as f64 / (n - 1) as f64
            }
        };
        (0..self.ny).flat_map(move |j| (0..self.nx).map(move |i| Complex64::new(step(self.re, self.nx, i), step(self.im, self.ny, j))))
    }
}

/// `re,im,abs_error,abs_rho_minus_one` on the probe grid. Poles of the
/// approximant are skipped along with the tube around `F`.
pub fn error_field_csv(pr: &PadeResult, ms: &MeasureSpec, grid: &FieldGrid) -> Result<String, PadeError> {
    let prec = ms.prec();
    let curve = pr.ortho().curve();
    let mut out = String::from("re,im,abs_error,abs_rho_minus_one\n");
    for z in grid.points() {
        if curve.distance_to_arc(z) < grid.tube {
            continue;
        }
        let zc = Complex::with_val(prec, (z.re, z.im));
        let err = match pr.error(&zc) {
            Err(PadeError::AtPoleOfApproximant { .. }) => continue,
            other => other?,
        };
        let rho = speedconv_ratio(pr, ms, &zc)? - 1u32;
        writeln!(out, "{:.17e},{:.17e},{:.6e},{:.6e}", z.re, z.im, abs_f64(&err), abs_f64(&rho)).expect("writing to a string");
    }
    Ok(out)
}
