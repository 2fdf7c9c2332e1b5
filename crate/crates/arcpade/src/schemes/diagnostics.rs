use super::SchemeLevel;
use crate::geometry::{phi_of, ArcF, GammaCurve, GeometryError};
use crate::numerics::{abs_f64, to_c64};
use rug::Complex;
use serde::Serialize;

/// `|r_n(z)|` at an interior probe.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeValue {
    pub z: [f64; 2],
    pub abs_rn: f64,
    pub log_abs_rn: f64,
}

/// How far `r_n` is from unimodular on the arc.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymmetryReport {
    pub n: usize,
    pub samples: usize,
    /// `sup |log|r_n^+||` over the arc samples.
    pub sup_log_plus: f64,
    pub sup_log_minus: f64,
    /// Largest `|r_n^+ r_n^- - 1|`.
    pub product_residual: f64,
    pub probes: Vec<ProbeValue>,
}

impl SymmetryReport {
    /// `max(sup |log|r_n^+||, sup |log|r_n^-||)`.
    pub fn sup_log(&self) -> f64 {
        self.sup_log_plus.max(self.sup_log_minus)
    }
}

/// Samples `r_n^±` on `samples` points of the arc and `|r_n|` at `probes`.
pub fn symmetry_diagnostic(
    level: &SchemeLevel,
    curve: &GammaCurve,
    samples: usize,
    probes: &[Complex],
    prec: u32,
) -> Result<SymmetryReport, GeometryError> {
    let arc = ArcF::new(curve, samples, prec)?;
    let (mut sup_plus, mut sup_minus, mut product): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for s in arc.samples() {
        sup_plus = sup_plus.max(level.log_abs_at_tau(&s.tau_plus).abs());
        sup_minus = sup_minus.max(level.log_abs_at_tau(&s.tau_minus).abs());
        let (rp, rm) = level.boundary(s);
        product = product.max(abs_f64(&(Complex::with_val(prec, &rp * &rm) - 1u32)));
    }
    let probes = probes
        .iter()
        .map(|z| {
            let tau = phi_of(z, curve)?;
            let log_abs_rn = level.log_abs_at_tau(&tau);
            let z = to_c64(z);
            Ok(ProbeValue {
                z: [z.re, z.im],
                abs_rn: log_abs_rn.exp(),
                log_abs_rn,
            })
        })
        .collect::<Result<Vec<_>, GeometryError>>()?;
    Ok(SymmetryReport {
        n: level.n(),
        samples,
        sup_log_plus: sup_plus,
        sup_log_minus: sup_minus,
        product_residual: product,
        probes,
    })
}

/// Least-squares rate `q` in `|r_n(z)| ~ C q^n` from `(n, log|r_n(z)|)` pairs.
pub fn decay_rate(points: &[(usize, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let m = points.len() as f64;
    let mean_n = points.iter().map(|p| p.0 as f64).sum::<f64>() / m;
    let mean_l = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 as f64 - mean_n).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 as f64 - mean_n) * (p.1 - mean_l)).sum();
    Some((sxy / sxx).exp())
}

