use super::{CurveSource, GammaCurve, GeometryError};
use crate::numerics::float_to_decimal;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::fmt::Write as _;

/// JSON header written on the first line of a curve CSV (after `# `).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveHeader {
    pub source: String,
    /// Generators as `[re, im, multiplicity]` decimal strings (level curves).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub generators: Vec<[String; 3]>,
    pub node_count: usize,
    pub fourier_tail: f64,
    pub symmetry_residual: f64,
    pub endpoint_residual: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level_residual: Option<f64>,
    pub star_shaped: bool,
}

impl CurveHeader {
    pub fn of(curve: &GammaCurve) -> Self {
        let r = curve.report();
        let (source, generators) = match curve.source() {
            CurveSource::Level(g) => (
                "level".to_string(),
                g.generators()
                    .iter()
                    .map(|gen| {
                        [
                            float_to_decimal(gen.eps.real(), 40),
                            float_to_decimal(gen.eps.imag(), 40),
                            gen.multiplicity.to_string(),
                        ]
                    })
                    .collect(),
            ),
            CurveSource::Param(p) => (p.describe(), Vec::new()),
        };
        Self {
            source,
            generators,
            node_count: r.node_count,
            fourier_tail: r.fourier_tail,
            symmetry_residual: r.symmetry_residual,
            endpoint_residual: r.endpoint_residual,
            level_residual: r.level_residual,
            star_shaped: r.star_shaped,
        }
    }
}

/// Curve nodes as CSV `theta,re_tau,im_tau` preceded by a `# {json}` header.
pub fn write_curve_csv(curve: &GammaCurve) -> String {
    let header = serde_json::to_string(&CurveHeader::of(curve)).expect("header serializes");
    let mut out = format!("# {header}\ntheta,re_tau,im_tau\n");
    let m = curve.nodes().len();
    for (k, t) in curve.nodes().iter().enumerate() {
        let theta = TAU * k as f64 / m as f64;
        writeln!(out, "{theta:.17e},{:.17e},{:.17e}", t.re, t.im).expect("write to string");
    }
    out
}

/// Parses the output of [`write_curve_csv`].
pub fn read_curve_csv(text: &str) -> Result<(CurveHeader, Vec<(f64, Complex64)>), GeometryError> {
    let bad = |msg: &str| GeometryError::Invariant(format!("curve csv: {msg}"));
    let mut lines = text.lines();
    let header_line = lines.next().ok_or_else(|| bad("empty file"))?;
    let json = header_line.strip_prefix("# ").ok_or_else(|| bad("missing header"))?;
    let header: CurveHeader = serde_json::from_str(json).map_err(|e| bad(&e.to_string()))?;
    if lines.next() != Some("theta,re_tau,im_tau") {
        return Err(bad("missing column line"));
    }
    let mut nodes = Vec::new();
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let cols: Vec<f64> = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| bad(&e.to_string()))?;
        if cols.len() != 3 {
            return Err(bad("expected three columns"));
        }
        nodes.push((cols[0], Complex64::new(cols[1], cols[2])));
    }
    if nodes.len() != header.node_count {
        return Err(bad("node count does not match header"));
    }
    Ok((header, nodes))
}
