use crate::config::{build_curve, build_scheme, build_setup, RunConfig, Setup};
use crate::output::{CliError, Output, Stage};
use arcpade::cauchy::{upsilon_margin, SzegoEvaluator, Verdict};
use arcpade::geometry::{joukowski_c64, write_curve_csv, CurveHeader, GammaCurve};
use arcpade::numerics::{abs_f64, float_to_decimal, to_c64, Complex};
use arcpade::orthopoly::{
    ortho_to_json, sa1_ratio, sa2_residuals, sa2_trend, sa3_moments, solve_qn, zeros_to_csv, OrthoResult, Sa2Report, Trend,
};
use arcpade::pade::{error_field_csv, pade, pade_evaluate, speedconv_ratio, PadeError, PadeResult};
use arcpade::schemes::{level_to_json, symmetry_diagnostic, InterpolationScheme};
use serde_json::{json, Value};
use std::fmt::Write;
use std::sync::Arc;

/// Arc samples used by the symmetry diagnostic.
const SYMMETRY_SAMPLES: usize = 256;

fn fail(stage: Stage) -> impl Fn(arcpade::Error) -> CliError {
    move |e| CliError::new(stage, e)
}

fn pair(z: &Complex, digits: usize) -> Value {
    json!([float_to_decimal(z.real(), digits), float_to_decimal(z.imag(), digits)])
}

fn pair64(z: &Complex) -> Value {
    let c = to_c64(z);
    json!([c.re, c.im])
}

fn curve(cfg: &RunConfig, stage: Stage) -> Result<Arc<GammaCurve>, CliError> {
    build_curve(cfg)?.map_err(fail(stage))
}

fn setup(cfg: &RunConfig) -> Result<Setup, CliError> {
    match build_setup(cfg)? {
        Ok(s) => Ok(s),
        Err(e @ arcpade::Error::Ortho(_)) | Err(e @ arcpade::Error::Cauchy(_)) => Err(CliError::new(Stage::Ortho, e)),
        Err(e) => Err(CliError::new(Stage::Trace, e)),
    }
}

fn ortho_failure(e: impl Into<arcpade::Error>) -> CliError {
    let e = e.into();
    let details = match &e {
        arcpade::Error::Ortho(arcpade::orthopoly::OrthoError::ResidualTooLarge { n, suggested_bits, .. })
        | arcpade::Error::Pade(PadeError::Ortho(arcpade::orthopoly::OrthoError::ResidualTooLarge {
            n,
            suggested_bits,
            ..
        })) => json!({ "n": n, "suggested_bits": suggested_bits }),
        _ => Value::Null,
    };
    CliError::new(Stage::Ortho, e).with_details(details)
}

pub fn write_resolved(cfg: &RunConfig, out: &Output, stage: Stage) -> Result<(), CliError> {
    let value = serde_json::to_value(cfg).expect("config serializes");
    out.write_json(stage, "resolved_config.json", &value)
}

/// Curve CSV and a JSON report of its residuals.
pub fn trace(cfg: &RunConfig, out: &Output) -> Result<(), CliError> {
    let curve = curve(cfg, Stage::Trace)?;
    let r = curve.report();
    let start = joukowski_c64(curve.eval_f64(0.0));
    let end = joukowski_c64(curve.eval_f64(std::f64::consts::PI));
    let report = json!({
        "header": serde_json::to_value(CurveHeader::of(&curve)).expect("header serializes"),
        "node_count": r.node_count,
        "fourier_tail": r.fourier_tail,
        "symmetry_residual": r.symmetry_residual,
        "endpoint_residual": r.endpoint_residual,
        "endpoint_distances": [(start + 1.0).norm().min((start - 1.0).norm()), (end + 1.0).norm().min((end - 1.0).norm())],
        "level_residual": r.level_residual,
        "closure_residual": r.closure_residual,
        "traced_points": r.traced_points,
        "star_shaped": r.star_shaped,
    });
    out.write(Stage::Trace, "curve.csv", &write_curve_csv(&curve))?;
    out.write_json(Stage::Trace, "trace.json", &report)
}

/// Levels of the scheme with their symmetry diagnostics.
pub fn scheme(cfg: &RunConfig, out: &Output) -> Result<(), CliError> {
    let curve = curve(cfg, Stage::Trace)?;
    let scheme = build_scheme(cfg, &curve)?.map_err(fail(Stage::Trace))?;
    let probes = cfg.probe_points()?;
    let mut levels = Vec::new();
    let mut symmetry = Vec::new();
    for &n in &cfg.degrees {
        let level = scheme.level(n).map_err(|e| CliError::new(Stage::Trace, e))?;
        levels.push(level_to_json(&level, cfg.digits));
        let report = symmetry_diagnostic(&level, &curve, SYMMETRY_SAMPLES, &probes, cfg.precision_bits)
            .map_err(|e| CliError::new(Stage::Trace, e))?;
        symmetry.push(serde_json::to_value(report).expect("report serializes"));
    }
    out.write_json(Stage::Trace, "scheme.json", &json!({ "levels": levels, "symmetry": symmetry }))
}

/// Finite base points of the scheme, for plot annotation.
fn scheme_points_csv(scheme: &InterpolationScheme, degrees: &[usize]) -> Result<String, CliError> {
    let mut pts: Vec<[f64; 2]> = Vec::new();
    if let Some(&n) = degrees.iter().max() {
        let level = scheme.level(n).map_err(|e| CliError::new(Stage::Ortho, e))?;
        for z in level.finite_points() {
            let c = to_c64(z);
            let p = [c.re, c.im];
            if !pts.iter().any(|q| (q[0] - p[0]).abs() + (q[1] - p[1]).abs() < 1e-12) {
                pts.push(p);
            }
        }
    }
    let mut out = String::from("re,im\n");
    for p in pts {
        writeln!(out, "{:.17e},{:.17e}", p[0], p[1]).expect("writing to a string");
    }
    Ok(out)
}

/// `q_n`, its zeros and the residual report for every configured degree.
pub fn ortho(cfg: &RunConfig, out: &Output) -> Result<(), CliError> {
    let s = setup(cfg)?;
    let opts = cfg.ortho_options();
    out.write(Stage::Ortho, "curve.csv", &write_curve_csv(&s.curve))?;
    out.write(Stage::Ortho, "scheme_points.csv", &scheme_points_csv(&s.scheme, &cfg.degrees)?)?;
    for &n in &cfg.degrees {
        out.note(&format!("solving n = {n}"));
        let r = solve_qn(&s.weights, n, &opts, cfg.precision_bits).map_err(ortho_failure)?;
        let mut doc = ortho_to_json(&r, cfg.digits);
        doc["max_zero_distance"] = json!(r.max_zero_distance().map_err(ortho_failure)?);
        out.write_json(Stage::Ortho, &format!("ortho_n{n}.json"), &doc)?;
        let zeros = zeros_to_csv(&r, &cfg.root_options(), cfg.digits).map_err(ortho_failure)?;
        out.write(Stage::Ortho, &format!("zeros_n{n}.csv"), &zeros)?;
    }
    Ok(())
}

fn probe_entry(pr: &PadeResult, s: &Setup, z: &Complex, digits: usize) -> Value {
    match (pade_evaluate(pr, z), pr.error(z), speedconv_ratio(pr, &s.measure, z)) {
        (Ok(pi), Ok(err), Ok(rho)) => json!({
            "z": pair64(z),
            "pi": pair(&pi, digits),
            "abs_error": abs_f64(&err),
            "rho": pair64(&rho),
            "abs_rho_minus_one": abs_f64(&(rho - 1u32)),
        }),
        (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => json!({ "z": pair64(z), "failure": e.to_string() }),
    }
}

/// Approximants at the probes, numerators, and optional error fields.
pub fn pade_cmd(cfg: &RunConfig, out: &Output) -> Result<(), CliError> {
    let s = setup(cfg)?;
    let probes = cfg.probe_points()?;
    for &n in &cfg.degrees {
        out.note(&format!("approximant n = {n}"));
        let pr = pade(&s.measure, &s.scheme, n).map_err(ortho_failure)?;
        let mut doc = json!({
            "n": n,
            "q": pr.q().coeffs().iter().map(|c| pair(c, cfg.digits)).collect::<Vec<_>>(),
            "probes": probes.iter().map(|z| probe_entry(&pr, &s, z, cfg.digits)).collect::<Vec<_>>(),
        });
        match pr.clone().with_numerator() {
            Ok(with_p) => {
                let p = with_p.p().expect("numerator attached");
                doc["p"] = json!(p.coeffs().iter().map(|c| pair(c, cfg.digits)).collect::<Vec<_>>());
            }
            Err(e) => doc["p_failure"] = json!(e.to_string()),
        }
        out.write_json(Stage::Ortho, &format!("pade_n{n}.json"), &doc)?;
        if let Some(grid) = &cfg.field {
            let csv = error_field_csv(&pr, &s.measure, grid).map_err(ortho_failure)?;
            out.write(Stage::Ortho, &format!("error_field_n{n}.csv"), &csv)?;
        }
    }
    Ok(())
}

struct Check {
    name: &'static str,
    pass: bool,
    value: f64,
    tol: f64,
}

impl Check {
    fn bound(name: &'static str, value: f64, tol: f64) -> Self {
        Self {
            name,
            pass: value.is_finite() && value <= tol,
            value,
            tol,
        }
    }

    fn json(&self) -> Value {
        json!({ "name": self.name, "pass": self.pass, "value": self.value, "tol": self.tol })
    }
}

/// Strong-asymptotic ratios, moment gaps, speed of convergence and, with a
/// vanishing factor, the jump margins. Fails with the names of the checks
/// that did not pass.
pub fn verify(cfg: &RunConfig, out: &Output) -> Result<(), CliError> {
    let s = setup(cfg)?;
    let probes = cfg.probe_points()?;
    let scale = Complex::with_val(cfg.precision_bits, cfg.gamma_scale()?);
    let v = &cfg.verify;
    let mut per_degree = Vec::new();
    let mut reports: Vec<Sa2Report> = Vec::new();
    let mut last: Option<(f64, f64, f64)> = None;
    let mut rho_history: Vec<f64> = Vec::new();
    let mut degrees = cfg.degrees.clone();
    degrees.sort_unstable();
    for &n in &degrees {
        out.note(&format!("verifying n = {n}"));
        let pr = pade(&s.measure, &s.scheme, n).map_err(ortho_failure)?;
        let r: &OrthoResult = pr.ortho();
        let mut sa1 = Vec::new();
        let mut sa1_dev = 0.0f64;
        let mut rho_dev = 0.0f64;
        let mut rho = Vec::new();
        for z in &probes {
            let (qb, rb) = sa1_ratio(r, z).map_err(ortho_failure)?;
            let rb = rb / &scale;
            let (dq, dr) = (abs_f64(&(qb - 1u32)), abs_f64(&(rb - 1u32)));
            sa1_dev = sa1_dev.max(dq).max(dr);
            sa1.push(json!({ "z": pair64(z), "q_ratio_dev": dq, "r_ratio_dev": dr }));
            let ratio = speedconv_ratio(&pr, &s.measure, z).map_err(ortho_failure)?;
            let d = abs_f64(&(ratio - 1u32));
            rho_dev = rho_dev.max(d);
            rho.push(json!({ "z": pair64(z), "abs_rho_minus_one": d }));
        }
        let sa2 = sa2_residuals(r, v.sa2_samples).map_err(ortho_failure)?;
        let sa3 = sa3_moments(r, v.sa3_jmax);
        let sa3_max = sa3.abs.iter().copied().fold(0.0, f64::max);
        per_degree.push(json!({
            "n": n,
            "sa1": sa1,
            "sa2": { "l1": sa2.l1, "l2": sa2.l2, "sup": sa2.sup },
            "sa3": sa3.abs,
            "speedconv": rho,
            "max_zero_distance": r.max_zero_distance().map_err(ortho_failure)?,
        }));
        reports.push(sa2);
        rho_history.push(rho_dev);
        last = Some((sa1_dev, sa3_max, rho_dev));
    }

    let mut checks = Vec::new();
    if let Some((sa1_dev, sa3_max, rho_dev)) = last {
        checks.push(Check::bound("sa1", sa1_dev, v.sa1_tol));
        checks.push(Check::bound("sa3", sa3_max, v.sa3_tol));
        checks.push(Check::bound("speedconv", rho_dev, v.speedconv_tol));
        let monotone = rho_history.windows(2).all(|w| w[1] <= w[0]);
        checks.push(Check {
            name: "speedconv_trend",
            pass: monotone,
            value: rho_history.last().copied().unwrap_or(0.0),
            tol: rho_history.first().copied().unwrap_or(0.0),
        });
    }
    let floor = 2f64.powi(1 - cfg.precision_bits as i32).sqrt();
    let trend = sa2_trend(&reports, floor);
    checks.push(Check {
        name: "sa2",
        pass: trend != Trend::Growing,
        value: reports.iter().map(|r| r.l2.max(floor)).fold(0.0, f64::max),
        tol: 2.0 * reports.iter().map(|r| r.l2.max(floor)).fold(f64::INFINITY, f64::min),
    });

    let mut upsilon = Value::Null;
    if let (Some(hb), Some(&n)) = (s.measure.hbar(), degrees.last()) {
        let level = s.scheme.level(n).map_err(|e| CliError::new(Stage::Ortho, e))?;
        let sh = SzegoEvaluator::Quadrature(s.measure.szego_h().map_err(ortho_failure)?);
        let report = upsilon_margin(level.points(), Some(&sh), hb).map_err(|e| CliError::new(Stage::Ortho, e))?;
        let failed = report.entries.iter().any(|e| e.verdict == Verdict::Fail);
        checks.push(Check {
            name: "upsilon",
            pass: !failed,
            value: report.entries.iter().map(|e| e.jump).fold(0.0, f64::max),
            tol: report.entries.iter().map(|e| e.bound).fold(f64::INFINITY, f64::min),
        });
        upsilon = serde_json::to_value(&report).expect("report serializes");
    }

    let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name).collect();
    let doc = json!({
        "degrees": per_degree,
        "sa2_trend": trend,
        "upsilon": upsilon,
        "checks": checks.iter().map(Check::json).collect::<Vec<_>>(),
        "pass": failed.is_empty(),
    });
    out.write_json(Stage::Verify, "verify.json", &doc)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::new(Stage::Verify, format!("checks failed: {}", failed.join(", "))).with_details(json!({ "failed": failed })))
    }
}
