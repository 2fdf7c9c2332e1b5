use super::{SchemeError, SchemeLevel};
use crate::geometry::{
    joukowski, trace_level_set, ArcParametrization, CurveSource, GammaCurve, GeneratorSet, SchemePoint, TraceOptions,
};
use crate::numerics::{abs_f64, to_c64};
use num_complex::Complex64;
use rug::float::Constant;
use rug::{Complex, Float};
use serde::Serialize;
use std::f64::consts::TAU;

const SCAN_POINTS: usize = 4096;

/// Flux bookkeeping of an equal-flux level.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EqualFluxInfo {
    pub rho: f64,
    /// Total flux of `u` through the level curve; `2 pi k` by construction.
    pub total_flux: f64,
    /// Largest deviation of a partition arc's flux from `total/(2n)`,
    /// relative to `total/(2n)`.
    pub max_relative_deviation: f64,
}

/// Base points of a traced curve's generators, with `phi(J(eps)) = 1/eps`.
pub(crate) fn generator_base(curve: &GammaCurve, prec: u32) -> Result<Vec<(SchemePoint, u32)>, SchemeError> {
    let g = curve.generators().ok_or_else(|| {
        SchemeError::LevelCurveTraceFailed("the curve was not generated by a pseudo-Blaschke product".into())
    })?;
    generators_as_points(g, prec)
}

fn generators_as_points(g: &GeneratorSet, prec: u32) -> Result<Vec<(SchemePoint, u32)>, SchemeError> {
    g.generators()
        .iter()
        .map(|gen| Ok((interior_point(&Complex::with_val(prec, &gen.eps))?, gen.multiplicity)))
        .collect()
}

/// The scheme point `J(eps)` for `eps` inside `Gamma`.
fn interior_point(eps: &Complex) -> Result<SchemePoint, SchemeError> {
    let z = joukowski(eps)?;
    let phi = Complex::with_val(eps.prec(), eps.recip_ref());
    Ok(SchemePoint::Finite { z, phi })
}

/// Level `E_n` repeating the generators of `g`.
pub fn generator_repetition_level(
    g: &GeneratorSet,
    n: usize,
    padding: bool,
    prec: u32,
) -> Result<SchemeLevel, SchemeError> {
    repetition_level(&generators_as_points(g, prec)?, n, padding, prec)
}

/// Level `E_n` in which every base point appears `2n m/k` times, `m` its
/// multiplicity and `k` the total. With `padding`, slots left over when `k`
/// does not divide `2n` cycle through the base again.
pub fn repetition_level(
    base: &[(SchemePoint, u32)],
    n: usize,
    padding: bool,
    prec: u32,
) -> Result<SchemeLevel, SchemeError> {
    let cycle: Vec<&SchemePoint> = base
        .iter()
        .flat_map(|(p, m)| std::iter::repeat_n(p, *m as usize))
        .collect();
    if cycle.is_empty() {
        return Err(SchemeError::EmptyBase);
    }
    let slots = 2 * n;
    let k = cycle.len();
    if slots % k != 0 && !padding {
        return Err(SchemeError::IndivisibleWithoutPadding { slots, k: k as u32 });
    }
    let full = slots / k * k;
    let mut points: Vec<SchemePoint> = Vec::with_capacity(slots);
    // full cycles grouped by base point, then the padding in cycle order
    for (p, m) in base {
        points.extend(std::iter::repeat_n(p.clone(), *m as usize * (slots / k)));
    }
    points.extend(cycle.iter().take(slots - full).map(|p| (*p).clone()));
    Ok(SchemeLevel::new(n, points, prec))
}

/// Equal-flux level on the curve `u = log rho` inside `Gamma`.
///
/// For parametrized arcs `u = log|Psi|` with `Psi` the inverse of
/// `zeta -> phi(p(J(zeta)))`, so the level curve is the image of the circle
/// `|zeta| = rho` and the flux is the angle. For generated curves `u = log|B|`
/// and the flux along the level curve is the increase of `arg B`.
pub fn equal_flux_level(curve: &GammaCurve, rho: f64, n: usize, prec: u32) -> Result<SchemeLevel, SchemeError> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(SchemeError::InvalidRho(rho));
    }
    if n == 0 {
        let info = EqualFluxInfo {
            rho,
            total_flux: 0.0,
            max_relative_deviation: 0.0,
        };
        return Ok(SchemeLevel::new(0, Vec::new(), prec).with_flux(info));
    }
    match curve.source() {
        CurveSource::Param(p) => param_level(curve, p.as_ref(), rho, n, prec),
        CurveSource::Level(g) => generated_level(curve, g, rho, n, prec),
    }
}

fn param_level(
    curve: &GammaCurve,
    p: &dyn ArcParametrization,
    rho: f64,
    n: usize,
    prec: u32,
) -> Result<SchemeLevel, SchemeError> {
    let pi = Float::with_val(prec, Constant::Pi);
    let rho_hp = Float::with_val(prec, rho);
    let mut points = Vec::with_capacity(2 * n);
    for j in 0..2 * n {
        let psi = Float::with_val(prec, &pi * (2 * j + 1) as u32) / (2 * n) as u32;
        let (s, c) = psi.sin_cos(Float::new(prec));
        let zeta = Complex::with_val(prec, (c, s)) * &rho_hp;
        let x = joukowski(&zeta)?;
        let point = if p.is_segment() {
            let phi = Complex::with_val(prec, zeta.recip_ref());
            SchemePoint::Finite { z: x, phi }
        } else {
            let (z, _) = p.eval(&x);
            SchemePoint::finite(z, curve)?
        };
        points.push(point);
    }
    let info = EqualFluxInfo {
        rho,
        total_flux: TAU,
        max_relative_deviation: 0.0,
    };
    Ok(SchemeLevel::new(n, points, prec).with_flux(info))
}

fn generated_level(
    curve: &GammaCurve,
    g: &GeneratorSet,
    rho: f64,
    n: usize,
    prec: u32,
) -> Result<SchemeLevel, SchemeError> {
    let level = rho.ln();
    let start = real_axis_start(g, level)?;
    let path = trace_level_set(g, level, start, &TraceOptions::default())
        .map_err(|e| SchemeError::LevelCurveTraceFailed(e.to_string()))?;

    let mut phase = Vec::with_capacity(path.len() + 1);
    let mut acc = 0.0;
    phase.push(0.0);
    for i in 0..path.len() {
        let (a, b) = (path[i], path[(i + 1) % path.len()]);
        let step = (g.blaschke(b) / g.blaschke(a)).arg();
        if step <= 0.0 {
            return Err(SchemeError::NonmonotoneFlux { at: a });
        }
        acc += step;
        phase.push(acc);
    }
    let k = g.total_multiplicity();
    if (acc / TAU).round() as i64 != k as i64 {
        return Err(SchemeError::LevelCurveTraceFailed(format!(
            "level curve carries flux {acc:.6}, expected 2 pi x {k}"
        )));
    }
    let total = TAU * k as f64;
    let share = total / (2 * n) as f64;
    let anchor = refine_start(g, start.re, &Float::with_val(prec, rho), prec);
    let phase0 = g.blaschke_hp(&anchor).0.arg().real().clone();
    let share_hp = Float::with_val(prec, Constant::Pi) * k / n as u32;
    let rho_hp = Float::with_val(prec, rho);

    let mut points = Vec::with_capacity(2 * n);
    let mut worst: f64 = 0.0;
    let mut seg = 0;
    for j in 0..2 * n {
        let rel = (j as f64 + 0.5) * share;
        while seg + 1 < phase.len() - 1 && phase[seg + 1] < rel {
            seg += 1;
        }
        let (a, b) = (path[seg], path[(seg + 1) % path.len()]);
        let span = phase[seg + 1] - phase[seg];
        let guess = a + ((rel - phase[seg]) / span).clamp(0.0, 1.0) * (b - a);
        let target_phase = Float::with_val(prec, &share_hp * (2 * j + 1) as u32) / 2u32 + &phase0;
        let (s, c) = target_phase.sin_cos(Float::new(prec));
        let target = Complex::with_val(prec, (c, s)) * &rho_hp;
        let eps = newton_level(g, guess, &target, prec)?;
        if curve.winding_number(to_c64(&eps)) != 1 {
            return Err(SchemeError::LevelCurveTraceFailed(format!(
                "partition point {} is not inside Gamma",
                to_c64(&eps)
            )));
        }
        let (bv, _) = g.blaschke_hp(&eps);
        let miss = abs_f64(&(bv / &target).ln());
        worst = worst.max(miss / share);
        points.push(interior_point(&eps)?);
    }
    let info = EqualFluxInfo {
        rho,
        total_flux: acc,
        max_relative_deviation: worst,
    };
    Ok(SchemeLevel::new(n, points, prec).with_flux(info))
}

/// The crossing of `u = level` with `(0, 1)` closest to `tau = 1`.
fn real_axis_start(g: &GeneratorSet, level: f64) -> Result<Complex64, SchemeError> {
    let f = |x: f64| g.potential(Complex64::new(x, 0.0)) - level;
    let mut hi = None;
    for i in (1..SCAN_POINTS).rev() {
        let (a, b) = (i as f64 / SCAN_POINTS as f64, (i + 1) as f64 / SCAN_POINTS as f64);
        let (fa, fb) = (f(a), f(b.min(1.0 - 1e-12)));
        if fa.is_finite() && fb.is_finite() && fa * fb <= 0.0 {
            hi = Some((a, b, fa));
            break;
        }
    }
    let (mut a, mut b, fa) = hi.ok_or(crate::geometry::GeometryError::LevelOutOfRange(level))?;
    for _ in 0..80 {
        let m = 0.5 * (a + b);
        if (f(m) > 0.0) == (fa > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(Complex64::new(0.5 * (a + b), 0.0))
}

/// The real point `x` with `|B(x)| = rho`, polished at `prec` bits from `x0`.
fn refine_start(g: &GeneratorSet, x0: f64, rho: &Float, prec: u32) -> Complex {
    let mut x = Float::with_val(prec, x0);
    let target = Float::with_val(prec, rho.ln_ref());
    for _ in 0..60 {
        let tau = Complex::with_val(prec, &x);
        let (b, l) = g.blaschke_hp(&tau);
        // d/dx log|B(x)| = Re (log B)'(x)
        let u = Float::with_val(prec, b.abs_ref()).ln();
        let step = Float::with_val(prec, &u - &target) / l.real();
        let small = step.to_f64().abs() <= 2f64.powi(-(prec as i32) + 4);
        x -= step;
        if small {
            break;
        }
    }
    Complex::with_val(prec, x)
}

/// Solves `B(tau) = target` by Newton's method on `log B`, first in double
/// precision and then at `prec` bits.
fn newton_level(g: &GeneratorSet, guess: Complex64, target: &Complex, prec: u32) -> Result<Complex, SchemeError> {
    let t64 = to_c64(target);
    let mut tau = guess;
    for _ in 0..40 {
        let step = (g.blaschke(tau) / t64).ln() / g.log_derivative(tau);
        tau -= step;
        if step.norm() < 1e-14 * tau.norm() {
            break;
        }
    }
    let mut tau = Complex::with_val(prec, (tau.re, tau.im));
    let tiny = 2f64.powi(-(prec as i32) + 8);
    for _ in 0..60 {
        let (b, l) = g.blaschke_hp(&tau);
        let step = Complex::with_val(prec, &b / target).ln() / &l;
        let small = abs_f64(&step) <= tiny * abs_f64(&tau);
        tau -= step;
        if small {
            return Ok(tau);
        }
    }
    Err(SchemeError::LevelCurveTraceFailed(format!(
        "Newton's method on the level curve stalled near {}",
        to_c64(&tau)
    )))
}
