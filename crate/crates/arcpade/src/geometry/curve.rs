use super::trace::{self_intersection, trace_level_set, TraceOptions};
use super::{joukowski_c64, ArcParametrization, GeneratorSet, GeometryError};
use crate::numerics::{abs_f64, to_c64};
use num_complex::Complex64;
use rug::{Complex, Float};
use rustfft::FftPlanner;
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

const MIN_NODES: usize = 64;
const MAX_NODES: usize = 1 << 16;
const FIT_TOL: f64 = 1e-13;
const POLYLINE_POINTS: usize = 4096;

/// How the curve is defined exactly; used for working-precision evaluation.
#[derive(Clone)]
pub enum CurveSource {
    /// Zero level set of the generator potential.
    Level(GeneratorSet),
    /// Joukowski preimage of an explicitly parametrized arc.
    Param(Arc<dyn ArcParametrization>),
}

impl fmt::Debug for CurveSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveSource::Level(g) => f.debug_tuple("Level").field(g).finish(),
            CurveSource::Param(p) => f.debug_tuple("Param").field(&p.describe()).finish(),
        }
    }
}

/// A point of `Gamma` at working precision.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvePoint {
    pub theta: Float,
    pub tau: Complex,
    /// `d tau / d theta`.
    pub dtau: Complex,
}

/// Residuals measured when the curve was built.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveReport {
    pub node_count: usize,
    pub fourier_tail: f64,
    /// Largest `|1/tau_k - tau_{M-k}|` over nodes.
    pub symmetry_residual: f64,
    /// `|tau(0) - 1| + |tau(pi) + 1|`.
    pub endpoint_residual: f64,
    /// Largest `|u(tau_k)|` for level curves.
    pub level_residual: Option<f64>,
    /// Distance between the last traced point and the start.
    pub closure_residual: Option<f64>,
    pub traced_points: Option<usize>,
    pub star_shaped: bool,
}

/// The analytic Jordan curve `Gamma` with `J(Gamma) = F`, oriented
/// counter-clockwise, with `tau(0) = 1`, `tau(pi) = -1` and
/// `tau(2 pi - theta) = 1/tau(theta)`.
#[derive(Clone, Debug)]
pub struct GammaCurve {
    source: CurveSource,
    coeffs: Vec<Complex64>,
    nodes: Vec<Complex64>,
    polyline: Vec<Complex64>,
    report: CurveReport,
}

/// Traces the zero level set of the generator potential through `tau = 1`
/// and refits it on the flux parametrization `B(tau(theta)) = exp(i k theta)`.
pub fn trace_gamma(
    g: &GeneratorSet,
    resolution: usize,
    opts: &TraceOptions,
) -> Result<GammaCurve, GeometryError> {
    let path = trace_level_set(g, 0.0, Complex64::new(1.0, 0.0), opts)?;
    if let Some((i, j)) = self_intersection(&path) {
        return Err(GeometryError::SelfIntersection(i, j));
    }
    let closure = (path[path.len() - 1] - path[0]).norm();
    let k = g.total_multiplicity() as i64;

    // cumulative phase of B along the closed polyline
    let mut phase = Vec::with_capacity(path.len() + 1);
    let mut acc = 0.0;
    phase.push(0.0);
    for i in 0..path.len() {
        let (a, b) = (path[i], path[(i + 1) % path.len()]);
        acc += (g.blaschke(b) / g.blaschke(a)).arg();
        phase.push(acc);
    }
    let winding = (acc / TAU).round() as i64;
    if winding != k {
        let outside = g
            .generators()
            .iter()
            .map(|gen| to_c64(&gen.eps))
            .find(|&e| winding_of(&path, e) == 0)
            .unwrap_or(Complex64::new(f64::NAN, f64::NAN));
        return Err(GeometryError::GeneratorOutside {
            eps: outside,
            winding,
            expected: k,
        });
    }

    let kf = k as f64;
    let mut m = resolution.next_power_of_two().max(MIN_NODES);
    loop {
        let mut nodes = Vec::with_capacity(m);
        let mut seg = 0;
        for j in 0..m {
            let target = kf * TAU * j as f64 / m as f64;
            while seg + 1 < phase.len() - 1 && phase[seg + 1] < target {
                seg += 1;
            }
            let (a, b) = (path[seg], path[(seg + 1) % path.len()]);
            let span = phase[seg + 1] - phase[seg];
            let s = if span > 0.0 { (target - phase[seg]) / span } else { 0.0 };
            let guess = a + s.clamp(0.0, 1.0) * (b - a);
            nodes.push(newton_flux_f64(g, guess, target));
        }
        nodes[0] = Complex64::new(1.0, 0.0);
        if m % 2 == 0 {
            nodes[m / 2] = Complex64::new(-1.0, 0.0);
        }
        let (coeffs, tail) = fourier_fit(&nodes);
        if tail < FIT_TOL || m >= MAX_NODES {
            if tail >= FIT_TOL {
                return Err(GeometryError::FitNotConverged {
                    tail,
                    tol: FIT_TOL,
                    max_nodes: MAX_NODES,
                });
            }
            let level_residual = nodes.iter().map(|&t| g.potential(t).abs()).fold(0.0, f64::max);
            let mut curve = GammaCurve::assemble(CurveSource::Level(g.clone()), coeffs, nodes, tail);
            curve.report.level_residual = Some(level_residual);
            curve.report.closure_residual = Some(closure);
            curve.report.traced_points = Some(path.len());
            curve.check_invariants()?;
            return Ok(curve);
        }
        m *= 2;
    }
}

fn newton_flux_f64(g: &GeneratorSet, mut tau: Complex64, target: f64) -> Complex64 {
    let rot = Complex64::from_polar(1.0, -target);
    for _ in 0..40 {
        let step = (g.blaschke(tau) * rot).ln() / g.log_derivative(tau);
        tau -= step;
        if step.norm() < 1e-15 * tau.norm() {
            break;
        }
    }
    tau
}

/// Builds `Gamma` from an arc parametrization by continuous selection of the
/// Joukowski preimage of `p(cos theta)`.
pub fn gamma_from_parametrization(
    p: Arc<dyn ArcParametrization>,
    resolution: usize,
) -> Result<GammaCurve, GeometryError> {
    let mut m = resolution.next_power_of_two().max(MIN_NODES);
    if p.is_segment() {
        let nodes: Vec<Complex64> = (0..m)
            .map(|j| Complex64::from_polar(1.0, TAU * j as f64 / m as f64))
            .collect();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); m];
        coeffs[1] = Complex64::new(1.0, 0.0);
        let curve = GammaCurve::assemble(CurveSource::Param(p), coeffs, nodes, 0.0);
        curve.check_invariants()?;
        return Ok(curve);
    }
    loop {
        let nodes = select_preimages(p.as_ref(), m)?;
        let (coeffs, tail) = fourier_fit(&nodes);
        if tail < FIT_TOL {
            let curve = GammaCurve::assemble(CurveSource::Param(p), coeffs, nodes, tail);
            if let Some((i, j)) = self_intersection(&curve.polyline) {
                return Err(GeometryError::SelfIntersection(i, j));
            }
            curve.check_invariants()?;
            return Ok(curve);
        }
        if m >= MAX_NODES {
            return Err(GeometryError::FitNotConverged {
                tail,
                tol: FIT_TOL,
                max_nodes: MAX_NODES,
            });
        }
        m *= 2;
    }
}

fn select_preimages(p: &dyn ArcParametrization, m: usize) -> Result<Vec<Complex64>, GeometryError> {
    let half = m / 2;
    let mut upper = Vec::with_capacity(half + 1);
    upper.push(Complex64::new(1.0, 0.0));
    for j in 1..=half {
        let theta = TAU * j as f64 / m as f64;
        if j == half {
            upper.push(Complex64::new(-1.0, 0.0));
            break;
        }
        let t = p.eval_f64(Complex64::new(theta.cos(), 0.0));
        let root = (t * t - 1.0).sqrt();
        let (a, b) = (t + root, t - root);
        let chosen = if j == 1 {
            a
        } else {
            let prev = upper[j - 1];
            let pred = if j >= 2 { 2.0 * prev - upper[j - 2] } else { prev };
            let (da, db) = ((a - pred).norm(), (b - pred).norm());
            if da.min(db) > 0.5 * da.max(db) {
                return Err(GeometryError::BranchJump { theta });
            }
            if da < db {
                a
            } else {
                b
            }
        };
        upper.push(chosen);
    }
    // orientation: counter-clockwise means positive signed area
    let mut nodes = vec![Complex64::new(0.0, 0.0); m];
    for j in 0..=half {
        nodes[j] = upper[j];
        if j > 0 && j < half {
            nodes[m - j] = 1.0 / upper[j];
        }
    }
    if signed_area(&nodes) < 0.0 {
        for j in 1..half {
            nodes[j] = 1.0 / upper[j];
            nodes[m - j] = upper[j];
        }
    }
    Ok(nodes)
}

fn signed_area(poly: &[Complex64]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            a.re * b.im - a.im * b.re
        })
        .sum::<f64>()
        / 2.0
}

fn fourier_fit(nodes: &[Complex64]) -> (Vec<Complex64>, f64) {
    let m = nodes.len();
    let mut buf = nodes.to_vec();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let scale = 1.0 / m as f64;
    let coeffs: Vec<Complex64> = buf.into_iter().map(|c| c * scale).collect();
    let total: f64 = coeffs.iter().map(|c| c.norm()).sum();
    let tail: f64 = coeffs
        .iter()
        .enumerate()
        .filter(|(j, _)| {
            let freq = if *j <= m / 2 { *j } else { m - j };
            freq > m / 4
        })
        .map(|(_, c)| c.norm())
        .sum();
    (coeffs, tail / total)
}

fn winding_of(poly: &[Complex64], z: Complex64) -> i64 {
    let n = poly.len();
    let total: f64 = (0..n)
        .map(|i| ((poly[(i + 1) % n] - z) / (poly[i] - z)).arg())
        .sum();
    (total / TAU).round() as i64
}

fn segment_distance(a: Complex64, b: Complex64, z: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    let t = if len2 > 0.0 {
        (((z - a) * d.conj()).re / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (a + t * d - z).norm()
}

impl GammaCurve {
    fn assemble(source: CurveSource, coeffs: Vec<Complex64>, nodes: Vec<Complex64>, tail: f64) -> Self {
        let polyline = resample(&coeffs, POLYLINE_POINTS.max(nodes.len()));
        let m = nodes.len();
        let symmetry_residual = (0..m)
            .map(|k| (1.0 / nodes[k] - nodes[(m - k) % m]).norm())
            .fold(0.0, f64::max);
        let endpoint_residual = (nodes[0] - 1.0).norm() + (nodes[m / 2] + 1.0).norm();
        let star_shaped = (0..polyline.len()).all(|i| {
            let (a, b) = (polyline[i], polyline[(i + 1) % polyline.len()]);
            (b / a).arg() > 0.0
        });
        Self {
            source,
            coeffs,
            nodes,
            polyline,
            report: CurveReport {
                node_count: m,
                fourier_tail: tail,
                symmetry_residual,
                endpoint_residual,
                level_residual: None,
                closure_residual: None,
                traced_points: None,
                star_shaped,
            },
        }
    }

    fn check_invariants(&self) -> Result<(), GeometryError> {
        let r = &self.report;
        if r.symmetry_residual > 1e-8 {
            return Err(GeometryError::Invariant(format!(
                "inversion symmetry residual {:e}",
                r.symmetry_residual
            )));
        }
        if r.endpoint_residual > 1e-8 {
            return Err(GeometryError::Invariant(format!(
                "curve misses +-1 by {:e}",
                r.endpoint_residual
            )));
        }
        if let Some(l) = r.level_residual {
            if l > 1e-10 {
                return Err(GeometryError::Invariant(format!("level residual {l:e}")));
            }
        }
        if self.nodes.iter().any(|t| t.norm() < 1e-12) || self.winding_number(Complex64::new(0.0, 0.0)) != 1 {
            return Err(GeometryError::Invariant("curve must enclose the origin".into()));
        }
        Ok(())
    }

    pub fn source(&self) -> &CurveSource {
        &self.source
    }

    pub fn generators(&self) -> Option<&GeneratorSet> {
        match &self.source {
            CurveSource::Level(g) => Some(g),
            CurveSource::Param(_) => None,
        }
    }

    pub fn parametrization(&self) -> Option<&Arc<dyn ArcParametrization>> {
        match &self.source {
            CurveSource::Param(p) => Some(p),
            CurveSource::Level(_) => None,
        }
    }

    /// True when `F = [-1, 1]` and `Gamma` is the unit circle.
    pub fn is_segment(&self) -> bool {
        matches!(&self.source, CurveSource::Param(p) if p.is_segment())
    }

    pub fn is_counter_clockwise(&self) -> bool {
        true
    }

    pub fn report(&self) -> &CurveReport {
        &self.report
    }

    /// Nodes `tau(2 pi k / M)` in double precision.
    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    /// Fourier coefficients in FFT order: entry `j` multiplies `e^{i j theta}`
    /// for `j < M/2` and `e^{i (j - M) theta}` otherwise.
    pub fn fourier_coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Dense closed polyline of `Gamma` used for winding and distance tests.
    pub fn polyline(&self) -> &[Complex64] {
        &self.polyline
    }

    /// `tau(theta)` from the Fourier series.
    pub fn eval_f64(&self, theta: f64) -> Complex64 {
        self.fourier_sum(theta, 0)
    }

    /// `tau'(theta)` from the Fourier series.
    pub fn deriv_f64(&self, theta: f64) -> Complex64 {
        self.fourier_sum(theta, 1)
    }

    fn fourier_sum(&self, theta: f64, order: u32) -> Complex64 {
        let m = self.coeffs.len();
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > 0.0)
            .map(|(j, c)| {
                let freq = if j < m / 2 { j as f64 } else { j as f64 - m as f64 };
                c * Complex64::from_polar(1.0, freq * theta) * Complex64::new(0.0, freq).powu(order)
            })
            .sum()
    }

    /// Winding number of `Gamma` around `z`.
    pub fn winding_number(&self, z: Complex64) -> i64 {
        winding_of(&self.polyline, z)
    }

    /// Distance from `z` to `Gamma`, refined by Newton's method on the
    /// Fourier series from the nearest polyline vertex.
    pub fn distance(&self, z: Complex64) -> f64 {
        let n = self.polyline.len();
        let i = (0..n)
            .min_by(|&a, &b| {
                (self.polyline[a] - z)
                    .norm()
                    .partial_cmp(&(self.polyline[b] - z).norm())
                    .unwrap()
            })
            .unwrap_or(0);
        let coarse = (0..n)
            .map(|k| segment_distance(self.polyline[k], self.polyline[(k + 1) % n], z))
            .fold(f64::INFINITY, f64::min);
        let theta0 = TAU * i as f64 / n as f64;
        let refined = project(theta0, z, None, |th| {
            (self.fourier_sum(th, 0), self.fourier_sum(th, 1), self.fourier_sum(th, 2))
        });
        refined.min(coarse)
    }

    /// The arc `F` as a polyline from `-1` to `1` with `m + 1` vertices.
    pub fn arc_polyline(&self, m: usize) -> Vec<Complex64> {
        let mut pts: Vec<Complex64> = (0..=m)
            .map(|j| {
                let theta = PI * j as f64 / m as f64;
                joukowski_c64(self.eval_f64(theta))
            })
            .collect();
        pts[0] = Complex64::new(1.0, 0.0);
        pts[m] = Complex64::new(-1.0, 0.0);
        pts.reverse();
        pts
    }

    /// Distance from `z` to the arc `F`.
    pub fn distance_to_arc(&self, z: Complex64) -> f64 {
        let m = POLYLINE_POINTS / 2;
        let poly = self.arc_polyline(m);
        let (i, coarse) = poly
            .windows(2)
            .enumerate()
            .map(|(i, w)| (i, segment_distance(w[0], w[1], z)))
            .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
        // polyline index i runs from -1, i.e. theta = pi (m - i)/m
        let theta0 = PI * (m - i) as f64 / m as f64;
        let refined = project(theta0, z, Some((0.0, PI)), |th| {
            let t = self.fourier_sum(th, 0);
            let (d1, d2) = (self.fourier_sum(th, 1), self.fourier_sum(th, 2));
            let jp = 0.5 * (1.0 - 1.0 / (t * t));
            let jpp = 1.0 / (t * t * t);
            (joukowski_c64(t), jp * d1, jpp * d1 * d1 + jp * d2)
        });
        refined.min(coarse)
    }

    /// Double-precision seed for `tau(theta)`; near the endpoints the series is
    /// replaced by its tangent line so the two preimage candidates stay apart.
    fn seed(&self, theta: f64) -> Complex64 {
        let theta = theta.rem_euclid(TAU);
        for anchor in [0.0, PI, TAU] {
            let d = theta - anchor;
            if d.abs() < 1e-5 {
                return self.eval_f64(anchor) + d * self.deriv_f64(anchor);
            }
        }
        self.eval_f64(theta)
    }

    /// `tau(theta)` and `tau'(theta)` at the precision of `theta`.
    pub fn point(&self, theta: &Float) -> Result<CurvePoint, GeometryError> {
        let prec = theta.prec();
        let seed = self.seed(theta.to_f64());
        let (tau, dtau) = match &self.source {
            CurveSource::Level(g) => level_point(g, theta, seed)?,
            CurveSource::Param(p) if p.is_segment() => {
                let (s, c) = Float::with_val(prec, theta).sin_cos(Float::new(prec));
                let tau = Complex::with_val(prec, (c, s));
                let dtau = Complex::with_val(prec, (-tau.imag(), tau.real()));
                (tau, dtau)
            }
            CurveSource::Param(p) => param_point(p.as_ref(), theta, seed)?,
        };
        Ok(CurvePoint {
            theta: theta.clone(),
            tau,
            dtau,
        })
    }
}

fn level_point(g: &GeneratorSet, theta: &Float, seed: Complex64) -> Result<(Complex, Complex), GeometryError> {
    let prec = theta.prec();
    let k = g.total_multiplicity();
    let phase = Float::with_val(prec, theta * k);
    let (s, c) = phase.sin_cos(Float::new(prec));
    let rot = Complex::with_val(prec, (c, -s));
    let mut tau = Complex::with_val(prec, (seed.re, seed.im));
    let tiny = 2f64.powi(-(prec as i32) + 8);
    for _ in 0..60 {
        let (b, l) = g.blaschke_hp(&tau);
        let step = Complex::with_val(prec, &b * &rot).ln() / &l;
        let small = abs_f64(&step) <= tiny * abs_f64(&tau);
        tau -= step;
        if small {
            let (_, l) = g.blaschke_hp(&tau);
            let dtau = Complex::with_val(prec, (0, k)) / l;
            return Ok((tau, dtau));
        }
    }
    Err(GeometryError::TraceDiverged {
        at: to_c64(&tau),
        step: 0.0,
    })
}

fn param_point(
    p: &dyn ArcParametrization,
    theta: &Float,
    seed: Complex64,
) -> Result<(Complex, Complex), GeometryError> {
    let prec = theta.prec();
    let (s, c) = Float::with_val(prec, theta).sin_cos(Float::new(prec));
    let (t, dp) = p.eval(&Complex::with_val(prec, c));
    let root = (Complex::with_val(prec, t.square_ref()) - 1u32).sqrt();
    let a = Complex::with_val(prec, &t + &root);
    let b = Complex::with_val(prec, &t - &root);
    let (da, db) = ((to_c64(&a) - seed).norm(), (to_c64(&b) - seed).norm());
    let separation = (to_c64(&a) - to_c64(&b)).norm();
    if da.min(db) > 0.25 * da.max(db) && separation > 1e-10 {
        return Err(GeometryError::BranchJump { theta: theta.to_f64() });
    }
    let tau = if da <= db { a } else { b };
    // J'(tau) = (1 - tau^-2)/2 and d/dtheta p(cos theta) = -sin theta p'(cos theta)
    let inv2 = Complex::with_val(prec, tau.square_ref()).recip();
    let jp = (Complex::with_val(prec, 1) - inv2) / 2u32;
    let dtau = -(dp * s) / jp;
    Ok((tau, dtau))
}

/// Minimizes `|P(theta) - z|` by Newton's method on
/// `Re((P - z) conj(P'))` starting from `theta0`.
fn project(
    theta0: f64,
    z: Complex64,
    clamp: Option<(f64, f64)>,
    eval: impl Fn(f64) -> (Complex64, Complex64, Complex64),
) -> f64 {
    let mut th = theta0;
    let mut best = (eval(th).0 - z).norm();
    for _ in 0..30 {
        let (p, d1, d2) = eval(th);
        let f = ((p - z) * d1.conj()).re;
        let fp = d1.norm_sqr() + ((p - z) * d2.conj()).re;
        if fp <= 0.0 || !fp.is_finite() {
            break;
        }
        let mut next = th - f / fp;
        if let Some((lo, hi)) = clamp {
            next = next.clamp(lo, hi);
        }
        let step = (next - th).abs();
        th = next;
        best = best.min((eval(th).0 - z).norm());
        if step < 1e-15 {
            break;
        }
    }
    best
}

fn resample(coeffs: &[Complex64], count: usize) -> Vec<Complex64> {
    let m = coeffs.len();
    let mut buf = vec![Complex64::new(0.0, 0.0); count];
    for (j, c) in coeffs.iter().enumerate() {
        if j < m / 2 {
            buf[j] = *c;
        } else {
            buf[count - (m - j)] = *c;
        }
    }
    FftPlanner::new().plan_fft_inverse(count).process(&mut buf);
    buf
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{joukowski, FAlpha, Generator, Identity};
    use crate::numerics::PrecisionContext;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(192).unwrap()
    }

    fn origin_set(c: &PrecisionContext) -> GeneratorSet {
        GeneratorSet::from_tau(vec![Generator { eps: c.zero(), multiplicity: 1 }]).unwrap()
    }

    #[test]
    fn traced_origin_generator_is_the_unit_circle() {
        let c = ctx();
        let curve = trace_gamma(&origin_set(&c), 64, &TraceOptions::default()).unwrap();
        let worst = curve.nodes().iter().map(|t| (t.norm() - 1.0).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-10, "{worst:e}");
        assert_eq!(curve.winding_number(Complex64::new(0.2, 0.1)), 1);
        assert_eq!(curve.winding_number(Complex64::new(1.2, 0.1)), 0);
        let pt = curve.point(&Float::with_val(192, 1)).unwrap();
        let (s, co) = Float::with_val(192, 1).sin_cos(Float::new(192));
        let exact = Complex::with_val(192, (co, s));
        assert!(abs_f64(&(pt.tau.clone() - &exact)) < 1e-50);
        assert!(abs_f64(&(pt.dtau - Complex::with_val(192, (0, 1)) * exact)) < 1e-50);
    }

    #[test]
    fn segment_parametrization_is_exact() {
        let c = ctx();
        let curve = gamma_from_parametrization(Arc::new(Identity), 64).unwrap();
        assert!(curve.is_segment());
        let th = Float::with_val(192, std::f64::consts::FRAC_PI_3);
        let pt = curve.point(&th).unwrap();
        let t = joukowski(&pt.tau).unwrap();
        assert!(abs_f64(&(t - c.complex(0.5, 0.0))) < 1e-15);
    }

    #[test]
    fn f_alpha_constructors_agree() {
        let c = ctx();
        // e = 0 has preimage -i, e* = -4i/3 has preimage i/3
        let g = GeneratorSet::from_tau(vec![
            Generator { eps: c.complex(0.0, -1.0), multiplicity: 1 },
            Generator { eps: c.parse_complex("0", "1/3").unwrap(), multiplicity: 1 },
        ])
        .unwrap();
        let traced = trace_gamma(&g, 256, &TraceOptions::default()).unwrap();
        let param = gamma_from_parametrization(Arc::new(FAlpha::new(c.real(-0.5))), 256).unwrap();
        // Hausdorff distance between node sets, measured against dense polylines
        let d1 = traced.nodes().iter().map(|&t| param.distance(t)).fold(0.0, f64::max);
        let d2 = param.nodes().iter().map(|&t| traced.distance(t)).fold(0.0, f64::max);
        assert!(d1.max(d2) < 1e-8, "{d1:e} {d2:e}");
        // the J-image passes through the explicit arc points
        for x in [-0.5, 0.0, 0.5] {
            let px = FAlpha::new(c.real(-0.5)).eval_f64(Complex64::new(x, 0.0));
            assert!(traced.distance_to_arc(px) < 1e-8);
        }
    }

    #[test]
    fn paper_three_generator_curve() {
        let c = ctx();
        let pts = [
            (c.parse_complex("-3/4", "1/4").unwrap(), 1),
            (c.parse_complex("87/104", "6/104").unwrap(), 1),
            (c.parse_complex("0", "-1/10").unwrap(), 1),
        ];
        let g = GeneratorSet::from_points(&pts).unwrap();
        let curve = trace_gamma(&g, 256, &TraceOptions::default()).unwrap();
        let r = curve.report();
        assert!(r.symmetry_residual < 1e-8);
        assert!(r.level_residual.unwrap() < 1e-10);
        for gen in g.generators() {
            assert_eq!(curve.winding_number(to_c64(&gen.eps)), 1);
        }
        // working-precision nodes satisfy the level equation
        let pt = curve.point(&Float::with_val(192, 2.0)).unwrap();
        let u = g.level_potential(&pt.tau).unwrap();
        assert!(u.to_f64().abs() < 1e-50);
    }
}
