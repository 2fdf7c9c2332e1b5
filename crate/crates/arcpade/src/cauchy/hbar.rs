use super::density::{ArcPoint, Density};
use super::CauchyError;
use crate::geometry::{joukowski, joukowski_c64, GammaCurve};
use crate::numerics::{abs_f64, to_c64};
use num_complex::Complex64;
use rug::float::Constant;
use rug::{Complex, Float};
use std::sync::Arc;

/// Resolution of the phase track along `F`.
const TRACK_POINTS: usize = 4096;

/// One vanishing point of a density.
#[derive(Clone, Debug)]
pub struct HbarZero {
    pub x: Complex,
    /// The exponent as supplied.
    pub alpha: Float,
    /// `alpha`, or `alpha / 2` when `x = ±1`.
    pub exponent: Float,
    /// Curve parameter of `tau_x^+ = phi^+(x)`, in `[0, pi]`.
    pub s: Float,
    pub tau_plus: Complex,
    endpoint: Option<i8>,
    /// Unit tangent of `F` at `x`, oriented from `-1` to `1`.
    tangent: Complex64,
    /// Continuous argument of `sigma(t)(t - x)` at `s = pi i / TRACK_POINTS`.
    track: Vec<f64>,
}

impl HbarZero {
    pub fn is_endpoint(&self) -> bool {
        self.endpoint.is_some()
    }

    fn sigma(&self, p: &ArcPoint) -> i32 {
        match self.endpoint {
            Some(1) => -1,
            Some(_) => 1,
            None => {
                let sx = self.s.to_f64();
                if (p.s - sx).abs() > 1e-6 {
                    if p.s < sx {
                        1
                    } else {
                        -1
                    }
                } else {
                    let d = to_c64(&Complex::with_val(p.t.prec(), &p.t - &self.x));
                    if (d * self.tangent.conj()).re >= 0.0 {
                        1
                    } else {
                        -1
                    }
                }
            }
        }
    }

    fn tracked(&self, s: f64) -> f64 {
        let u = (s / std::f64::consts::PI * TRACK_POINTS as f64).clamp(0.0, TRACK_POINTS as f64);
        let i = (u.floor() as usize).min(TRACK_POINTS - 1);
        let f = u - i as f64;
        self.track[i] * (1.0 - f) + self.track[i + 1] * f
    }

    /// `2 e (ln|2(t - x)| + i theta_x(t))`, or `None` at `t = x`.
    fn log(&self, p: &ArcPoint) -> Option<Complex> {
        let prec = p.t.prec().0;
        // t - x = (tau - b)(1 - 1/(tau b))/2 keeps full relative accuracy near x
        let tau = &p.tau_plus;
        let b = &self.tau_plus;
        let first = Complex::with_val(prec, tau - b);
        let tb = Complex::with_val(prec, tau * b);
        let mut d = first * (Complex::with_val(prec, 1) - tb.recip()) / 2u32;
        if d.is_zero() {
            return None;
        }
        if self.sigma(p) < 0 {
            d = -d;
        }
        let principal = Float::with_val(prec, d.arg_ref());
        let k = ((self.tracked(p.s) - principal.to_f64()) / std::f64::consts::TAU).round();
        let theta = principal + Float::with_val(prec, Constant::Pi) * 2u32 * k;
        let modulus = Float::with_val(prec, d.abs_ref()) * 2u32;
        let two_e = Float::with_val(prec, &self.exponent * 2u32);
        Some(Complex::with_val(prec, (modulus.ln(), theta)) * two_e)
    }

    /// `e [Log(1 - b/tau) + Log(1 - 1/(b tau))]` with `b = tau_x^+`.
    fn szego_log(&self, tau: &Complex) -> Complex {
        let prec = tau.prec().0;
        let one = Complex::with_val(prec, 1);
        let a = Complex::with_val(prec, &one - Complex::with_val(prec, &self.tau_plus / tau)).ln();
        let btau = Complex::with_val(prec, &self.tau_plus * tau);
        let b = Complex::with_val(prec, &one - btau.recip()).ln();
        (a + b) * &self.exponent
    }
}

/// The density `ħ(F_0; t) = ∏ ħ(alpha_x, x; t)` with exponents halved at `±1`.
#[derive(Clone, Debug)]
pub struct HbarSpec {
    curve: Arc<GammaCurve>,
    zeros: Vec<HbarZero>,
    prec: u32,
}

impl HbarSpec {
    /// Zeros given as points of `F` with their exponents `alpha in (0, 1]`.
    pub fn new(curve: &Arc<GammaCurve>, zeros: &[(Complex, Float)], prec: u32) -> Result<Self, CauchyError> {
        let located = zeros
            .iter()
            .map(|(x, a)| locate(curve, x, prec).map(|(s, tau)| (s, tau, a.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        Self::build(curve, located, prec)
    }

    /// Zeros given by curve parameters `s in [0, pi]` (so `x = J(tau(s))`).
    pub fn at_parameters(curve: &Arc<GammaCurve>, zeros: &[(Float, Float)], prec: u32) -> Result<Self, CauchyError> {
        let located = zeros
            .iter()
            .map(|(s, a)| {
                let s = Float::with_val(prec, s);
                let tau = curve.point(&s)?.tau;
                Ok((s, tau, a.clone()))
            })
            .collect::<Result<Vec<_>, CauchyError>>()?;
        Self::build(curve, located, prec)
    }

    fn build(curve: &Arc<GammaCurve>, located: Vec<(Float, Complex, Float)>, prec: u32) -> Result<Self, CauchyError> {
        check_ray(curve)?;
        let pi = Float::with_val(prec, Constant::Pi);
        let mut zeros: Vec<HbarZero> = Vec::with_capacity(located.len());
        for (s, tau_plus, alpha) in located {
            let a = alpha.to_f64();
            if !(a > 0.0 && a <= 1.0) {
                return Err(CauchyError::InvalidExponent(a));
            }
            let endpoint = if s.is_zero() {
                Some(1)
            } else if s == pi {
                Some(-1)
            } else {
                None
            };
            let (x, tau_plus) = match endpoint {
                Some(e) => (Complex::with_val(prec, e as i32), Complex::with_val(prec, e as i32)),
                None => (joukowski(&tau_plus)?, tau_plus),
            };
            if zeros.iter().any(|z| abs_f64(&Complex::with_val(prec, &z.x - &x)) < 1e-12) {
                return Err(CauchyError::DuplicateZero(to_c64(&x)));
            }
            let exponent = if endpoint.is_some() {
                Float::with_val(prec, &alpha / 2u32)
            } else {
                Float::with_val(prec, &alpha)
            };
            let sx = s.to_f64();
            let tangent = {
                // dt/ds points towards -1; reverse it
                let tau = curve.eval_f64(sx);
                let d = -(1.0 - 1.0 / (tau * tau)) / 2.0 * curve.deriv_f64(sx);
                if d.norm() > 0.0 {
                    d / d.norm()
                } else {
                    Complex64::new(1.0, 0.0)
                }
            };
            let x64 = to_c64(&x);
            let track = phase_track(curve, x64, sx, endpoint);
            zeros.push(HbarZero {
                x,
                alpha,
                exponent,
                s,
                tau_plus,
                endpoint,
                tangent,
                track,
            });
        }
        Ok(Self {
            curve: Arc::clone(curve),
            zeros,
            prec,
        })
    }

    pub fn zeros(&self) -> &[HbarZero] {
        &self.zeros
    }

    pub fn curve(&self) -> &Arc<GammaCurve> {
        &self.curve
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// `ħ(t)` at a point of `F` given by its coordinate. Locates `t` on the arc first.
    pub fn eval_at(&self, t: &Complex) -> Result<Complex, CauchyError> {
        let (s, tau) = locate(&self.curve, t, self.prec)?;
        let p = ArcPoint::from_tau(&tau, s.to_f64());
        // keep the caller's coordinate so t = x gives exactly zero
        let p = ArcPoint { t: t.clone(), ..p };
        Ok(self.eval(&p))
    }

    /// Fails unless the closed-form Szegő function applies (`Gamma` star-shaped about 0).
    pub fn check_closed_form(&self) -> Result<(), CauchyError> {
        if self.curve.report().star_shaped {
            Ok(())
        } else {
            Err(CauchyError::NotStarShaped)
        }
    }

    /// `S_ħ` at the exterior point `tau = phi(z)`.
    pub fn szego_tau(&self, tau: &Complex) -> Complex {
        let mut acc = Complex::new(tau.prec());
        for z in &self.zeros {
            acc += z.szego_log(tau);
        }
        acc.exp()
    }

    /// `(S_ħ^+, S_ħ^-)` at the point of `F` with curve parameter `theta in [0, pi]`.
    pub fn szego_boundary(&self, tau_plus: &Complex) -> (Complex, Complex) {
        let tau_minus = Complex::with_val(tau_plus.prec(), tau_plus.recip_ref());
        (self.szego_tau(tau_plus), self.szego_tau(&tau_minus))
    }
}

impl Density for HbarSpec {
    fn eval(&self, p: &ArcPoint) -> Complex {
        match self.log(p) {
            Some(l) => l.exp(),
            None => Complex::new(p.t.prec()),
        }
    }

    fn log(&self, p: &ArcPoint) -> Option<Complex> {
        let mut acc = Complex::new(p.t.prec());
        for z in &self.zeros {
            acc += z.log(p)?;
        }
        Some(acc)
    }

    fn breakpoints(&self, _curve: &GammaCurve, prec: u32) -> Result<Vec<Float>, CauchyError> {
        Ok(self.zeros.iter().map(|z| Float::with_val(prec, &z.s)).collect())
    }

    fn describe(&self) -> String {
        let parts: Vec<String> = self
            .zeros
            .iter()
            .map(|z| format!("hbar({}, {})", z.alpha.to_f64(), to_c64(&z.x)))
            .collect();
        parts.join(" * ")
    }
}

/// Curve parameter `s in [0, pi]` and `tau^+` of a point `x` of `F`.
pub fn locate(curve: &GammaCurve, x: &Complex, prec: u32) -> Result<(Float, Complex), CauchyError> {
    let pi = Float::with_val(prec, Constant::Pi);
    let tiny = 2f64.powi(-(prec as i32) + 8);
    for (e, s) in [(1i32, Float::new(prec)), (-1, pi.clone())] {
        if abs_f64(&Complex::with_val(prec, x - e)) <= tiny {
            return Ok((s, Complex::with_val(prec, e)));
        }
    }
    let x64 = to_c64(x);
    let (mut best_s, mut best_d) = (0.0, f64::INFINITY);
    for i in 0..=TRACK_POINTS {
        let s = std::f64::consts::PI * i as f64 / TRACK_POINTS as f64;
        let d = (joukowski_c64(curve.eval_f64(s)) - x64).norm();
        if d < best_d {
            best_s = s;
            best_d = d;
        }
    }
    if best_d > 1e-2 {
        return Err(CauchyError::PointNotOnArc { x: x64, distance: best_d });
    }
    let mut s = Float::with_val(prec, best_s);
    let mut residual = f64::INFINITY;
    let step_tol = Float::with_val(prec, Float::i_exp(1, -(prec as i32) + 10));
    for _ in 0..(4 * prec) {
        let pt = curve.point(&s)?;
        let t = joukowski(&pt.tau)?;
        let f = Complex::with_val(prec, &t - x);
        residual = abs_f64(&f);
        let inv2 = Complex::with_val(prec, pt.tau.square_ref()).recip();
        let jp = (Complex::with_val(prec, 1) - inv2) / 2u32;
        let dt = jp * &pt.dtau;
        let den = Float::with_val(prec, dt.norm_ref());
        if den.is_zero() || f.is_zero() {
            break;
        }
        let num = Complex::with_val(prec, &f * dt.conj()).real().clone();
        let step = num / &den;
        s -= &step;
        if s.is_sign_negative() {
            s = Float::new(prec);
        }
        if s > pi {
            s = pi.clone();
        }
        if Float::with_val(prec, step.abs_ref()) <= step_tol {
            let pt = curve.point(&s)?;
            residual = abs_f64(&Complex::with_val(prec, joukowski(&pt.tau)? - x));
            break;
        }
    }
    if residual > 1e-10 * (1.0 + x64.norm()) {
        return Err(CauchyError::PointNotOnArc {
            x: x64,
            distance: residual,
        });
    }
    let tau = curve.point(&s)?.tau;
    Ok((s, tau))
}

/// Continuous argument of `sigma(t)(t - x)` along `F`, starting at `t = 1`.
fn phase_track(curve: &GammaCurve, x: Complex64, sx: f64, endpoint: Option<i8>) -> Vec<f64> {
    let mut raw: Vec<Option<f64>> = (0..=TRACK_POINTS)
        .map(|i| {
            let s = std::f64::consts::PI * i as f64 / TRACK_POINTS as f64;
            let t = joukowski_c64(curve.eval_f64(s));
            let sigma = match endpoint {
                Some(1) => -1.0,
                Some(_) => 1.0,
                None if s < sx => 1.0,
                None => -1.0,
            };
            let d = (t - x) * sigma;
            (d.norm() > 1e-9).then(|| d.arg())
        })
        .collect();
    let tau = std::f64::consts::TAU;
    let mut prev: Option<f64> = None;
    for v in raw.iter_mut().flatten() {
        if let Some(p) = prev {
            *v += ((p - *v) / tau).round() * tau;
        }
        prev = Some(*v);
    }
    let mut out = vec![0.0; raw.len()];
    let first = raw.iter().flatten().next().copied().unwrap_or(0.0);
    let mut last = first;
    for (o, v) in out.iter_mut().zip(&raw) {
        if let Some(v) = v {
            last = *v;
        }
        *o = last;
    }
    out
}

/// Requires that `F` stays off the ray `(1, +inf)`, where the argument
/// normalization of `ħ` is anchored.
fn check_ray(curve: &GammaCurve) -> Result<(), CauchyError> {
    let poly = curve.arc_polyline(TRACK_POINTS);
    for w in poly.windows(2) {
        let (p, q) = (w[0], w[1]);
        let crosses = p.im * q.im < 0.0;
        let re = if crosses { p.re + (q.re - p.re) * p.im / (p.im - q.im) } else { f64::NAN };
        if crosses && re > 1.0 + 1e-9 {
            return Err(CauchyError::ArcMeetsRay);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{gamma_from_parametrization, FAlpha, Identity};
    use crate::numerics::PrecisionContext;

    fn segment() -> Arc<GammaCurve> {
        Arc::new(gamma_from_parametrization(Arc::new(Identity), 64).unwrap())
    }

    #[test]
    fn square_case_on_the_segment() {
        let c = PrecisionContext::new(128).unwrap();
        let spec = HbarSpec::new(&segment(), &[(c.complex(0.0, 0.0), c.real(1.0))], 128).unwrap();
        let v = spec.eval_at(&c.complex(0.5, 0.0)).unwrap();
        assert!(abs_f64(&(v - c.complex(1.0, 0.0))) < 1e-30);
        let v = spec.eval_at(&c.complex(-0.3, 0.0)).unwrap();
        assert!(abs_f64(&(v - c.complex(0.36, 0.0))) < 1e-15);
        assert!(spec.eval_at(&c.complex(0.0, 0.0)).unwrap().is_zero());
    }

    #[test]
    fn fractional_power_is_positive_on_the_segment() {
        let c = PrecisionContext::new(128).unwrap();
        let spec = HbarSpec::new(&segment(), &[(c.complex(0.2, 0.0), c.real(0.3))], 128).unwrap();
        for t in [-0.9, -0.1, 0.5, 0.95] {
            let v = spec.eval_at(&c.complex(t, 0.0)).unwrap();
            let expect = (2.0f64 * (t - 0.2f64).abs()).powf(0.6);
            assert!((to_c64(&v) - expect).norm() < 1e-14, "t={t}: {v}");
        }
    }

    #[test]
    fn square_case_on_a_circular_arc() {
        let c = PrecisionContext::new(128).unwrap();
        let curve = Arc::new(gamma_from_parametrization(Arc::new(FAlpha::new(c.real(-0.5))), 128).unwrap());
        let x = joukowski(&curve.point(&c.real(1.1)).unwrap().tau).unwrap();
        let spec = HbarSpec::new(&curve, &[(x.clone(), c.real(1.0))], 128).unwrap();
        assert!((spec.zeros()[0].s.to_f64() - 1.1).abs() < 1e-25);
        for s in [0.2, 0.9, 1.3, 2.8] {
            let pt = curve.point(&c.real(s)).unwrap();
            let p = ArcPoint::from_tau(&pt.tau, s);
            let d = Complex::with_val(128, &p.t - &x);
            let expect = Complex::with_val(128, d.square_ref()) * 4u32;
            assert!(abs_f64(&(spec.eval(&p) - expect)) < 1e-28, "s={s}");
        }
    }

    #[test]
    fn endpoint_exponent_is_halved() {
        let c = PrecisionContext::new(128).unwrap();
        let spec = HbarSpec::new(&segment(), &[(c.complex(1.0, 0.0), c.real(0.5))], 128).unwrap();
        assert!(spec.zeros()[0].is_endpoint());
        assert_eq!(spec.zeros()[0].exponent.to_f64(), 0.25);
        let v = spec.eval_at(&c.complex(0.0, 0.0)).unwrap();
        assert!((to_c64(&v) - 2f64.powf(0.5)).norm() < 1e-14);
    }

    #[test]
    fn rejects_points_off_the_arc() {
        let c = PrecisionContext::new(128).unwrap();
        assert!(matches!(
            HbarSpec::new(&segment(), &[(c.complex(0.0, 0.5), c.real(0.3))], 128),
            Err(CauchyError::PointNotOnArc { .. })
        ));
    }
}
