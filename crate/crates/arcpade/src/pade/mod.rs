//! Multipoint Padé approximants to Cauchy transforms of measures on `F`.
//!
//! The measure is `dmu = mu_dot i dt / (pi w^+)`. Its Cauchy transform
//! `f_mu(z) = ∫ dmu(t) / (z - t)` coincides with the function of the second
//! kind of degree zero for the weight `mu_dot`, and the approximant of index
//! `n` along a scheme is represented implicitly through
//! `f_mu - Pi_n = v_n R_n / q_n`, where `q_n` is orthogonal for
//! `w_n = mu_dot / v_n`.

mod field;

pub use field::{error_field_csv, FieldGrid};

use crate::cauchy::{CauchyError, Density, HbarSpec, SzegoFunction};
use crate::geometry::{phi_of, w_of_tau, GammaCurve, GeometryError};
use crate::numerics::{abs_f64, to_c64, Polynomial};
use crate::orthopoly::{solve_qn, MomentBasis, OrthoError, OrthoOptions, OrthoResult, WeightSpec};
use crate::schemes::{InterpolationScheme, SchemeKind};
use num_complex::Complex64;
use rug::float::Constant;
use rug::{Complex, Float};
use std::sync::{Arc, OnceLock};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PadeError {
    #[error("z = {z} is a pole of the approximant (|q_n(z)| = {q_abs:e})")]
    AtPoleOfApproximant { z: Complex64, q_abs: f64 },
    #[error("coefficient {index} of p_n is {value:e}, above the cancellation tolerance {tol:e}; raise the precision")]
    CancellationCheckFailed { index: usize, value: f64, tol: f64 },
    #[error(transparent)]
    Ortho(#[from] OrthoError),
    #[error(transparent)]
    Cauchy(#[from] CauchyError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// The measure `dmu = mu_dot i dt / (pi w^+)` with `mu_dot = h hbar`.
#[derive(Clone, Debug)]
pub struct MeasureSpec {
    base: WeightSpec,
    opts: OrthoOptions,
    prec: u32,
    transform: Arc<OnceLock<Arc<OrthoResult>>>,
}

impl MeasureSpec {
    pub fn new(curve: Arc<GammaCurve>, h: Arc<dyn Density>, hbar: Option<Arc<HbarSpec>>, prec: u32) -> Self {
        let classical = Arc::new(InterpolationScheme::new(curve, SchemeKind::Classical, prec));
        Self {
            base: WeightSpec::new(h, hbar, classical),
            opts: OrthoOptions::default(),
            prec,
            transform: Arc::new(OnceLock::new()),
        }
    }

    pub fn with_options(mut self, opts: OrthoOptions) -> Self {
        self.opts = opts;
        self.transform = Arc::new(OnceLock::new());
        self
    }

    pub fn curve(&self) -> &Arc<GammaCurve> {
        self.base.curve()
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn options(&self) -> &OrthoOptions {
        &self.opts
    }

    /// The weights `mu_dot / v_n` along `scheme`, sharing grids with this measure.
    pub fn weights(&self, scheme: Arc<InterpolationScheme>) -> WeightSpec {
        self.base.with_scheme(scheme)
    }

    /// Degree-zero data for `mu_dot`: `f_mu`, `G_mu_dot` and `S_mu_dot`.
    pub fn transform(&self) -> Result<&Arc<OrthoResult>, PadeError> {
        if let Some(r) = self.transform.get() {
            return Ok(r);
        }
        let r = Arc::new(solve_qn(&self.base, 0, &self.opts, self.prec)?);
        Ok(self.transform.get_or_init(|| r))
    }

    /// `S_h` of the smooth factor, without `hbar`.
    pub fn szego_h(&self) -> Result<Arc<SzegoFunction>, PadeError> {
        Ok(self.base.szego_h(&self.opts.quad, self.prec)?)
    }

    pub fn hbar(&self) -> Option<&Arc<HbarSpec>> {
        self.base.hbar()
    }

    /// `∫ dmu`.
    pub fn mass(&self) -> Result<Complex, PadeError> {
        let m0 = self.transform()?.table().moments(0, MomentBasis::Monomial).remove(0);
        Ok(i_over_pi(self.prec) * m0)
    }
}

/// `i / pi`, the constant relating `dmu` to `mu_dot dt / w^+`.
fn i_over_pi(prec: u32) -> Complex {
    let inv_pi = Float::with_val(prec, Constant::Pi).recip();
    Complex::with_val(prec, (Float::new(prec), inv_pi))
}

/// `f_mu(z)` for `z` off `F`.
pub fn cauchy_transform(ms: &MeasureSpec, z: &Complex) -> Result<Complex, PadeError> {
    // (1/pi i) ∫ mu_dot / (t - z) dt/w^+ = (i/pi) ∫ mu_dot / (z - t) dt/w^+
    Ok(ms.transform()?.second_kind(z)?)
}

/// The approximant of index `n` to `f_mu` along a scheme.
#[derive(Clone, Debug)]
pub struct PadeResult {
    ortho: OrthoResult,
    measure: MeasureSpec,
    p: Option<Polynomial>,
}

/// Solves for `q_n` with the weight `mu_dot / v_n`.
pub fn pade(ms: &MeasureSpec, scheme: &Arc<InterpolationScheme>, n: usize) -> Result<PadeResult, PadeError> {
    let ortho = solve_qn(&ms.weights(Arc::clone(scheme)), n, &ms.opts, ms.prec)?;
    Ok(PadeResult {
        ortho,
        measure: ms.clone(),
        p: None,
    })
}

impl PadeResult {
    pub fn n(&self) -> usize {
        self.ortho.n()
    }

    pub fn ortho(&self) -> &OrthoResult {
        &self.ortho
    }

    pub fn measure(&self) -> &MeasureSpec {
        &self.measure
    }

    pub fn q(&self) -> &Polynomial {
        self.ortho.q()
    }

    pub fn v(&self) -> &Polynomial {
        self.ortho.weight().level().v()
    }

    /// The explicit numerator, once [`PadeResult::with_numerator`] has run.
    pub fn p(&self) -> Option<&Polynomial> {
        self.p.as_ref()
    }

    /// Attaches `p_n` after the cancellation check.
    pub fn with_numerator(mut self) -> Result<Self, PadeError> {
        self.p = Some(pade_numerator(&self)?);
        Ok(self)
    }

    fn prec(&self) -> u32 {
        self.ortho.prec()
    }

    fn eps(&self) -> f64 {
        2f64.powi(1 - self.prec() as i32)
    }

    /// Errors when `z` is numerically a zero of `q_n`.
    fn check_pole(&self, z: &Complex) -> Result<Complex, PadeError> {
        let q = self.q().eval(z);
        let q_abs = abs_f64(&q);
        let scale = self.q().abs_eval(abs_f64(z));
        if q_abs <= 1e4 * self.eps() * scale {
            return Err(PadeError::AtPoleOfApproximant { z: to_c64(z), q_abs });
        }
        Ok(q)
    }

    /// `(f_mu - Pi_n)(z) = v_n R_n / q_n`.
    pub fn error(&self, z: &Complex) -> Result<Complex, PadeError> {
        let q = self.check_pole(z)?;
        let a = phi_of(z, self.ortho.curve())?;
        let rw = self.ortho.second_kind_w_tau(&a)?;
        Ok(self.v().eval(z) * rw / (q * w_of_tau(&a)))
    }

    /// Relative tolerance for comparing `p_n / q_n` with the implicit value at `z`:
    /// `1e4 eps` times the evaluation condition of `q_n` and of `p_n`.
    pub fn cross_tol(&self, z: &Complex) -> f64 {
        let r = abs_f64(z);
        let cond = |p: &Polynomial| p.abs_eval(r) / abs_f64(&p.eval(z)).max(f64::MIN_POSITIVE);
        let mut c = cond(self.q());
        if let Some(p) = &self.p {
            if !p.is_zero() {
                c = c.max(cond(p));
            }
        }
        1e4 * self.eps() * c
    }

    /// Integral of `(q_n f_mu - p_n) / v_n` over the circle of radius `radius`
    /// about `e` (trapezoidal rule, `m` nodes), relative to the integral of
    /// `|q_n f_mu / v_n|`. Zero when the approximant interpolates at `e`, up
    /// to the accuracy of `f_mu`.
    pub fn interpolation_residual(&self, e: &Complex, radius: f64, m: usize) -> Result<f64, PadeError> {
        let prec = self.prec();
        let p = match &self.p {
            Some(p) => p.clone(),
            None => pade_numerator(self)?,
        };
        let mut acc = Complex::new(prec);
        let mut scale = 0.0;
        for k in 0..m {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
            let dz = Complex::with_val(prec, (radius * theta.cos(), radius * theta.sin()));
            let z = Complex::with_val(prec, e + &dz);
            let v = self.v().eval(&z);
            let qf = self.q().eval(&z) * cauchy_transform(&self.measure, &z)?;
            scale += abs_f64(&qf) / abs_f64(&v) * radius;
            // dz = i (z - e) d theta
            acc += (qf - p.eval(&z)) / v * dz;
        }
        Ok(abs_f64(&acc) / scale)
    }
}

/// `Pi_n(z) = f_mu(z) - v_n(z) R_n(z) / q_n(z)`.
pub fn pade_evaluate(pr: &PadeResult, z: &Complex) -> Result<Complex, PadeError> {
    let err = pr.error(z)?;
    Ok(cauchy_transform(&pr.measure, z)? - err)
}

/// `p_n` with coefficients assembled from the moments of `w_n`.
///
/// `[q_n(z) v_n(t) - q_n(t) v_n(z)] / (z - t)` expands term by term; the
/// coefficients of index `n` and above are combinations of orthogonality
/// residuals and are checked to vanish before truncation.
pub fn pade_numerator(pr: &PadeResult) -> Result<Polynomial, PadeError> {
    let n = pr.n();
    let prec = pr.prec();
    if n == 0 {
        return Ok(Polynomial::zero());
    }
    let q = pr.q().coeffs();
    let v = pr.v().coeffs();
    let top = q.len().max(v.len()) - 1;
    let m = pr.ortho.table().moments(q.len() + v.len() - 2, MomentBasis::Monomial);
    let mut coeffs = vec![Complex::new(prec); top];
    let mut scale = vec![0.0f64; top];
    for (a, qa) in q.iter().enumerate() {
        for (b, vb) in v.iter().enumerate() {
            if a == b {
                continue;
            }
            let qv = Complex::with_val(prec, qa * vb);
            let (lo, hi, positive) = if b < a { (b, a, true) } else { (a, b, false) };
            for (k, (c, s)) in coeffs.iter_mut().zip(scale.iter_mut()).enumerate().take(hi).skip(lo) {
                let term = Complex::with_val(prec, &qv * &m[a + b - 1 - k]);
                *s += abs_f64(&term);
                if positive {
                    *c += term;
                } else {
                    *c -= term;
                }
            }
        }
    }
    let i_pi = i_over_pi(prec);
    let residual_max = pr.ortho.diagnostics().residual_max;
    let v_norm: f64 = v.iter().map(abs_f64).sum();
    let eps = pr.eps();
    for (index, (c, s)) in coeffs.iter().zip(&scale).enumerate().skip(n) {
        let value = abs_f64(c) / std::f64::consts::PI;
        let tol = (1e4 * eps * s + 2.0 * v_norm * residual_max) / std::f64::consts::PI;
        if value > tol {
            return Err(PadeError::CancellationCheckFailed { index, value, tol });
        }
    }
    coeffs.truncate(n);
    Ok(Polynomial::new(coeffs.into_iter().map(|c| c * &i_pi).collect()))
}

/// `rho_n(z) = (f_mu - Pi_n)(z) w(z) / (2 G_mu_dot S_mu_dot(z)^2 r_n(z))`.
pub fn speedconv_ratio(pr: &PadeResult, ms: &MeasureSpec, z: &Complex) -> Result<Complex, PadeError> {
    let q = pr.check_pole(z)?;
    let a = phi_of(z, pr.ortho.curve())?;
    let rw = pr.ortho.second_kind_w_tau(&a)?;
    let t0 = ms.transform()?;
    let s = t0.szego().eval_tau(&a)?;
    let rn = pr.ortho.weight().level().rn_at_tau(&a);
    let den = Complex::with_val(pr.prec(), t0.gm() * 2u32) * Complex::with_val(pr.prec(), s.square_ref()) * rn * q;
    Ok(pr.v().eval(z) * rw / den)
}

#[cfg(test)]
mod tests;
