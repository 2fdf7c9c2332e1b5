use super::CauchyError;
use crate::geometry::{joukowski, GammaCurve};
use crate::numerics::{to_c64, Polynomial};
use rug::{Complex, Float};
use std::fmt;
use std::sync::Arc;

/// A point of `F` seen from both sides.
#[derive(Clone, Debug, PartialEq)]
pub struct ArcPoint {
    pub t: Complex,
    pub tau_plus: Complex,
    pub tau_minus: Complex,
    /// Curve parameter of `tau_plus`, in `[0, pi]` (`0` at `t = 1`).
    pub s: f64,
}

impl ArcPoint {
    /// The same point rounded to `prec` bits.
    pub fn rounded(&self, prec: u32) -> Self {
        Self {
            t: Complex::with_val(prec, &self.t),
            tau_plus: Complex::with_val(prec, &self.tau_plus),
            tau_minus: Complex::with_val(prec, &self.tau_minus),
            s: self.s,
        }
    }

    /// Frame of the point `tau` of `Gamma` with parameter `theta`.
    pub fn from_tau(tau: &Complex, theta: f64) -> Self {
        let prec = tau.prec().0;
        let inv = Complex::with_val(prec, tau.recip_ref());
        let t = joukowski(tau).expect("curve avoids the origin");
        let theta = theta.rem_euclid(std::f64::consts::TAU);
        if theta <= std::f64::consts::PI {
            Self {
                t,
                tau_plus: tau.clone(),
                tau_minus: inv,
                s: theta,
            }
        } else {
            Self {
                t,
                tau_plus: inv,
                tau_minus: tau.clone(),
                s: std::f64::consts::TAU - theta,
            }
        }
    }
}

/// A density on the arc, possibly depending on the side of `F` through
/// `(t, tau_plus, tau_minus)`.
pub trait Density: Send + Sync + fmt::Debug {
    fn eval(&self, p: &ArcPoint) -> Complex;

    /// A logarithm that is continuous along `F`, when one is known in closed
    /// form. Densities without one are unwrapped numerically.
    fn log(&self, _p: &ArcPoint) -> Option<Complex> {
        None
    }

    /// Curve parameters in `[0, pi]` where the density is not smooth.
    fn breakpoints(&self, _curve: &GammaCurve, _prec: u32) -> Result<Vec<Float>, CauchyError> {
        Ok(Vec::new())
    }

    fn describe(&self) -> String;
}

/// `h(t) = c`.
#[derive(Clone, Debug)]
pub struct Constant(pub Complex);

impl Density for Constant {
    fn eval(&self, p: &ArcPoint) -> Complex {
        Complex::with_val(p.t.prec(), &self.0)
    }

    fn log(&self, p: &ArcPoint) -> Option<Complex> {
        Some(Complex::with_val(p.t.prec(), &self.0).ln())
    }

    fn describe(&self) -> String {
        format!("const({})", to_c64(&self.0))
    }
}

/// `h(t) = exp(a t)`.
#[derive(Clone, Debug)]
pub struct ExpDensity(pub Complex);

impl Density for ExpDensity {
    fn eval(&self, p: &ArcPoint) -> Complex {
        Complex::with_val(p.t.prec(), &self.0 * &p.t).exp()
    }

    fn log(&self, p: &ArcPoint) -> Option<Complex> {
        Some(Complex::with_val(p.t.prec(), &self.0 * &p.t))
    }

    fn describe(&self) -> String {
        format!("exp({} t)", to_c64(&self.0))
    }
}

/// `h(t) = P(t)` for a polynomial without zeros on `F`.
#[derive(Clone, Debug)]
pub struct PolyDensity(pub Polynomial);

impl Density for PolyDensity {
    fn eval(&self, p: &ArcPoint) -> Complex {
        self.0.eval(&p.t)
    }

    fn describe(&self) -> String {
        format!("poly(degree {})", self.0.degree().unwrap_or(0))
    }
}

/// `h(t) = t` where `Im t >= 0` and `conj(t)` elsewhere.
#[derive(Clone, Copy, Debug, Default)]
pub struct SideConj;

impl Density for SideConj {
    fn eval(&self, p: &ArcPoint) -> Complex {
        if p.t.imag().is_sign_negative() && !p.t.imag().is_zero() {
            Complex::with_val(p.t.prec(), p.t.conj_ref())
        } else {
            p.t.clone()
        }
    }

    fn breakpoints(&self, curve: &GammaCurve, prec: u32) -> Result<Vec<Float>, CauchyError> {
        real_axis_crossings(curve, prec)
    }

    fn describe(&self) -> String {
        "side_conj".into()
    }
}

/// Pointwise product of densities.
#[derive(Clone, Debug)]
pub struct Product(pub Vec<Arc<dyn Density>>);

impl Density for Product {
    fn eval(&self, p: &ArcPoint) -> Complex {
        let mut acc = Complex::with_val(p.t.prec(), 1);
        for d in &self.0 {
            acc *= d.eval(p);
        }
        acc
    }

    fn log(&self, p: &ArcPoint) -> Option<Complex> {
        let mut acc = Complex::new(p.t.prec());
        for d in &self.0 {
            acc += d.log(p)?;
        }
        Some(acc)
    }

    fn breakpoints(&self, curve: &GammaCurve, prec: u32) -> Result<Vec<Float>, CauchyError> {
        let mut all = Vec::new();
        for d in &self.0 {
            all.extend(d.breakpoints(curve, prec)?);
        }
        Ok(all)
    }

    fn describe(&self) -> String {
        let parts: Vec<String> = self.0.iter().map(|d| d.describe()).collect();
        parts.join(" * ")
    }
}

/// A density given by a closure over the arc point.
pub struct FnDensity<F> {
    f: F,
    name: String,
}

impl<F> FnDensity<F>
where
    F: Fn(&ArcPoint) -> Complex + Send + Sync,
{
    pub fn new(name: impl Into<String>, f: F) -> Self {
        Self { f, name: name.into() }
    }
}

impl<F> fmt::Debug for FnDensity<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnDensity").field("name", &self.name).finish()
    }
}

impl<F> Density for FnDensity<F>
where
    F: Fn(&ArcPoint) -> Complex + Send + Sync,
{
    fn eval(&self, p: &ArcPoint) -> Complex {
        (self.f)(p)
    }

    fn describe(&self) -> String {
        self.name.clone()
    }
}

/// Interior points of `F` on the real axis, as curve parameters in `(0, pi)`.
pub fn real_axis_crossings(curve: &GammaCurve, prec: u32) -> Result<Vec<Float>, CauchyError> {
    const SCAN: usize = 4096;
    let pi = std::f64::consts::PI;
    let im_t = |s: f64| crate::geometry::joukowski_c64(curve.eval_f64(s)).im;
    let mut out = Vec::new();
    let mut prev = (pi / SCAN as f64, im_t(pi / SCAN as f64));
    for j in 2..SCAN {
        let s = pi * j as f64 / SCAN as f64;
        let v = im_t(s);
        if prev.1 * v < 0.0 && prev.1.abs().max(v.abs()) > 1e-12 {
            out.push(refine_crossing(curve, prev.0, s, prec)?);
        }
        prev = (s, v);
    }
    Ok(out)
}

/// Bisection with secant acceleration on `Im J(tau(s)) = 0` at working precision.
fn refine_crossing(curve: &GammaCurve, lo: f64, hi: f64, prec: u32) -> Result<Float, CauchyError> {
    let im = |s: &Float| -> Result<Float, CauchyError> {
        let pt = curve.point(s)?;
        Ok(joukowski(&pt.tau)?.imag().clone())
    };
    let mut a = Float::with_val(prec, lo);
    let mut b = Float::with_val(prec, hi);
    let mut fa = im(&a)?;
    let tiny = Float::with_val(prec, Float::i_exp(1, -(prec as i32) + 4));
    for _ in 0..(4 * prec) {
        let width = Float::with_val(prec, &b - &a);
        if width < tiny {
            break;
        }
        let mid = Float::with_val(prec, &a + &b) / 2u32;
        let fm = im(&mid)?;
        if fm.is_zero() {
            return Ok(mid);
        }
        if (fm.is_sign_negative()) == (fa.is_sign_negative()) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(Float::with_val(prec, &a + &b) / 2u32)
}
