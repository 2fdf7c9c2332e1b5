use crate::numerics::{to_c64, Polynomial};
use num_complex::Complex64;
use rug::{Complex, Float};
use std::fmt;

/// An analytic, univalent map `p` of `[-1, 1]` onto the arc with
/// `p(-1) = -1` and `p(1) = 1`.
///
/// Implementations must accept complex arguments: equal-flux schemes
/// evaluate `p` on Bernstein ellipses around `[-1, 1]`.
pub trait ArcParametrization: Send + Sync + fmt::Debug {
    /// `p(x)` and `p'(x)` at the precision of `x`.
    fn eval(&self, x: &Complex) -> (Complex, Complex);

    /// `p(x)` in double precision.
    fn eval_f64(&self, x: Complex64) -> Complex64 {
        let (v, _) = self.eval(&Complex::with_val(64, (x.re, x.im)));
        to_c64(&v)
    }

    /// True only for the identity, whose curve is the unit circle.
    fn is_segment(&self) -> bool {
        false
    }

    /// Short description stored in curve headers.
    fn describe(&self) -> String;
}

/// `p(x) = x`: the arc is `[-1, 1]`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Identity;

impl ArcParametrization for Identity {
    fn eval(&self, x: &Complex) -> (Complex, Complex) {
        (x.clone(), Complex::with_val(x.prec(), 1))
    }

    fn eval_f64(&self, x: Complex64) -> Complex64 {
        x
    }

    fn is_segment(&self) -> bool {
        true
    }

    fn describe(&self) -> String {
        "segment".into()
    }
}

/// The circular arc `F_alpha = { (i alpha + x)/(1 + i alpha x) : x in [-1, 1] }`.
#[derive(Clone, Debug)]
pub struct FAlpha {
    alpha: Float,
}

impl FAlpha {
    pub fn new(alpha: Float) -> Self {
        Self { alpha }
    }

    pub fn alpha(&self) -> &Float {
        &self.alpha
    }
}

impl ArcParametrization for FAlpha {
    fn eval(&self, x: &Complex) -> (Complex, Complex) {
        let prec = x.prec().0;
        let ia = Complex::with_val(prec, (0, &self.alpha));
        let den = Complex::with_val(prec, &ia * x) + 1u32;
        let num = Complex::with_val(prec, &ia + x);
        let a2 = Float::with_val(prec, self.alpha.square_ref()) + 1u32;
        let dp = Complex::with_val(prec, a2) / Complex::with_val(prec, den.square_ref());
        (num / den, dp)
    }

    fn eval_f64(&self, x: Complex64) -> Complex64 {
        let ia = Complex64::new(0.0, self.alpha.to_f64());
        (ia + x) / (1.0 + ia * x)
    }

    fn describe(&self) -> String {
        format!("f_alpha({})", self.alpha.to_f64())
    }
}

/// A polynomial arc `p(x) = sum c_k x^k`; the caller guarantees univalence
/// and `p(+-1) = +-1`.
#[derive(Clone, Debug)]
pub struct PolynomialArc {
    poly: Polynomial,
    derivative: Polynomial,
    poly64: Vec<Complex64>,
}

impl PolynomialArc {
    pub fn new(poly: Polynomial) -> Self {
        let derivative = poly.derivative();
        let poly64 = poly.coeffs().iter().map(to_c64).collect();
        Self {
            poly,
            derivative,
            poly64,
        }
    }

    pub fn polynomial(&self) -> &Polynomial {
        &self.poly
    }
}

impl ArcParametrization for PolynomialArc {
    fn eval(&self, x: &Complex) -> (Complex, Complex) {
        (self.poly.eval(x), self.derivative.eval(x))
    }

    fn eval_f64(&self, x: Complex64) -> Complex64 {
        self.poly64.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c)
    }

    fn describe(&self) -> String {
        format!("polynomial(degree {})", self.poly.degree().unwrap_or(0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{abs_f64, PrecisionContext};

    #[test]
    fn f_alpha_fixes_endpoints_and_hits_the_centre() {
        let c = PrecisionContext::new(128).unwrap();
        let p = FAlpha::new(c.real(-0.5));
        for s in [-1.0, 1.0] {
            let (v, _) = p.eval(&c.complex(s, 0.0));
            assert!(abs_f64(&(v - c.complex(s, 0.0))) < 1e-35);
        }
        let (mid, d) = p.eval(&c.zero());
        assert!(abs_f64(&(mid - c.complex(0.0, -0.5))) < 1e-35);
        assert!(abs_f64(&(d - c.complex(1.25, 0.0))) < 1e-35);
        let z = p.eval_f64(Complex64::new(0.3, 0.0));
        let (zz, _) = p.eval(&c.complex(0.3, 0.0));
        assert!((z - to_c64(&zz)).norm() < 1e-15);
    }

    #[test]
    fn polynomial_arc_derivative() {
        let c = PrecisionContext::new(128).unwrap();
        // p(x) = x + 0.2 i (1 - x^2)
        let poly = Polynomial::new(vec![c.complex(0.0, 0.2), c.one(), c.complex(0.0, -0.2)]);
        let p = PolynomialArc::new(poly);
        let (v, d) = p.eval(&c.complex(0.5, 0.0));
        assert!(abs_f64(&(v - c.complex(0.5, 0.15))) < 1e-15);
        assert!(abs_f64(&(d - c.complex(1.0, -0.2))) < 1e-15);
    }
}
