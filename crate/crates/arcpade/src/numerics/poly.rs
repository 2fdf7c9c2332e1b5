use super::abs_f64;
use rug::Complex;

/// Dense polynomial with coefficients in ascending order of degree.
///
/// The degree is structural: it is the index of the last stored coefficient,
/// even if that coefficient happens to vanish. The empty vector is the zero
/// polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<Complex>) -> Self {
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex) -> Self {
        Self { coeffs: vec![c] }
    }

    /// `prod (z - r)` expanded, with a literal unit leading coefficient.
    pub fn from_roots(roots: &[Complex], prec: u32) -> Self {
        let mut coeffs = vec![Complex::with_val(prec, 1)];
        for r in roots {
            let mut next = vec![Complex::new(prec); coeffs.len() + 1];
            for (k, c) in coeffs.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= Complex::with_val(prec, c * r);
            }
            coeffs = next;
        }
        Self { coeffs }
    }

    /// Polynomial with real coefficients given as `f64`.
    pub fn from_f64(coeffs: &[f64], prec: u32) -> Self {
        Self {
            coeffs: coeffs.iter().map(|&c| Complex::with_val(prec, c)).collect(),
        }
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex> {
        self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<&Complex> {
        self.coeffs.last()
    }

    /// True when the leading coefficient is exactly one.
    pub fn is_monic(&self) -> bool {
        self.coeffs
            .last()
            .map(|c| c.imag().is_zero() && *c.real() == 1)
            .unwrap_or(false)
    }

    /// Horner evaluation at the precision of `z`.
    pub fn eval(&self, z: &Complex) -> Complex {
        let prec = z.prec().0;
        let mut acc = Complex::new(prec);
        for c in self.coeffs.iter().rev() {
            acc *= z;
            acc += c;
        }
        acc
    }

    /// Value and first derivative in one Horner sweep.
    pub fn eval_with_derivative(&self, z: &Complex) -> (Complex, Complex) {
        let prec = z.prec().0;
        let mut p = Complex::new(prec);
        let mut dp = Complex::new(prec);
        for c in self.coeffs.iter().rev() {
            dp *= z;
            dp += &p;
            p *= z;
            p += c;
        }
        (p, dp)
    }

    /// `sum |a_k| |z|^k`, the scale used for backward-error tests.
    pub fn abs_eval(&self, r: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + abs_f64(c))
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(abs_f64).fold(0.0, f64::max)
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| Complex::with_val(c.prec(), c * k as u32))
            .collect();
        Self { coeffs }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let prec = self.coeffs[0].prec();
        let mut out = vec![Complex::new(prec); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += Complex::with_val(prec, a * b);
            }
        }
        Self { coeffs: out }
    }

    /// Multiplies every coefficient by `c`.
    pub fn scale(&self, c: &Complex) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .map(|a| Complex::with_val(a.prec(), a * c))
                .collect(),
        }
    }

    /// Drops every coefficient above `degree`.
    pub fn truncated(&self, degree: usize) -> Self {
        Self {
            coeffs: self.coeffs.iter().take(degree + 1).cloned().collect(),
        }
    }
}

/// Value of `p` at `z` by nested multiplication.
pub fn poly_eval(p: &Polynomial, z: &Complex) -> Complex {
    p.eval(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::PrecisionContext;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(128).unwrap()
    }

    #[test]
    fn eval_examples() {
        let c = ctx();
        let p = Polynomial::from_f64(&[-1.0, 0.0, 1.0], 128);
        assert!(p.eval(&c.one()).is_zero());

        let one = Polynomial::from_f64(&[1.0], 128);
        assert_eq!(one.eval(&c.complex(7.0, 3.0)), c.one());

        // z^3 - (3/4) z at 1/2 is exactly -1/4
        let cheb = Polynomial::from_f64(&[0.0, -0.75, 0.0, 1.0], 128);
        assert_eq!(cheb.eval(&c.complex(0.5, 0.0)), c.complex(-0.25, 0.0));
    }

    #[test]
    fn derivative_and_joint_eval_agree() {
        let c = ctx();
        let p = Polynomial::from_f64(&[2.0, -3.0, 0.5, 1.0], 128);
        let z = c.complex(0.3, -1.2);
        let (v, dv) = p.eval_with_derivative(&z);
        assert_eq!(v, p.eval(&z));
        assert_eq!(dv, p.derivative().eval(&z));
    }

    #[test]
    fn from_roots_is_monic_and_vanishes() {
        let c = ctx();
        let roots = [c.complex(1.0, 2.0), c.complex(-0.5, 0.0), c.complex(0.0, -1.0)];
        let p = Polynomial::from_roots(&roots, 128);
        assert!(p.is_monic());
        assert_eq!(p.degree(), Some(3));
        for r in &roots {
            assert!(abs_f64(&p.eval(r)) < 1e-30);
        }
    }

    #[test]
    fn product_matches_pointwise_product() {
        let c = ctx();
        let a = Polynomial::from_f64(&[1.0, 2.0], 128);
        let b = Polynomial::from_f64(&[-3.0, 0.0, 1.0], 128);
        let z = c.complex(0.7, 0.2);
        let lhs = a.mul(&b).eval(&z);
        let rhs = Complex::with_val(128, a.eval(&z) * b.eval(&z));
        assert!(abs_f64(&Complex::with_val(128, &lhs - &rhs)) < 1e-30);
        assert!(Polynomial::zero().mul(&a).is_zero());
    }
}
