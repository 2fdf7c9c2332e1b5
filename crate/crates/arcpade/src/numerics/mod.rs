//! Working-precision arithmetic, polynomials, dense linear solves and
//! simultaneous polynomial root finding.
//!
//! Every high-precision quantity in the crate is a [`rug::Float`] or
//! [`rug::Complex`] carrying the mantissa length chosen by a
//! [`PrecisionContext`]. Floating point decisions that do not affect the
//! answer (branch choices, inside/outside tests, plotting) run in `f64`.

mod linalg;
mod poly;
mod precision;
mod roots;

pub use linalg::{solve_dense, LuDecomposition, Matrix};
pub use poly::{poly_eval, Polynomial};
pub use precision::{PrecisionContext, BITS_ENV, DEFAULT_BITS, MIN_BITS};
pub use roots::{poly_roots, RootOptions};
pub use rug::{Complex, Float};

use num_complex::Complex64;
use thiserror::Error;

/// Failures raised by the numerical kernels.
#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("precision of {bits} bits is below the minimum of {min}")]
    PrecisionTooLow { bits: u32, min: u32 },
    #[error("default tolerance {tol:e} is below 16 eps ({floor:e})")]
    ToleranceTooSmall { tol: f64, floor: f64 },
    #[error("singular matrix: pivot {pivot:e} at step {step} is below eps times the row maximum {row_max:e}")]
    SingularMatrix { step: usize, pivot: f64, row_max: f64 },
    #[error("dimension mismatch: matrix is {n}x{n}, right-hand side has length {len}")]
    DimensionMismatch { n: usize, len: usize },
    #[error("root finder did not converge after {iterations} iterations (worst residual {worst:e})")]
    NoConvergence {
        iterations: usize,
        partial: Vec<Complex>,
        residuals: Vec<f64>,
        worst: f64,
    },
    #[error("polynomial of degree {0} has no roots to find")]
    DegreeTooLow(usize),
    #[error("leading coefficient is zero")]
    ZeroLeadingCoefficient,
    #[error("non-finite value produced by {0}")]
    NonFinite(&'static str),
    #[error("cannot parse number {0:?}")]
    Parse(String),
}

/// Rounds a working-precision complex number to `f64` components.
pub fn to_c64(z: &Complex) -> Complex64 {
    Complex64::new(z.real().to_f64(), z.imag().to_f64())
}

/// `|z|` rounded to `f64`.
pub fn abs_f64(z: &Complex) -> f64 {
    let (re, im) = (z.real().to_f64(), z.imag().to_f64());
    let m = re.hypot(im);
    if m.is_finite() && m > 1e-290 {
        return m;
    }
    // outside the f64 exponent range the rounded parts lose everything
    Float::with_val(z.prec().0, z.abs_ref()).to_f64()
}

/// `|z|` at the precision of `z`.
pub fn abs(z: &Complex) -> Float {
    Float::with_val(z.prec().0, z.abs_ref())
}

/// Errors out if either component of `z` is NaN or infinite.
pub fn ensure_finite(z: &Complex, what: &'static str) -> Result<(), NumericsError> {
    if z.real().is_finite() && z.imag().is_finite() {
        Ok(())
    } else {
        Err(NumericsError::NonFinite(what))
    }
}

/// Decimal rendering with `digits` significant digits, used by every export.
pub fn float_to_decimal(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    x.to_string_radix(10, Some(digits))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abs_f64_survives_tiny_magnitudes() {
        let ctx = PrecisionContext::new(128).unwrap();
        let tiny = ctx.complex(1.0, 0.0) * Float::with_val(128, Float::i_exp(1, -1000));
        let expected = 2f64.powi(-1000);
        let got = abs_f64(&tiny);
        assert!(got == 0.0 || (got - expected).abs() <= expected * 1e-12);
    }

    #[test]
    fn decimal_rendering_is_stable() {
        let ctx = PrecisionContext::new(128).unwrap();
        assert_eq!(float_to_decimal(&ctx.real(0.5), 5), "5.0000e-1");
        assert_eq!(float_to_decimal(&ctx.real(0.0), 5), "0");
    }
}
