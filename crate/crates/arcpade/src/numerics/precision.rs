use super::NumericsError;
use rug::float::Constant;
use rug::{Complex, Float};

/// Mantissa length used when nothing else is requested.
pub const DEFAULT_BITS: u32 = 192;
/// Smallest mantissa length accepted by [`PrecisionContext::new`].
pub const MIN_BITS: u32 = 64;
/// Environment variable that overrides the default precision.
pub const BITS_ENV: &str = "ARC_PADE_BITS";

/// Working precision plus the derived unit roundoff and residual tolerance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrecisionContext {
    bits: u32,
    eps: f64,
    default_tol: f64,
}

impl PrecisionContext {
    /// Context with `bits` of mantissa and a default tolerance of `2^10 eps`.
    pub fn new(bits: u32) -> Result<Self, NumericsError> {
        if bits < MIN_BITS {
            return Err(NumericsError::PrecisionTooLow { bits, min: MIN_BITS });
        }
        let eps = 2f64.powi(1 - bits as i32);
        Ok(Self {
            bits,
            eps,
            default_tol: 1024.0 * eps,
        })
    }

    /// Default context, honouring `ARC_PADE_BITS` when it parses.
    pub fn from_env() -> Result<Self, NumericsError> {
        let bits = std::env::var(BITS_ENV)
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .unwrap_or(DEFAULT_BITS);
        Self::new(bits)
    }

    /// Replaces the default tolerance; it may not drop below `16 eps`.
    pub fn with_default_tol(mut self, tol: f64) -> Result<Self, NumericsError> {
        let floor = 16.0 * self.eps;
        // written negated so that NaN fails too
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(tol >= floor) {
            return Err(NumericsError::ToleranceTooSmall { tol, floor });
        }
        self.default_tol = tol;
        Ok(self)
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Unit roundoff `2^(1-bits)`.
    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn default_tol(&self) -> f64 {
        self.default_tol
    }

    /// Number of significant decimal digits worth printing.
    pub fn decimal_digits(&self) -> usize {
        (self.bits as f64 * std::f64::consts::LOG10_2).ceil() as usize + 2
    }

    pub fn real(&self, x: f64) -> Float {
        Float::with_val(self.bits, x)
    }

    pub fn complex(&self, re: f64, im: f64) -> Complex {
        Complex::with_val(self.bits, (re, im))
    }

    pub fn zero(&self) -> Complex {
        Complex::new(self.bits)
    }

    pub fn one(&self) -> Complex {
        Complex::with_val(self.bits, 1)
    }

    /// The imaginary unit.
    pub fn i(&self) -> Complex {
        Complex::with_val(self.bits, (0, 1))
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.bits, Constant::Pi)
    }

    /// Parses a decimal (`"-0.75"`, `"1e-3"`) or a fraction (`"-4/3"`).
    pub fn parse_real(&self, s: &str) -> Result<Float, NumericsError> {
        let s = s.trim();
        let bad = || NumericsError::Parse(s.to_string());
        if let Some((num, den)) = s.split_once('/') {
            let num = Float::parse(num.trim()).map_err(|_| bad())?;
            let den = Float::parse(den.trim()).map_err(|_| bad())?;
            let den = Float::with_val(self.bits, den);
            if den.is_zero() {
                return Err(bad());
            }
            return Ok(Float::with_val(self.bits, num) / den);
        }
        Float::parse(s)
            .map(|v| Float::with_val(self.bits, v))
            .map_err(|_| bad())
    }

    pub fn parse_complex(&self, re: &str, im: &str) -> Result<Complex, NumericsError> {
        Ok(Complex::with_val(
            self.bits,
            (self.parse_real(re)?, self.parse_real(im)?),
        ))
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self::new(DEFAULT_BITS).expect("default precision is valid")
    }
}
