//! Joukowski-plane geometry.
//!
//! The arc `F` joining `-1` and `1` is never handled directly. Everything is
//! expressed on the Jordan curve `Gamma = J^{-1}(F)` in the `tau`-plane, where
//! `J(tau) = (tau + 1/tau)/2`. On `Gamma` the functions `w`, `phi` and
//! `r(e; .)` are rational in `tau`, so no square-root branch ever has to be
//! tracked along a curved arc.

mod arc;
mod curve;
mod export;
mod generators;
mod params;
mod trace;

pub use arc::{mobius_partner, phi_of, phi_of_c64, r_eval, r_factor, ArcF, ArcSample, SchemePoint};
pub use curve::{gamma_from_parametrization, trace_gamma, CurvePoint, CurveReport, CurveSource, GammaCurve};
pub use export::{read_curve_csv, write_curve_csv, CurveHeader};
pub use generators::{Generator, GeneratorSet};
pub use params::{ArcParametrization, FAlpha, Identity, PolynomialArc};
pub use trace::{trace_level_set, TraceOptions};

use crate::numerics::NumericsError;
use num_complex::Complex64;
use rug::Complex;
use thiserror::Error;

/// Failures raised while building or querying curves.
#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("J(tau) is undefined at tau = 0")]
    DomainError,
    #[error("level potential has a pole at tau = {0}")]
    PoleError(Complex64),
    #[error("tracer step control failed near tau = {at} (step {step:e})")]
    TraceDiverged { at: Complex64, step: f64 },
    #[error("level set did not close after {steps} steps")]
    NotClosed { steps: usize },
    #[error("level set runs into generator {0}")]
    HitGenerator(Complex64),
    #[error("traced curve intersects itself between segments {0} and {1}")]
    SelfIntersection(usize, usize),
    #[error("generator {eps} is not enclosed by the traced curve (winding of B is {winding}, expected {expected})")]
    GeneratorOutside { eps: Complex64, winding: i64, expected: i64 },
    #[error("point {0} lies on the unit circle; give its preimage in tau coordinates")]
    AmbiguousPreimage(Complex64),
    #[error("generator at tau = {0} is not admissible (must avoid -1 and +1)")]
    InvalidGenerator(Complex64),
    #[error("Joukowski preimage selection jumped at theta = {theta}")]
    BranchJump { theta: f64 },
    #[error("Fourier tail {tail:e} stays above {tol:e} up to {max_nodes} nodes")]
    FitNotConverged { tail: f64, tol: f64, max_nodes: usize },
    #[error("curve invariant violated: {0}")]
    Invariant(String),
    #[error("point {z} is on the arc (distance {dist:e})")]
    OnArc { z: Complex64, dist: f64 },
    #[error("Mobius partner undefined: denominator vanishes")]
    DegenerateDenominator,
    #[error("level value {0} gives no crossing of the positive real axis inside Gamma")]
    LevelOutOfRange(f64),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// `J(tau) = (tau + 1/tau)/2`.
pub fn joukowski(tau: &Complex) -> Result<Complex, GeometryError> {
    if tau.is_zero() {
        return Err(GeometryError::DomainError);
    }
    let inv = Complex::with_val(tau.prec(), tau.recip_ref());
    Ok((inv + tau) / 2u32)
}

pub fn joukowski_c64(tau: Complex64) -> Complex64 {
    0.5 * (tau + 1.0 / tau)
}

/// `w = (tau - 1/tau)/2`, the value of `sqrt(z^2 - 1)` at `z = J(tau)` on the
/// sheet selected by `tau`.
pub fn w_of_tau(tau: &Complex) -> Complex {
    let inv = Complex::with_val(tau.prec(), tau.recip_ref());
    (Complex::with_val(tau.prec(), tau - inv)) / 2u32
}
