//! Contour quadrature on `Gamma`, the Cauchy operator, geometric means and
//! Szegő functions.
//!
//! Densities on the arc `F` are pulled back to `Gamma` through the Joukowski
//! map, where `∫_F g dt / w^+ = -(1/2) ∮_Gamma g(J(tau)) d tau / tau`. The
//! Szegő function of `h` is `exp{C phi(1/phi(z)) - C phi(0)}` with
//! `phi = log h ∘ J`, and its boundary values come from singularity-subtracted
//! limits of the Cauchy integral.

mod density;
mod grid;
mod hbar;
mod jumps;
mod operator;
mod szego;

pub use density::{real_axis_crossings, ArcPoint, Constant, Density, ExpDensity, FnDensity, PolyDensity, Product, SideConj};
pub use grid::{pullback_integral, stabilize, GridNode, QuadOptions, QuadratureGrid, Stabilized};
pub use hbar::{locate, HbarSpec, HbarZero};
pub use jumps::{q_norm_estimate, scattering_jump, upsilon_margin, JumpReport, UpsilonEntry, UpsilonReport, Verdict};
pub use operator::{cauchy_transform_on_gamma, geometric_mean, LogTable, UNWRAP_THRESHOLD};
pub use szego::{
    compare_at, szego_function, szego_of_hbar, szego_of_scheme_polynomial, SchemeSzego, SzegoData, SzegoEvaluator,
    SzegoFunction, SzegoHeader, SzegoSample,
};

use crate::geometry::GeometryError;
use crate::numerics::NumericsError;
use num_complex::Complex64;

#[derive(Debug, thiserror::Error)]
pub enum CauchyError {
    #[error("quadrature did not stabilize at {nodes} nodes (change {change:e}, tolerance {tol:e}); the integrand may have a singularity close to the arc")]
    NotStabilized { nodes: usize, change: f64, tol: f64 },
    #[error("point {z} is {distance:e} from Gamma, closer than twice the local node spacing {spacing:e}")]
    TooCloseToCurve { z: Complex64, distance: f64, spacing: f64 },
    #[error("density vanishes at t = {t}")]
    ZeroDensity { t: Complex64 },
    #[error("phase of the density jumps by {step} near t = {t}; refine the grid")]
    UnwrapJump { t: Complex64, step: f64 },
    #[error("log of the density winds {winding} times around Gamma; no Szegő function of this form")]
    NonzeroIndex { winding: i64 },
    #[error("Gamma is not star-shaped about 0; the closed-form Szegő function of the vanishing factor does not apply")]
    NotStarShaped,
    #[error("the arc meets the ray (1, +inf), where the argument of the vanishing factor is normalized")]
    ArcMeetsRay,
    #[error("point {x} is not on the arc (distance {distance:e})")]
    PointNotOnArc { x: Complex64, distance: f64 },
    #[error("exponent {0} outside (0, 1]")]
    InvalidExponent(f64),
    #[error("repeated zero {0}")]
    DuplicateZero(Complex64),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}
