//! Multipoint Padé approximants and non-Hermitian orthogonal polynomials on
//! analytic arcs that are symmetric with respect to an interpolation scheme.
//!
//! The crate is organised bottom-up: [`numerics`] supplies multiprecision
//! polynomials and linear algebra, [`geometry`] builds the curve `Gamma` in
//! the Joukowski plane, [`cauchy`] integrates on it, [`schemes`] produces the
//! interpolation points, and [`orthopoly`] and [`pade`] solve for `q_n`,
//! `R_n` and the approximants.

pub mod cauchy;
pub mod geometry;
pub mod numerics;
pub mod orthopoly;
pub mod pade;
pub mod schemes;

/// Any failure of the library, for callers that do not care which stage raised it.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Numerics(#[from] numerics::NumericsError),
    #[error(transparent)]
    Geometry(#[from] geometry::GeometryError),
    #[error(transparent)]
    Cauchy(#[from] cauchy::CauchyError),
    #[error(transparent)]
    Scheme(#[from] schemes::SchemeError),
    #[error(transparent)]
    Ortho(#[from] orthopoly::OrthoError),
    #[error(transparent)]
    Pade(#[from] pade::PadeError),
}
