//! Interpolation schemes `E = {E_n}` and the functions `r_n` and `v_n`.
//!
//! A level `E_n` holds `2n` points of `D` or infinity, each stored together
//! with its exterior preimage `phi(e)`. Two builders are provided: repetition
//! of a fixed list of points (the generators of a traced curve, or any pair
//! such as `0, -4i/3` for the circular arcs), and the equal-flux construction
//! on a level curve inside `Gamma`.

mod build;
mod diagnostics;
mod export;

pub use build::{equal_flux_level, generator_repetition_level, repetition_level, EqualFluxInfo};
pub use diagnostics::{decay_rate, symmetry_diagnostic, ProbeValue, SymmetryReport};
pub use export::{level_to_json, levels_to_json};

use crate::geometry::{phi_of, r_factor, ArcSample, GammaCurve, GeometryError, SchemePoint};
use crate::numerics::{to_c64, Polynomial};
use num_complex::Complex64;
use rug::{Complex, Float};
use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};
use thiserror::Error;

/// Default radius of the level curve used by equal-flux schemes.
pub const DEFAULT_RHO: f64 = 0.5;

/// Failures raised while building schemes.
#[derive(Debug, Error)]
pub enum SchemeError {
    #[error("2n = {slots} is not a multiple of the total multiplicity {k} and padding is off")]
    IndivisibleWithoutPadding { slots: usize, k: u32 },
    #[error("level curve could not be traced: {0}")]
    LevelCurveTraceFailed(String),
    #[error("flux density changes sign near tau = {at}")]
    NonmonotoneFlux { at: Complex64 },
    #[error("scheme point {z} lies {distance:e} from the arc (clearance {clearance:e})")]
    PointTooClose { z: Complex64, distance: f64, clearance: f64 },
    #[error("level radius {0} must lie in (0, 1)")]
    InvalidRho(f64),
    #[error("repetition scheme needs at least one point")]
    EmptyBase,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// One level `E_n` with its monic polynomial `v_n`.
#[derive(Clone, Debug)]
pub struct SchemeLevel {
    n: usize,
    points: Vec<SchemePoint>,
    v: Polynomial,
    flux: Option<EqualFluxInfo>,
}

impl SchemeLevel {
    /// Level from explicit points; `v_n` is expanded from the finite ones.
    pub fn new(n: usize, points: Vec<SchemePoint>, prec: u32) -> Self {
        assert_eq!(points.len(), 2 * n, "a level of index n holds 2n points");
        let roots: Vec<Complex> = points.iter().filter_map(|p| p.z().cloned()).collect();
        Self {
            n,
            v: Polynomial::from_roots(&roots, prec),
            points,
            flux: None,
        }
    }

    pub(crate) fn with_flux(mut self, info: EqualFluxInfo) -> Self {
        self.flux = Some(info);
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> &[SchemePoint] {
        &self.points
    }

    pub fn finite_points(&self) -> impl Iterator<Item = &Complex> {
        self.points.iter().filter_map(|p| p.z())
    }

    /// Monic `v_n` with zeros at the finite points.
    pub fn v(&self) -> &Polynomial {
        &self.v
    }

    /// Flux bookkeeping for equal-flux levels.
    pub fn flux(&self) -> Option<&EqualFluxInfo> {
        self.flux.as_ref()
    }

    /// `r_n` as a function of `tau = phi(z)`.
    pub fn rn_at_tau(&self, tau: &Complex) -> Complex {
        let prec = tau.prec().0;
        let mut acc = Complex::with_val(prec, 1);
        for p in &self.points {
            acc *= r_factor(p.phi(), tau);
        }
        acc
    }

    /// `(r_n^+(t), r_n^-(t))` at an arc sample.
    pub fn boundary(&self, sample: &ArcSample) -> (Complex, Complex) {
        (self.rn_at_tau(&sample.tau_plus), self.rn_at_tau(&sample.tau_minus))
    }

    /// `log|r_n|` at `tau`, summed factor by factor so it neither overflows
    /// nor underflows at large `n`.
    pub fn log_abs_at_tau(&self, tau: &Complex) -> f64 {
        let prec = tau.prec().0;
        // summed at working precision: the factors are O(1) while the total
        // can cancel to far below f64 resolution
        let mut acc = Float::new(prec);
        for p in &self.points {
            acc += Float::with_val(prec, r_factor(p.phi(), tau).abs_ref()).ln();
        }
        acc.to_f64()
    }
}

/// `r_n(z) = prod r(e; z)` for `z` in `D`.
pub fn rn_eval(level: &SchemeLevel, z: &Complex, curve: &GammaCurve) -> Result<Complex, GeometryError> {
    let tau = phi_of(z, curve)?;
    Ok(level.rn_at_tau(&tau))
}

/// How the levels of a scheme are produced.
#[derive(Clone, Debug)]
pub enum SchemeKind {
    /// Each base point repeated proportionally to its multiplicity.
    Repetition { base: Vec<(SchemePoint, u32)>, padding: bool },
    /// Equal-flux partition of the level curve `u = log rho`.
    EqualFlux { rho: f64 },
    /// All `2n` points at infinity (classical diagonal Pade).
    Classical,
}

/// A triangular scheme with a per-level cache.
#[derive(Debug)]
pub struct InterpolationScheme {
    curve: Arc<GammaCurve>,
    kind: SchemeKind,
    prec: u32,
    clearance: f64,
    cache: Mutex<BTreeMap<usize, Arc<SchemeLevel>>>,
}

impl InterpolationScheme {
    pub fn new(curve: Arc<GammaCurve>, kind: SchemeKind, prec: u32) -> Self {
        let clearance = 1e-3 * arc_diameter(&curve);
        Self {
            curve,
            kind,
            prec,
            clearance,
            cache: Mutex::new(BTreeMap::new()),
        }
    }

    /// Repetition of the generators of a traced curve.
    pub fn from_generators(curve: Arc<GammaCurve>, padding: bool, prec: u32) -> Result<Self, SchemeError> {
        let base = build::generator_base(&curve, prec)?;
        Ok(Self::new(curve, SchemeKind::Repetition { base, padding }, prec))
    }

    /// Repetition of `z`-plane points with multiplicities.
    pub fn from_points(
        curve: Arc<GammaCurve>,
        points: &[(Option<Complex>, u32)],
        padding: bool,
        prec: u32,
    ) -> Result<Self, SchemeError> {
        let base = points
            .iter()
            .map(|(z, m)| {
                let p = match z {
                    Some(z) => SchemePoint::finite(Complex::with_val(prec, z), &curve)?,
                    None => SchemePoint::Infinity,
                };
                Ok((p, *m))
            })
            .collect::<Result<Vec<_>, SchemeError>>()?;
        Ok(Self::new(curve, SchemeKind::Repetition { base, padding }, prec))
    }

    pub fn curve(&self) -> &Arc<GammaCurve> {
        &self.curve
    }

    pub fn kind(&self) -> &SchemeKind {
        &self.kind
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Minimum distance between a finite scheme point and the arc.
    pub fn clearance(&self) -> f64 {
        self.clearance
    }

    pub fn with_clearance(mut self, clearance: f64) -> Self {
        self.clearance = clearance;
        self
    }

    /// The level `E_n`, built on first use.
    pub fn level(&self, n: usize) -> Result<Arc<SchemeLevel>, SchemeError> {
        if let Some(l) = self.cache.lock().expect("scheme cache poisoned").get(&n) {
            return Ok(Arc::clone(l));
        }
        let level = match &self.kind {
            SchemeKind::Repetition { base, padding } => repetition_level(base, n, *padding, self.prec)?,
            SchemeKind::EqualFlux { rho } => equal_flux_level(&self.curve, *rho, n, self.prec)?,
            SchemeKind::Classical => SchemeLevel::new(n, vec![SchemePoint::Infinity; 2 * n], self.prec),
        };
        self.check_clearance(&level)?;
        let level = Arc::new(level);
        self.cache
            .lock()
            .expect("scheme cache poisoned")
            .insert(n, Arc::clone(&level));
        Ok(level)
    }

    fn check_clearance(&self, level: &SchemeLevel) -> Result<(), SchemeError> {
        for z in level.finite_points() {
            let z64 = to_c64(z);
            let distance = self.curve.distance_to_arc(z64);
            if distance < self.clearance {
                return Err(SchemeError::PointTooClose {
                    z: z64,
                    distance,
                    clearance: self.clearance,
                });
            }
        }
        Ok(())
    }
}

fn arc_diameter(curve: &GammaCurve) -> f64 {
    let pts = curve.arc_polyline(128);
    let mut d: f64 = 0.0;
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            d = d.max((a - b).norm());
        }
    }
    d
}

#[cfg(test)]
mod tests;
