//! Non-Hermitian orthogonal polynomials with varying weights.
//!
//! For a level `E_n` of an interpolation scheme the weight is
//! `w_n = hbar h / v_n`, and the monic `q_n` of degree `n` satisfies
//! `∫_F t^j q_n(t) w_n(t) dt / w^+(t) = 0` for `j < n`, without conjugation.
//! The system is assembled from quadrature moments and solved by LU at the
//! working precision. The function of the second kind is
//! `R_n(z) = (1/pi i) ∫ q_n w_n / (t - z) dt / w^+`.

mod asymptotics;
mod export;
mod moments;
mod solve;

pub use asymptotics::{sa1_ratio, sa2_residuals, sa2_trend, sa3_moments, Sa2Report, Sa2Sample, Sa3Report, Trend};
pub use export::{ortho_to_json, sa2_to_csv, zeros_to_csv};
pub use moments::{moments, MomentTable, WeightTable};
pub use solve::{solve_qn, OrthoDiagnostics, OrthoResult};

use crate::cauchy::{
    ArcPoint, CauchyError, Density, HbarSpec, QuadOptions, QuadratureGrid, SchemeSzego, SzegoEvaluator, SzegoFunction,
};
use crate::geometry::{GammaCurve, GeometryError};
use crate::numerics::NumericsError;
use crate::schemes::{InterpolationScheme, SchemeError, SchemeLevel};
use rug::{Complex, Float};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, OnceLock};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OrthoError {
    #[error("orthogonality system for n = {n} is singular: {source}")]
    SingularMatrix { n: usize, source: NumericsError },
    #[error("orthogonality residual for n = {n} is unreliable (error estimate {estimate:e}); retry with at least {suggested_bits} bits")]
    ResidualTooLarge {
        n: usize,
        estimate: f64,
        suggested_bits: u32,
    },
    #[error(transparent)]
    Cauchy(#[from] CauchyError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Basis in which the moment system is assembled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentBasis {
    #[default]
    Monomial,
    /// Chebyshev polynomials of the segment, `T_k(t)`.
    Chebyshev,
}

/// Solver controls.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthoOptions {
    /// Grid sizes, and the accepted change of the moments (relative to the
    /// largest) when the grid is doubled.
    pub quad: QuadOptions,
    pub basis: MomentBasis,
    /// Check the orthogonality residuals against the condition-based tolerance.
    pub check_residual: bool,
}

impl Default for OrthoOptions {
    fn default() -> Self {
        Self {
            quad: QuadOptions::default(),
            basis: MomentBasis::Monomial,
            check_residual: true,
        }
    }
}

type GridCache = Arc<Mutex<BTreeMap<(usize, u32), Arc<QuadratureGrid>>>>;

/// The family of weights `w_n = hbar h / v_n` along an interpolation scheme.
#[derive(Clone, Debug)]
pub struct WeightSpec {
    curve: Arc<GammaCurve>,
    h: Arc<dyn Density>,
    hbar: Option<Arc<HbarSpec>>,
    scheme: Arc<InterpolationScheme>,
    szego_h: Arc<OnceLock<Arc<SzegoFunction>>>,
    /// Grids by `(nodes, prec)`; they depend on the curve and breakpoints only.
    grids: GridCache,
}

impl WeightSpec {
    pub fn new(h: Arc<dyn Density>, hbar: Option<Arc<HbarSpec>>, scheme: Arc<InterpolationScheme>) -> Self {
        Self {
            curve: Arc::clone(scheme.curve()),
            h,
            hbar,
            scheme,
            szego_h: Arc::new(OnceLock::new()),
            grids: Arc::new(Mutex::new(BTreeMap::new())),
        }
    }

    /// The same density along another scheme on the same curve, sharing the
    /// cached grids and `S_h`.
    pub fn with_scheme(&self, scheme: Arc<InterpolationScheme>) -> Self {
        debug_assert!(Arc::ptr_eq(&self.curve, scheme.curve()));
        Self {
            scheme,
            ..self.clone()
        }
    }

    pub fn curve(&self) -> &Arc<GammaCurve> {
        &self.curve
    }

    pub fn h(&self) -> &Arc<dyn Density> {
        &self.h
    }

    pub fn hbar(&self) -> Option<&Arc<HbarSpec>> {
        self.hbar.as_ref()
    }

    pub fn scheme(&self) -> &Arc<InterpolationScheme> {
        &self.scheme
    }

    /// `w_n` bound to its level.
    pub fn weight(&self, n: usize) -> Result<LevelWeight, OrthoError> {
        Ok(LevelWeight {
            spec: self.clone(),
            level: self.scheme.level(n)?,
        })
    }

    /// Breakpoints of `h` and `hbar` as curve parameters.
    pub fn breakpoints(&self, prec: u32) -> Result<Vec<Float>, CauchyError> {
        let mut out = self.h.breakpoints(&self.curve, prec)?;
        if let Some(hb) = &self.hbar {
            out.extend(hb.breakpoints(&self.curve, prec)?);
        }
        Ok(out)
    }

    /// The graded grid with `n` nodes for this family of weights.
    pub fn grid(&self, n: usize, prec: u32) -> Result<Arc<QuadratureGrid>, CauchyError> {
        if let Some(g) = self.grids.lock().expect("grid cache poisoned").get(&(n, prec)) {
            return Ok(Arc::clone(g));
        }
        let grid = Arc::new(QuadratureGrid::graded(&self.curve, n, &self.breakpoints(prec)?, prec)?);
        self.grids
            .lock()
            .expect("grid cache poisoned")
            .insert((n, prec), Arc::clone(&grid));
        Ok(grid)
    }

    /// `S_h`, computed by quadrature on first use and shared by all levels.
    pub fn szego_h(&self, opts: &QuadOptions, prec: u32) -> Result<Arc<SzegoFunction>, CauchyError> {
        if let Some(s) = self.szego_h.get() {
            return Ok(Arc::clone(s));
        }
        let s = Arc::new(SzegoFunction::new(&self.curve, Arc::clone(&self.h), opts, prec)?);
        Ok(Arc::clone(self.szego_h.get_or_init(|| s)))
    }
}

/// The weight `w_n` of one level.
#[derive(Clone, Debug)]
pub struct LevelWeight {
    spec: WeightSpec,
    level: Arc<SchemeLevel>,
}

impl LevelWeight {
    pub fn n(&self) -> usize {
        self.level.n()
    }

    pub fn level(&self) -> &Arc<SchemeLevel> {
        &self.level
    }

    pub fn spec(&self) -> &WeightSpec {
        &self.spec
    }

    /// `w_n` at a point of `F`, rounded to `prec` bits.
    pub fn eval(&self, p: &ArcPoint, prec: u32) -> Complex {
        let mut w = Complex::with_val(prec, self.spec.h.eval(p));
        if let Some(hb) = &self.spec.hbar {
            w *= hb.eval(p);
        }
        // v_n as a product keeps its zeros' cancellation local
        let mut v = Complex::with_val(prec, 1);
        for e in self.level.finite_points() {
            v *= Complex::with_val(prec, &p.t - e);
        }
        w / v
    }

    /// `S_{w_n} = S_h S_hbar / S_{v_n}`.
    pub fn szego(&self, opts: &QuadOptions, prec: u32) -> Result<SzegoEvaluator, CauchyError> {
        let mut factors = vec![SzegoEvaluator::Quadrature(self.spec.szego_h(opts, prec)?)];
        if let Some(hb) = &self.spec.hbar {
            hb.check_closed_form()?;
            factors.push(SzegoEvaluator::Hbar(Arc::clone(hb)));
        }
        Ok(SzegoEvaluator::Product {
            factors,
            divisors: vec![SzegoEvaluator::SchemePolynomial(SchemeSzego::new(self.level.points()))],
        })
    }
}

#[cfg(test)]
mod tests;
