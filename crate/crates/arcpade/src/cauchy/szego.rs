use super::density::{ArcPoint, Density};
use super::grid::{QuadOptions, QuadratureGrid};
use super::hbar::HbarSpec;
use super::operator::{log_grid, LogTable};
use super::CauchyError;
use crate::geometry::{phi_of, ArcF, ArcSample, GammaCurve, SchemePoint};
use crate::numerics::{abs_f64, float_to_decimal, to_c64};
use rug::float::Constant;
use rug::{Complex, Float};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Szegő function of a density computed by quadrature on `Gamma`:
/// `S_h(z) = exp{C phi(1/phi(z)) - C phi(0)}` with `phi = log h ∘ J`.
#[derive(Debug)]
pub struct SzegoFunction {
    curve: Arc<GammaCurve>,
    density: Arc<dyn Density>,
    grid: QuadratureGrid,
    logs: LogTable,
    c0: Complex,
    change: f64,
}

impl SzegoFunction {
    pub fn new(curve: &Arc<GammaCurve>, density: Arc<dyn Density>, opts: &QuadOptions, prec: u32) -> Result<Self, CauchyError> {
        let (grid, logs, c0) = log_grid(curve, density.as_ref(), opts, prec)?;
        Ok(Self {
            curve: Arc::clone(curve),
            density,
            grid,
            logs,
            c0: c0.value,
            change: c0.change,
        })
    }

    pub fn curve(&self) -> &Arc<GammaCurve> {
        &self.curve
    }

    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    pub fn density(&self) -> &Arc<dyn Density> {
        &self.density
    }

    /// Relative change of `log G_h` in the last grid doubling.
    pub fn stabilization_change(&self) -> f64 {
        self.change
    }

    pub fn gm(&self) -> Complex {
        self.c0.clone().exp()
    }

    /// `S_h` at the exterior point `tau = phi(z)`.
    pub fn eval_tau(&self, tau: &Complex) -> Result<Complex, CauchyError> {
        let inner = Complex::with_val(self.grid.prec(), tau.recip_ref());
        let c = self.grid.cauchy(self.logs.values(), &inner)?;
        Ok((c - &self.c0).exp())
    }

    /// Interior limit of `C phi` at the point of `Gamma` with parameter `theta in [0, 2 pi)`.
    fn interior(&self, theta: &Float, tau: &Complex) -> Result<Complex, CauchyError> {
        if let Some(j) = self.grid.find_node(theta) {
            return Ok(self.grid.boundary_at_node(self.logs.values(), j).0);
        }
        let th = theta.to_f64();
        let p = ArcPoint::from_tau(tau, th);
        let phi = self.logs.log_at(self.density.as_ref(), &p, th)?;
        Ok(self.grid.boundary_at(self.logs.values(), tau, &phi).0)
    }

    /// `(S_h^+, S_h^-)` at a sample of `F`.
    pub fn boundary(&self, sample: &ArcSample) -> Result<(Complex, Complex), CauchyError> {
        let prec = self.grid.prec();
        let two_pi = Float::with_val(prec, Constant::Pi) * 2u32;
        let mirror = Float::with_val(prec, &two_pi - &sample.theta);
        let mirror = if mirror >= two_pi { Float::new(prec) } else { mirror };
        let at_plus = self.interior(&sample.theta, &sample.tau_plus)?;
        let at_minus = self.interior(&mirror, &sample.tau_minus)?;
        let s_plus = (at_minus - &self.c0).exp();
        let s_minus = (at_plus - &self.c0).exp();
        Ok((s_plus, s_minus))
    }
}

/// Closed-form Szegő function of a monic polynomial with zeros at the finite
/// points of a scheme: `S_{t-e}(z) = 1 - 1/(phi(e) phi(z))`, `G_{t-e} = -phi(e)/2`.
#[derive(Clone, Debug)]
pub struct SchemeSzego {
    phis: Vec<Complex>,
}

impl SchemeSzego {
    pub fn new(points: &[SchemePoint]) -> Self {
        Self {
            phis: points.iter().filter_map(|p| p.phi().cloned()).collect(),
        }
    }

    pub fn gm(&self, prec: u32) -> Complex {
        let mut g = Complex::with_val(prec, 1);
        for a in &self.phis {
            g *= Complex::with_val(prec, a / -2i32);
        }
        g
    }

    pub fn eval_tau(&self, tau: &Complex) -> Complex {
        let prec = tau.prec().0;
        let mut s = Complex::with_val(prec, 1);
        for a in &self.phis {
            let at = Complex::with_val(prec, a * tau);
            s *= Complex::with_val(prec, 1) - at.recip();
        }
        s
    }
}

/// A Szegő function assembled from closed forms and quadrature.
#[derive(Clone, Debug)]
pub enum SzegoEvaluator {
    Quadrature(Arc<SzegoFunction>),
    Hbar(Arc<HbarSpec>),
    SchemePolynomial(SchemeSzego),
    /// `∏ factors / ∏ divisors`.
    Product {
        factors: Vec<SzegoEvaluator>,
        divisors: Vec<SzegoEvaluator>,
    },
}

impl SzegoEvaluator {
    pub fn gm(&self, prec: u32) -> Complex {
        match self {
            Self::Quadrature(s) => s.gm(),
            Self::Hbar(_) => Complex::with_val(prec, 1),
            Self::SchemePolynomial(s) => s.gm(prec),
            Self::Product { factors, divisors } => {
                let mut g = Complex::with_val(prec, 1);
                for f in factors {
                    g *= f.gm(prec);
                }
                for d in divisors {
                    g /= d.gm(prec);
                }
                g
            }
        }
    }

    /// `S` at the exterior point `tau = phi(z)`.
    pub fn eval_tau(&self, tau: &Complex) -> Result<Complex, CauchyError> {
        Ok(match self {
            Self::Quadrature(s) => s.eval_tau(tau)?,
            Self::Hbar(h) => h.szego_tau(tau),
            Self::SchemePolynomial(s) => s.eval_tau(tau),
            Self::Product { factors, divisors } => {
                let mut v = Complex::with_val(tau.prec(), 1);
                for f in factors {
                    v *= f.eval_tau(tau)?;
                }
                for d in divisors {
                    v /= d.eval_tau(tau)?;
                }
                v
            }
        })
    }

    /// `(S^+, S^-)` at a sample of `F`.
    pub fn boundary(&self, sample: &ArcSample) -> Result<(Complex, Complex), CauchyError> {
        Ok(match self {
            Self::Quadrature(s) => s.boundary(sample)?,
            Self::Hbar(h) => h.szego_boundary(&sample.tau_plus),
            Self::SchemePolynomial(s) => (s.eval_tau(&sample.tau_plus), s.eval_tau(&sample.tau_minus)),
            Self::Product { factors, divisors } => {
                let prec = sample.t.prec().0;
                let (mut p, mut m) = (Complex::with_val(prec, 1), Complex::with_val(prec, 1));
                for f in factors {
                    let (a, b) = f.boundary(sample)?;
                    p *= a;
                    m *= b;
                }
                for d in divisors {
                    let (a, b) = d.boundary(sample)?;
                    p /= a;
                    m /= b;
                }
                (p, m)
            }
        })
    }
}

/// Boundary values of a Szegő function on `F` at `ArcF` samples.
#[derive(Clone, Debug)]
pub struct SzegoSample {
    pub t: Complex,
    pub s_plus: Complex,
    pub s_minus: Complex,
    /// The density at `t`, when known.
    pub h: Option<Complex>,
}

/// Geometric mean, boundary values and an evaluator of `S_h`.
#[derive(Clone, Debug)]
pub struct SzegoData {
    curve: Arc<GammaCurve>,
    pub gm: Complex,
    pub samples: Vec<SzegoSample>,
    pub evaluator: SzegoEvaluator,
    pub grid_nodes: Option<usize>,
    pub stabilization_change: Option<f64>,
}

impl SzegoData {
    pub fn from_evaluator(
        curve: &Arc<GammaCurve>,
        evaluator: SzegoEvaluator,
        density: Option<&dyn Density>,
        sample_count: usize,
        prec: u32,
    ) -> Result<Self, CauchyError> {
        let arc = ArcF::new(curve, sample_count, prec)?;
        let samples = arc
            .samples()
            .iter()
            .map(|s| {
                let (s_plus, s_minus) = evaluator.boundary(s)?;
                let h = density.map(|d| d.eval(&ArcPoint::from_tau(&s.tau_plus, s.theta.to_f64())));
                Ok(SzegoSample {
                    t: s.t.clone(),
                    s_plus,
                    s_minus,
                    h,
                })
            })
            .collect::<Result<Vec<_>, CauchyError>>()?;
        let (grid_nodes, stabilization_change) = match &evaluator {
            SzegoEvaluator::Quadrature(q) => (Some(q.grid().len()), Some(q.stabilization_change())),
            _ => (None, None),
        };
        Ok(Self {
            curve: Arc::clone(curve),
            gm: evaluator.gm(prec),
            samples,
            evaluator,
            grid_nodes,
            stabilization_change,
        })
    }

    pub fn curve(&self) -> &Arc<GammaCurve> {
        &self.curve
    }

    /// `S_h(z)` for `z` off `F`; `None` means the point at infinity.
    pub fn eval(&self, z: Option<&Complex>) -> Result<Complex, CauchyError> {
        match z {
            None => Ok(Complex::with_val(self.gm.prec(), 1)),
            Some(z) => {
                let tau = phi_of(z, &self.curve)?;
                self.evaluator.eval_tau(&tau)
            }
        }
    }

    /// `max |G_h S^+ S^- - h|` over samples with a known density value.
    pub fn decomposition_residual(&self) -> Option<f64> {
        let mut worst: Option<f64> = None;
        for s in &self.samples {
            let h = s.h.as_ref()?;
            let prod = Complex::with_val(self.gm.prec(), &self.gm * &s.s_plus) * &s.s_minus;
            let r = abs_f64(&(prod - h));
            worst = Some(worst.map_or(r, |w| w.max(r)));
        }
        worst
    }

    /// `max |S^+(±1) - S^-(±1)|`.
    pub fn endpoint_mismatch(&self) -> Result<f64, CauchyError> {
        let prec = self.gm.prec().0;
        let mut worst: f64 = 0.0;
        for theta in [Float::new(prec), Float::with_val(prec, Constant::Pi)] {
            let sample = ArcSample::at(&self.curve, &theta)?;
            let (p, m) = self.evaluator.boundary(&sample)?;
            worst = worst.max(abs_f64(&(p - m)));
        }
        Ok(worst)
    }

    /// CSV with a JSON header line: `re_t,im_t,re_s_plus,im_s_plus,re_s_minus,im_s_minus`.
    pub fn to_csv(&self, digits: usize) -> String {
        let header = SzegoHeader {
            gm: [float_to_decimal(self.gm.real(), digits), float_to_decimal(self.gm.imag(), digits)],
            samples: self.samples.len(),
            grid_nodes: self.grid_nodes,
            stabilization_change: self.stabilization_change,
            decomposition_residual: self.decomposition_residual(),
        };
        let mut out = format!("# {}\n", serde_json::to_string(&header).expect("header serializes"));
        out.push_str("re_t,im_t,re_s_plus,im_s_plus,re_s_minus,im_s_minus\n");
        for s in &self.samples {
            let cols = [&s.t, &s.s_plus, &s.s_minus]
                .iter()
                .flat_map(|z| [float_to_decimal(z.real(), digits), float_to_decimal(z.imag(), digits)])
                .collect::<Vec<_>>();
            out.push_str(&cols.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SzegoHeader {
    pub gm: [String; 2],
    pub samples: usize,
    pub grid_nodes: Option<usize>,
    pub stabilization_change: Option<f64>,
    pub decomposition_residual: Option<f64>,
}

/// Szegő data of `h` by quadrature, with boundary values at `samples` points of `F`.
pub fn szego_function(
    curve: &Arc<GammaCurve>,
    density: Arc<dyn Density>,
    opts: &QuadOptions,
    samples: usize,
    prec: u32,
) -> Result<SzegoData, CauchyError> {
    let f = SzegoFunction::new(curve, Arc::clone(&density), opts, prec)?;
    SzegoData::from_evaluator(curve, SzegoEvaluator::Quadrature(Arc::new(f)), Some(density.as_ref()), samples, prec)
}

/// Closed-form Szegő data of `v_n`, the monic polynomial vanishing at the
/// finite points of the scheme.
pub fn szego_of_scheme_polynomial(
    curve: &Arc<GammaCurve>,
    points: &[SchemePoint],
    samples: usize,
    prec: u32,
) -> Result<SzegoData, CauchyError> {
    let zeros: Vec<Complex> = points.iter().filter_map(|p| p.z().cloned()).collect();
    let v = crate::numerics::Polynomial::from_roots(&zeros, prec);
    let density = super::density::PolyDensity(v);
    let eval = SzegoEvaluator::SchemePolynomial(SchemeSzego::new(points));
    SzegoData::from_evaluator(curve, eval, Some(&density), samples, prec)
}

/// Closed-form Szegő data of a vanishing-density factor.
pub fn szego_of_hbar(curve: &Arc<GammaCurve>, spec: &HbarSpec, samples: usize, prec: u32) -> Result<SzegoData, CauchyError> {
    spec.check_closed_form()?;
    let eval = SzegoEvaluator::Hbar(Arc::new(spec.clone()));
    SzegoData::from_evaluator(curve, eval, Some(spec), samples, prec)
}

/// `|a - b|` for two evaluators at a point `z` of `D`.
pub fn compare_at(a: &SzegoData, b: &SzegoData, z: &Complex) -> Result<f64, CauchyError> {
    let x = a.eval(Some(z))?;
    let y = b.eval(Some(z))?;
    Ok(abs_f64(&(x - y)))
}

impl std::fmt::Display for SzegoData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "G = {}, {} samples", to_c64(&self.gm), self.samples.len())
    }
}
