use super::{joukowski, w_of_tau, GammaCurve, GeometryError};
use crate::numerics::{abs_f64, to_c64};
use num_complex::Complex64;
use rug::{Complex, Float};

/// A point of the arc with its boundary frame.
///
/// `tau_plus` is the limit of `phi` from the left of `F` (oriented from `-1`
/// to `1`) and lies on the half of `Gamma` with `theta in (0, pi)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ArcSample {
    /// Parameter of `tau_plus` on `Gamma`.
    pub theta: Float,
    pub t: Complex,
    pub tau_plus: Complex,
    pub tau_minus: Complex,
    pub w_plus: Complex,
    pub w_minus: Complex,
    /// `d tau / d theta` at `tau_plus`.
    pub dtau: Complex,
}

impl ArcSample {
    /// Frame at the curve parameter `theta in (0, pi)`.
    pub fn at(curve: &GammaCurve, theta: &Float) -> Result<Self, GeometryError> {
        let pt = curve.point(theta)?;
        let tau_minus = Complex::with_val(pt.tau.prec(), pt.tau.recip_ref());
        Ok(Self {
            theta: theta.clone(),
            t: joukowski(&pt.tau)?,
            w_plus: w_of_tau(&pt.tau),
            w_minus: w_of_tau(&tau_minus),
            tau_plus: pt.tau,
            tau_minus,
            dtau: pt.dtau,
        })
    }
}

/// Samples of `F` ordered from `-1` to `1` (endpoints excluded).
#[derive(Clone, Debug)]
pub struct ArcF {
    samples: Vec<ArcSample>,
}

impl ArcF {
    /// `m` samples at the midpoints `theta_j = pi (j + 1/2)/m` of `Gamma^+`.
    pub fn new(curve: &GammaCurve, m: usize, prec: u32) -> Result<Self, GeometryError> {
        let pi = Float::with_val(prec, rug::float::Constant::Pi);
        let mut samples = (0..m)
            .map(|j| {
                let theta = Float::with_val(prec, &pi * (2 * j + 1) as u32) / (2 * m) as u32;
                ArcSample::at(curve, &theta)
            })
            .collect::<Result<Vec<_>, _>>()?;
        samples.reverse();
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[ArcSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn endpoints(&self) -> (f64, f64) {
        (-1.0, 1.0)
    }

    /// Largest of `|tau^+ tau^- - 1|` and `|w^+ + w^-|` over the samples.
    pub fn frame_residual(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| {
                let p = Complex::with_val(s.t.prec(), &s.tau_plus * &s.tau_minus) - 1u32;
                let w = Complex::with_val(s.t.prec(), &s.w_plus + &s.w_minus);
                abs_f64(&p).max(abs_f64(&w))
            })
            .fold(0.0, f64::max)
    }
}

/// A point of an interpolation scheme: finite or infinite.
#[derive(Clone, Debug, PartialEq)]
pub enum SchemePoint {
    Finite {
        z: Complex,
        /// `phi(z)`, outside `Gamma`.
        phi: Complex,
    },
    Infinity,
}

impl SchemePoint {
    /// Finite point with its exterior preimage computed against `curve`.
    pub fn finite(z: Complex, curve: &GammaCurve) -> Result<Self, GeometryError> {
        let phi = phi_of(&z, curve)?;
        Ok(SchemePoint::Finite { z, phi })
    }

    pub fn z(&self) -> Option<&Complex> {
        match self {
            SchemePoint::Finite { z, .. } => Some(z),
            SchemePoint::Infinity => None,
        }
    }

    pub fn phi(&self) -> Option<&Complex> {
        match self {
            SchemePoint::Finite { phi, .. } => Some(phi),
            SchemePoint::Infinity => None,
        }
    }
}

/// The preimage `phi(z)` of `z` under `J` lying outside `Gamma`.
pub fn phi_of(z: &Complex, curve: &GammaCurve) -> Result<Complex, GeometryError> {
    let prec = z.prec().0;
    let root = (Complex::with_val(prec, z.square_ref()) - 1u32).sqrt();
    let plus = Complex::with_val(prec, z + &root);
    let minus = Complex::with_val(prec, z - &root);
    // the larger candidate is computed without cancellation; the other is its inverse
    let a = if abs_f64(&plus) >= abs_f64(&minus) { plus } else { minus };
    let b = Complex::with_val(prec, a.recip_ref());
    let (a64, b64) = (to_c64(&a), to_c64(&b));
    let (da, db) = (curve.distance(a64), curve.distance(b64));
    let tol = 1e-12 * (1.0 + a64.norm());
    if da < tol && db < tol {
        return Err(GeometryError::OnArc {
            z: to_c64(z),
            dist: da.max(db),
        });
    }
    if curve.winding_number(a64) == 0 {
        Ok(a)
    } else {
        Ok(b)
    }
}

/// `r(e; z)` given `phi(e)` (or `None` for `e = infinity`) and `tau = phi(z)`.
pub fn r_factor(phi_e: Option<&Complex>, tau: &Complex) -> Complex {
    let prec = tau.prec().0;
    match phi_e {
        None => Complex::with_val(prec, tau.recip_ref()),
        Some(a) => {
            let num = Complex::with_val(prec, tau - a);
            let den = Complex::with_val(prec, 1) - Complex::with_val(prec, a * tau);
            num / den
        }
    }
}

/// `r(e; z) = (phi(z) - phi(e))/(1 - phi(e) phi(z))`, or `1/phi(z)` at infinity.
pub fn r_eval(e: &SchemePoint, z: &Complex, curve: &GammaCurve) -> Result<Complex, GeometryError> {
    let tau = phi_of(z, curve)?;
    Ok(r_factor(e.phi(), &tau))
}

/// The point `e*` paired with `e` by the symmetry of `F_alpha`.
pub fn mobius_partner(e: &Complex, alpha: &Float) -> Result<Complex, GeometryError> {
    let prec = e.prec().0;
    let one_minus = Float::with_val(prec, 1) - Float::with_val(prec, alpha.square_ref());
    let ebar = Complex::with_val(prec, e.conj_ref());
    let two_i_alpha = Complex::with_val(prec, (0, Float::with_val(prec, alpha * 2u32)));
    let den = Complex::with_val(prec, &two_i_alpha * &ebar) + &one_minus;
    if abs_f64(&den) == 0.0 {
        return Err(GeometryError::DegenerateDenominator);
    }
    let num = Complex::with_val(prec, &ebar * &one_minus) + two_i_alpha;
    Ok(num / den)
}

/// Exterior preimage in double precision; used for plotting and probes.
pub fn phi_of_c64(z: Complex64, curve: &GammaCurve) -> Complex64 {
    let root = (z * z - 1.0).sqrt();
    let a = if (z + root).norm() >= (z - root).norm() { z + root } else { z - root };
    if curve.winding_number(a) == 0 {
        a
    } else {
        1.0 / a
    }
}
