use super::{joukowski, GeometryError};
use crate::numerics::to_c64;
use num_complex::Complex64;
use rug::{Complex, Float};

/// One factor `((tau - eps)/(1 - eps tau))^multiplicity` of the pseudo-Blaschke
/// product.
#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    pub eps: Complex,
    pub multiplicity: u32,
}

/// Generators of a symmetric curve, given by their `tau`-plane points.
///
/// The induced potential is
/// `u(tau) = sum m log|(tau - eps)/(1 - eps tau)|`, which is odd under
/// `tau -> 1/tau` and vanishes at `tau = +-1`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorSet {
    generators: Vec<Generator>,
    eps64: Vec<(Complex64, f64)>,
}

impl GeneratorSet {
    /// Generators given directly in the `tau`-plane.
    pub fn from_tau(generators: Vec<Generator>) -> Result<Self, GeometryError> {
        for g in &generators {
            let e = to_c64(&g.eps);
            if g.multiplicity == 0 || (e - 1.0).norm() < 1e-12 || (e + 1.0).norm() < 1e-12 {
                return Err(GeometryError::InvalidGenerator(e));
            }
        }
        let eps64 = generators
            .iter()
            .map(|g| (to_c64(&g.eps), g.multiplicity as f64))
            .collect();
        Ok(Self { generators, eps64 })
    }

    /// Generators given by `z`-plane points `e`; each is replaced by its
    /// Joukowski preimage of modulus below one.
    pub fn from_points(points: &[(Complex, u32)]) -> Result<Self, GeometryError> {
        let mut generators = Vec::with_capacity(points.len());
        for (e, m) in points {
            generators.push(Generator {
                eps: interior_preimage(e)?,
                multiplicity: *m,
            });
        }
        Self::from_tau(generators)
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    /// Total multiplicity `k`.
    pub fn total_multiplicity(&self) -> u32 {
        self.generators.iter().map(|g| g.multiplicity).sum()
    }

    /// The `z`-plane points `J(eps)`.
    pub fn points(&self) -> Result<Vec<Complex>, GeometryError> {
        self.generators.iter().map(|g| joukowski(&g.eps)).collect()
    }

    /// `u(tau)` in double precision.
    pub fn potential(&self, tau: Complex64) -> f64 {
        self.eps64
            .iter()
            .map(|&(e, m)| m * ((tau - e) / (1.0 - e * tau)).norm().ln())
            .sum()
    }

    /// `(log B)'(tau) = sum m (1/(tau - eps) + eps/(1 - eps tau))`; its
    /// conjugate is the gradient of `u`.
    pub fn log_derivative(&self, tau: Complex64) -> Complex64 {
        self.eps64
            .iter()
            .map(|&(e, m)| m * (1.0 / (tau - e) + e / (1.0 - e * tau)))
            .sum()
    }

    /// `B(tau)` in double precision.
    pub fn blaschke(&self, tau: Complex64) -> Complex64 {
        self.eps64
            .iter()
            .map(|&(e, m)| ((tau - e) / (1.0 - e * tau)).powf(m))
            .product()
    }

    /// Distance from `tau` to the nearest pole or zero of `B`.
    pub fn singular_distance(&self, tau: Complex64) -> f64 {
        self.eps64
            .iter()
            .flat_map(|&(e, _)| {
                let d0 = (tau - e).norm();
                let d1 = if e.norm() > 0.0 { (tau - 1.0 / e).norm() } else { f64::INFINITY };
                [d0, d1]
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// `B(tau)` and `(log B)'(tau)` at the precision of `tau`.
    pub fn blaschke_hp(&self, tau: &Complex) -> (Complex, Complex) {
        let prec = tau.prec().0;
        let mut b = Complex::with_val(prec, 1);
        let mut l = Complex::new(prec);
        for g in &self.generators {
            let num = Complex::with_val(prec, tau - &g.eps);
            let den = Complex::with_val(prec, 1) - Complex::with_val(prec, &g.eps * tau);
            let factor = Complex::with_val(prec, &num / &den);
            for _ in 0..g.multiplicity {
                b *= &factor;
            }
            let term = Complex::with_val(prec, num.recip_ref())
                + Complex::with_val(prec, &g.eps / &den);
            l += term * g.multiplicity;
        }
        (b, l)
    }

    /// `u(tau)` at the precision of `tau`.
    pub fn level_potential(&self, tau: &Complex) -> Result<Float, GeometryError> {
        let prec = tau.prec().0;
        let mut u = Float::new(prec);
        for g in &self.generators {
            let num = Complex::with_val(prec, tau - &g.eps);
            let den = Complex::with_val(prec, 1) - Complex::with_val(prec, &g.eps * tau);
            if num.is_zero() || den.is_zero() {
                return Err(GeometryError::PoleError(to_c64(tau)));
            }
            let ratio = Float::with_val(prec, num.abs_ref()) / Float::with_val(prec, den.abs_ref());
            u += ratio.ln() * g.multiplicity;
        }
        Ok(u)
    }
}

/// The Joukowski preimage of `e` inside the unit disk.
pub(crate) fn interior_preimage(e: &Complex) -> Result<Complex, GeometryError> {
    let prec = e.prec().0;
    let root = (Complex::with_val(prec, e.square_ref()) - 1u32).sqrt();
    let a = Complex::with_val(prec, e + &root);
    let b = Complex::with_val(prec, e - &root);
    let (ma, mb) = (to_c64(&a).norm(), to_c64(&b).norm());
    if (ma - 1.0).abs() < 1e-12 && (mb - 1.0).abs() < 1e-12 {
        return Err(GeometryError::AmbiguousPreimage(to_c64(e)));
    }
    // the pair multiplies to one; take the small one and avoid cancellation
    Ok(if ma < mb { a } else { b })
}
