use super::{abs_f64, NumericsError, Polynomial};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Complex;

/// Controls for [`poly_roots`].
#[derive(Clone, Debug, PartialEq)]
pub struct RootOptions {
    pub max_iter: usize,
    /// Seed for the perturbation of the initial circle.
    pub seed: u64,
    /// Backward-error tolerance relative to `max|coeff| max(1,|z|)^deg`;
    /// `None` picks `64 deg eps`.
    pub tol: Option<f64>,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            max_iter: 500,
            seed: 0x5eed,
            tol: None,
        }
    }
}

/// All roots of `p` by Aberth-Ehrlich simultaneous iteration.
///
/// Starting points sit on a randomly perturbed circle whose radius is the
/// geometric mean of the root moduli. Each root is frozen once its Horner
/// backward error is at the rounding level, and the final roots are checked
/// against `|p(z)| <= tol max|coeff| max(1,|z|)^deg`.
pub fn poly_roots(p: &Polynomial, opts: &RootOptions) -> Result<Vec<Complex>, NumericsError> {
    let deg = p.degree().unwrap_or(0);
    if deg < 1 {
        return Err(NumericsError::DegreeTooLow(deg));
    }
    let lead = p.leading().expect("degree at least one");
    if lead.is_zero() {
        return Err(NumericsError::ZeroLeadingCoefficient);
    }
    let prec = lead.prec().0;
    let eps = 2f64.powi(1 - prec as i32);
    let tol = opts.tol.unwrap_or(64.0 * deg as f64 * eps);
    let monic = p.scale(&Complex::with_val(prec, lead.recip_ref()));
    if deg == 1 {
        return Ok(vec![Complex::with_val(prec, -&monic.coeffs()[0])]);
    }

    let mut z = initial_guesses(&monic, deg, prec, opts.seed);
    let mut done = vec![false; deg];
    let mut iterations = 0;
    while iterations < opts.max_iter && done.iter().any(|d| !d) {
        iterations += 1;
        for i in 0..deg {
            if done[i] {
                continue;
            }
            let (v, dv) = monic.eval_with_derivative(&z[i]);
            let r = abs_f64(&z[i]);
            if abs_f64(&v) <= 4.0 * (deg as f64 + 1.0) * eps * monic.abs_eval(r) {
                done[i] = true;
                continue;
            }
            let ratio = Complex::with_val(prec, &v / &dv);
            let mut s = Complex::new(prec);
            for (j, zj) in z.iter().enumerate() {
                if j != i {
                    s += Complex::with_val(prec, &z[i] - zj).recip();
                }
            }
            let denom = Complex::with_val(prec, 1) - Complex::with_val(prec, &ratio * &s);
            let step = ratio / denom;
            if !step.real().is_finite() || !step.imag().is_finite() {
                // coincident iterates: nudge and retry on the next sweep
                z[i] *= Complex::with_val(prec, (1.0, 1e-3));
                continue;
            }
            if abs_f64(&step) <= 4.0 * eps * r.max(1e-300) {
                done[i] = true;
            }
            z[i] -= step;
        }
    }

    let scale = p.max_abs_coeff();
    let residuals: Vec<f64> = z
        .iter()
        .map(|zi| {
            let r = abs_f64(zi).max(1.0);
            abs_f64(&p.eval(zi)) / (scale * r.powi(deg as i32))
        })
        .collect();
    let worst = residuals.iter().cloned().fold(0.0, f64::max);
    if worst > tol {
        return Err(NumericsError::NoConvergence {
            iterations,
            partial: z,
            residuals,
            worst,
        });
    }
    Ok(z)
}

fn initial_guesses(monic: &Polynomial, deg: usize, prec: u32, seed: u64) -> Vec<Complex> {
    let a0 = abs_f64(&monic.coeffs()[0]);
    let radius = if a0 > 0.0 && a0.is_finite() {
        a0.powf(1.0 / deg as f64)
    } else {
        1.0
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tau = std::f64::consts::TAU;
    (0..deg)
        .map(|k| {
            let angle = tau * (k as f64 + 0.25 + 0.5 * rng.random::<f64>()) / deg as f64 + 0.4;
            let rad = radius * (1.0 + 0.1 * (rng.random::<f64>() - 0.5));
            Complex::with_val(prec, (rad * angle.cos(), rad * angle.sin()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::PrecisionContext;

    fn sorted_f64(roots: &[Complex]) -> Vec<(f64, f64)> {
        let mut v: Vec<(f64, f64)> = roots
            .iter()
            .map(|z| (z.real().to_f64(), z.imag().to_f64()))
            .collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    #[test]
    fn quadratic_and_linear() {
        let r = poly_roots(&Polynomial::from_f64(&[-1.0, 0.0, 1.0], 128), &RootOptions::default())
            .unwrap();
        let r = sorted_f64(&r);
        assert!((r[0].0 + 1.0).abs() < 1e-30 && r[0].1.abs() < 1e-30);
        assert!((r[1].0 - 1.0).abs() < 1e-30 && r[1].1.abs() < 1e-30);

        let r = poly_roots(&Polynomial::from_f64(&[0.0, 1.0], 128), &RootOptions::default())
            .unwrap();
        assert!(r[0].is_zero());
    }

    #[test]
    fn chebyshev_cubic_roots_are_cosines() {
        let ctx = PrecisionContext::new(192).unwrap();
        let p = Polynomial::from_f64(&[0.0, -0.75, 0.0, 1.0], 192);
        let roots = poly_roots(&p, &RootOptions::default()).unwrap();
        for k in 0..3 {
            let x = ((2 * k + 1) as f64 * std::f64::consts::PI / 6.0).cos();
            let target = ctx.complex(x, 0.0);
            let best = roots
                .iter()
                .map(|r| abs_f64(&Complex::with_val(192, r - &target)))
                .fold(f64::INFINITY, f64::min);
            assert!(best < 1e-15);
        }
        // exact zero is among them
        assert!(roots.iter().any(|r| abs_f64(r) < 1e-50));
    }

    #[test]
    fn constant_has_no_roots() {
        assert!(matches!(
            poly_roots(&Polynomial::from_f64(&[3.0], 128), &RootOptions::default()),
            Err(NumericsError::DegreeTooLow(0))
        ));
    }

    #[test]
    fn iteration_cap_reports_partial_roots() {
        let p = Polynomial::from_f64(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0], 128);
        let opts = RootOptions {
            max_iter: 1,
            ..RootOptions::default()
        };
        match poly_roots(&p, &opts) {
            Err(NumericsError::NoConvergence { partial, residuals, .. }) => {
                assert_eq!(partial.len(), 7);
                assert_eq!(residuals.len(), 7);
            }
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }
}
