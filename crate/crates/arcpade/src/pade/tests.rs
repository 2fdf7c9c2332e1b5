use super::*;
use crate::cauchy::{Constant, ExpDensity};
use crate::geometry::{gamma_from_parametrization, FAlpha, Identity};
use crate::numerics::{LuDecomposition, Matrix, PrecisionContext};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::ops::Pow;

const P: u32 = 160;

fn ctx() -> PrecisionContext {
    PrecisionContext::new(P).unwrap()
}

fn segment_measure(scale: Complex) -> MeasureSpec {
    let curve = Arc::new(gamma_from_parametrization(Arc::new(Identity), 64).unwrap());
    MeasureSpec::new(curve, Arc::new(Constant(scale)), None, P)
}

fn classical(ms: &MeasureSpec) -> Arc<InterpolationScheme> {
    Arc::new(InterpolationScheme::new(Arc::clone(ms.curve()), SchemeKind::Classical, P))
}

/// `e^t dmu` on `F_{-1/2}` with interpolation at `0` and `-4i/3`.
fn circular() -> (MeasureSpec, Arc<InterpolationScheme>) {
    let c = ctx();
    let curve = Arc::new(gamma_from_parametrization(Arc::new(FAlpha::new(c.real(-0.5))), 128).unwrap());
    let pts = [(Some(c.zero()), 1), (Some(c.parse_complex("0", "-4/3").unwrap()), 1)];
    let scheme = Arc::new(InterpolationScheme::from_points(Arc::clone(&curve), &pts, false, P).unwrap());
    (MeasureSpec::new(curve, Arc::new(ExpDensity(c.one())), None, P), scheme)
}

fn diff(a: &Complex, b: &Complex) -> f64 {
    abs_f64(&Complex::with_val(P, a - b))
}

fn rel(a: &Complex, b: &Complex) -> f64 {
    diff(a, b) / abs_f64(b)
}

/// `∫ t^k dmu` for the arcsine measure: `binom(k, k/2) / 2^k` for even `k`.
fn arcsine_moment(k: usize) -> Complex {
    if k % 2 == 1 {
        return Complex::new(P);
    }
    let mut c = Float::with_val(P, 1);
    for i in 0..k / 2 {
        c *= (k - i) as u32;
        c /= (i + 1) as u32;
    }
    c >>= k as u32;
    Complex::with_val(P, c)
}

/// Type `(n-1, n)` approximant from the Laurent coefficients at infinity:
/// `q f - p = O(z^(-n-1))`, evaluated at `z`.
fn brute_force_pade(n: usize, z: &Complex) -> Complex {
    let c: Vec<Complex> = (0..2 * n).map(arcsine_moment).collect();
    let a = Matrix::from_fn(n, |j, i| c[i + j].clone());
    let rhs: Vec<Complex> = (0..n).map(|j| Complex::with_val(P, -&c[n + j])).collect();
    let mut q = LuDecomposition::new(&a).unwrap().solve(&rhs).unwrap();
    q.push(Complex::with_val(P, 1));
    // polynomial part of q(z) sum_k c_k z^(-k-1)
    let p: Vec<Complex> = (0..n)
        .map(|m| {
            let mut s = Complex::new(P);
            for (i, qi) in q.iter().enumerate().skip(m + 1) {
                s += Complex::with_val(P, qi * &c[i - m - 1]);
            }
            s
        })
        .collect();
    Polynomial::new(p).eval(z) / Polynomial::new(q).eval(z)
}

#[test]
fn arcsine_transform_and_mass() {
    let c = ctx();
    let ms = segment_measure(c.one());
    let f = cauchy_transform(&ms, &c.complex(2.0, 0.0)).unwrap();
    let expected = Float::with_val(P, 3).sqrt().recip();
    assert!(diff(&f, &Complex::with_val(P, expected)) < 1e-35);
    assert!(diff(&ms.mass().unwrap(), &c.one()) < 1e-35);
    let z = c.complex(1e6, 0.0);
    let zf = cauchy_transform(&ms, &z).unwrap() * &z;
    assert!(diff(&zf, &c.one()) < 1e-11);
}

#[test]
fn transform_is_linear_in_the_density() {
    let c = ctx();
    let scale = c.complex(-1.5, 0.25);
    let z = c.complex(0.3, 0.7);
    let a = cauchy_transform(&segment_measure(c.one()), &z).unwrap();
    let b = cauchy_transform(&segment_measure(scale.clone()), &z).unwrap();
    assert!(diff(&(a * &scale), &b) < 1e-35);
}

#[test]
fn degree_zero_approximant_vanishes() {
    let (ms, scheme) = circular();
    let pr = pade(&ms, &scheme, 0).unwrap();
    let z = ctx().complex(2.0, 2.0);
    assert!(abs_f64(&pade_evaluate(&pr, &z).unwrap()) < 1e-35);
    assert!(pade_numerator(&pr).unwrap().is_zero());
}

#[test]
fn classical_segment_matches_the_linear_system_oracle() {
    let c = ctx();
    let ms = segment_measure(c.one());
    let scheme = classical(&ms);
    let z = c.complex(2.0, 0.0);
    for n in 1..=6 {
        let pr = pade(&ms, &scheme, n).unwrap();
        let oracle = brute_force_pade(n, &z);
        assert!(rel(&pade_evaluate(&pr, &z).unwrap(), &oracle) < 1e-12, "n = {n}");
        // the error itself, where most digits of Pi_n cancel
        let f = Complex::with_val(P, Float::with_val(P, 3).sqrt().recip());
        let err = Complex::with_val(P, &f - &oracle);
        assert!(rel(&pr.error(&z).unwrap(), &err) < 1e-12, "n = {n}");
    }
}

#[test]
fn first_approximant_on_the_segment() {
    let c = ctx();
    let ms = segment_measure(c.one());
    let pr = pade(&ms, &classical(&ms), 1).unwrap().with_numerator().unwrap();
    let p = pr.p().unwrap();
    assert_eq!(p.coeffs().len(), 1);
    assert!(diff(&p.coeffs()[0], &c.one()) < 1e-35);
    let z = c.complex(3.0, 0.0);
    let explicit = p.eval(&z) / pr.q().eval(&z);
    assert!(rel(&pade_evaluate(&pr, &z).unwrap(), &explicit) < 1e-12);
}

#[test]
fn chebyshev_speed_of_convergence() {
    let c = ctx();
    let ms = segment_measure(c.one());
    let z = c.complex(2.0, 0.0);
    let a = Float::with_val(P, 3).sqrt() + 2u32;
    for n in [1, 4, 8] {
        let pr = pade(&ms, &classical(&ms), n).unwrap();
        let rho = speedconv_ratio(&pr, &ms, &z).unwrap();
        // rho_n(2) = 1 / (1 + a^(-2n))
        let tail = Float::with_val(P, (&a).pow(-2 * n as i32));
        let exact = Complex::with_val(P, (Float::with_val(P, &tail + 1u32)).recip());
        assert!(diff(&rho, &exact) < 1e-30, "n = {n}");
        assert!(diff(&rho, &c.one()) <= 2.0 * tail.to_f64());
    }
}

#[test]
fn speed_ratio_is_invariant_under_scaling() {
    let c = ctx();
    let z = c.complex(0.5, 1.5);
    let base = segment_measure(c.one());
    let scaled = segment_measure(c.complex(3.0, -2.0));
    let a = speedconv_ratio(&pade(&base, &classical(&base), 5).unwrap(), &base, &z).unwrap();
    let b = speedconv_ratio(&pade(&scaled, &classical(&scaled), 5).unwrap(), &scaled, &z).unwrap();
    assert!(diff(&a, &b) < 1e-30);
}

#[test]
fn explicit_and_implicit_forms_agree_at_random_probes() {
    let (ms, scheme) = circular();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in [2, 5, 8, 12] {
        let pr = pade(&ms, &scheme, n).unwrap().with_numerator().unwrap();
        assert!(pr.p().unwrap().coeffs().len() <= n);
        let mut checked = 0;
        while checked < 10 {
            let z = Complex64::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
            if ms.curve().distance_to_arc(z) < 0.2 {
                continue;
            }
            let zc = Complex::with_val(P, (z.re, z.im));
            let implicit = match pade_evaluate(&pr, &zc) {
                Err(PadeError::AtPoleOfApproximant { .. }) => continue,
                other => other.unwrap(),
            };
            let explicit = pr.p().unwrap().eval(&zc) / pr.q().eval(&zc);
            let tol = pr.cross_tol(&zc).max(1e-30);
            assert!(tol <= 1e-10 && rel(&implicit, &explicit) < 1e-10, "n = {n}, z = {z}");
            checked += 1;
        }
    }
}

#[test]
fn interpolation_at_the_scheme_points() {
    let (ms, scheme) = circular();
    let pr = pade(&ms, &scheme, 6).unwrap();
    for e in pr.ortho().weight().level().finite_points() {
        let err = abs_f64(&pr.error(e).unwrap());
        assert!(err < 1e-35, "{err}");
        let res = pr.interpolation_residual(e, 0.05, 256).unwrap();
        assert!(res < 1e-15, "{res}");
    }
}

#[test]
fn error_decays_at_infinity_to_the_right_order() {
    let (ms, scheme) = circular();
    let n = 4;
    let pr = pade(&ms, &scheme, n).unwrap();
    let scaled = |r: f64| {
        let z = ctx().complex(r, r / 3.0);
        let rn = pr.error(&z).unwrap() * pr.q().eval(&z) / pr.v().eval(&z);
        let zp = Complex::with_val(P, (&z).pow(n as u32 + 1));
        abs_f64(&(rn * zp))
    };
    let (near, far) = (scaled(1e2), scaled(1e3));
    assert!(far.is_finite() && far < 2.0 * near && far > 0.5 * near, "{near} {far}");
}

#[test]
fn error_field_skips_the_tube() {
    let (ms, scheme) = circular();
    let pr = pade(&ms, &scheme, 4).unwrap();
    let grid = FieldGrid {
        nx: 5,
        ny: 5,
        tube: 0.8,
        ..FieldGrid::default()
    };
    let csv = error_field_csv(&pr, &ms, &grid).unwrap();
    let inside = grid.points().filter(|z| ms.curve().distance_to_arc(*z) < 0.8).count();
    assert!(inside > 0, "{csv}");
    assert!(csv.lines().count() <= 1 + 25 - inside);
    assert!(csv.starts_with("re,im,abs_error,abs_rho_minus_one\n"));
}
