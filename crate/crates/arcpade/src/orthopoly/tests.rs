use super::*;
use crate::cauchy::{Constant, ExpDensity};
use crate::geometry::{gamma_from_parametrization, ArcF, FAlpha, Identity};
use crate::numerics::{abs_f64, PrecisionContext};
use crate::schemes::SchemeKind;
use rug::ops::Pow;

const P: u32 = 160;

fn ctx() -> PrecisionContext {
    PrecisionContext::new(P).unwrap()
}

fn segment() -> Arc<GammaCurve> {
    Arc::new(gamma_from_parametrization(Arc::new(Identity), 64).unwrap())
}

fn classical(curve: &Arc<GammaCurve>) -> Arc<InterpolationScheme> {
    Arc::new(InterpolationScheme::new(Arc::clone(curve), SchemeKind::Classical, P))
}

fn unit_weight() -> WeightSpec {
    WeightSpec::new(Arc::new(Constant(ctx().one())), None, classical(&segment()))
}

/// The weight of the first experiment: `e^t / (t^n (t + 4i/3)^n)` on `F_{-1/2}`.
fn circular_weight() -> WeightSpec {
    let c = ctx();
    let curve = Arc::new(gamma_from_parametrization(Arc::new(FAlpha::new(c.real(-0.5))), 128).unwrap());
    let pts = [(Some(c.zero()), 1), (Some(c.parse_complex("0", "-4/3").unwrap()), 1)];
    let scheme = Arc::new(InterpolationScheme::from_points(curve, &pts, false, P).unwrap());
    WeightSpec::new(Arc::new(ExpDensity(c.one())), None, scheme)
}

fn diff(a: &Complex, b: &Complex) -> f64 {
    abs_f64(&Complex::with_val(P, a - b))
}

/// `∫_{-1}^{1} t^k dt / (i sqrt(1 - t^2))` by the arcsine-moment formula.
fn segment_moment(k: usize) -> Complex {
    if k % 2 == 1 {
        return Complex::new(P);
    }
    let mut c = ctx().pi();
    for i in 0..k / 2 {
        c *= (k - i) as u32;
        c /= (i + 1) as u32;
    }
    c >>= k as u32;
    Complex::with_val(P, (0, -c))
}

/// Monic Chebyshev `2^(1-n) T_n` by the three-term recurrence in `f64`-exact rationals.
fn monic_chebyshev(n: usize) -> Vec<f64> {
    let (mut prev, mut cur) = (vec![1.0], vec![0.0, 1.0]);
    if n == 0 {
        return prev;
    }
    for _ in 1..n {
        let mut next = vec![0.0; cur.len() + 1];
        for (i, a) in cur.iter().enumerate() {
            next[i + 1] += 2.0 * a;
        }
        for (i, a) in prev.iter().enumerate() {
            next[i] -= a;
        }
        prev = std::mem::replace(&mut cur, next);
    }
    let scale = 2f64.powi(1 - n as i32);
    cur.iter().map(|a| a * scale).collect()
}

#[test]
fn segment_moments_match_the_arcsine_oracle() {
    let weight = unit_weight().weight(0).unwrap();
    let m = moments(&weight, 8, &OrthoOptions::default(), P).unwrap();
    for (k, v) in m.values.iter().enumerate() {
        assert!(diff(v, &segment_moment(k)) < 1e-35, "k = {k}");
    }
    let pi = ctx().pi();
    assert!(diff(&m.values[4], &Complex::with_val(P, (0, -pi * 3u32 / 8u32))) < 1e-35);
}

#[test]
fn moments_are_linear_in_the_density() {
    let c = ctx();
    let scale = c.complex(2.0, -3.0);
    let scheme = classical(&segment());
    let base = WeightSpec::new(Arc::new(ExpDensity(c.one())), None, Arc::clone(&scheme));
    let scaled = WeightSpec::new(
        Arc::new(crate::cauchy::Product(vec![
            Arc::new(Constant(scale.clone())),
            Arc::new(ExpDensity(c.one())),
        ])),
        None,
        scheme,
    );
    let opts = OrthoOptions::default();
    let a = moments(&base.weight(2).unwrap(), 4, &opts, P).unwrap();
    let b = moments(&scaled.weight(2).unwrap(), 4, &opts, P).unwrap();
    for (x, y) in a.values.iter().zip(&b.values) {
        assert!(diff(&Complex::with_val(P, x * &scale), y) < 1e-35);
    }
}

#[test]
fn unit_weight_on_the_segment_gives_monic_chebyshev() {
    let spec = unit_weight();
    let opts = OrthoOptions::default();
    let exact: [&[f64]; 3] = [&[0.0, 1.0], &[-0.5, 0.0, 1.0], &[0.0, -0.75, 0.0, 1.0]];
    for (i, coeffs) in exact.iter().enumerate() {
        let r = solve_qn(&spec, i + 1, &opts, P).unwrap();
        for (a, b) in r.q().coeffs().iter().zip(coeffs.iter()) {
            assert!(diff(a, &ctx().complex(*b, 0.0)) < 1e-35);
        }
    }
    for n in 4..=12 {
        let r = solve_qn(&spec, n, &opts, P).unwrap();
        assert_eq!(r.q().degree(), Some(n));
        assert_eq!(r.q().leading(), Some(&ctx().one()));
        for (a, b) in r.q().coeffs().iter().zip(monic_chebyshev(n)) {
            assert!(diff(a, &ctx().complex(b, 0.0)) < 1e-25, "n = {n}");
        }
        let d = r.diagnostics();
        assert!(d.residual_max <= d.ortho_tol);
    }
}

#[test]
fn chebyshev_basis_agrees_with_monomials() {
    let spec = circular_weight();
    let mono = solve_qn(&spec, 6, &OrthoOptions::default(), P).unwrap();
    let opts = OrthoOptions {
        basis: MomentBasis::Chebyshev,
        ..OrthoOptions::default()
    };
    let cheb = solve_qn(&spec, 6, &opts, P).unwrap();
    for (a, b) in mono.q().coeffs().iter().zip(cheb.q().coeffs()) {
        assert!(diff(a, b) < 1e-20);
    }
}

#[test]
fn degree_zero() {
    let spec = circular_weight();
    let r = solve_qn(&spec, 0, &OrthoOptions::default(), P).unwrap();
    assert_eq!(r.q().coeffs(), &[ctx().one()]);
    let expected = Complex::with_val(P, r.gm() * 2u32);
    assert!(diff(r.gamma(), &expected) < 1e-40);
    let (q_branch, _) = sa1_ratio(&r, &ctx().complex(2.0, 2.0)).unwrap();
    assert!(diff(&q_branch, &r.szego().eval_tau(&crate::geometry::phi_of(&ctx().complex(2.0, 2.0), r.curve()).unwrap()).unwrap()) < 1e-30);
}

#[test]
fn second_kind_on_the_segment() {
    let c = ctx();
    let spec = unit_weight();
    let opts = OrthoOptions::default();
    let r0 = solve_qn(&spec, 0, &opts, P).unwrap();
    // ∫ dt / ((z - t) pi sqrt(1 - t^2)) = 1 / sqrt(z^2 - 1)
    let rw = r0.second_kind_w(&c.complex(2.0, 0.0)).unwrap();
    assert!(diff(&rw, &c.one()) < 1e-30);

    let z = c.complex(10.0, 0.0);
    let scaled: Vec<f64> = [2, 4, 6]
        .iter()
        .map(|&n| {
            let r = solve_qn(&spec, n, &opts, P).unwrap();
            abs_f64(&r.second_kind(&z).unwrap()) * 10f64.powi(n as i32 + 1)
        })
        .collect();
    assert!(scaled.iter().all(|s| s.is_finite() && *s < 10.0), "{scaled:?}");
}

#[test]
fn boundary_values_of_the_second_kind_add_up() {
    let spec = circular_weight();
    let r = solve_qn(&spec, 4, &OrthoOptions::default(), P).unwrap();
    let arc = ArcF::new(r.curve(), 24, P).unwrap();
    for s in arc.samples() {
        let (plus, minus) = r.second_kind_w_boundary(s).unwrap();
        let p = crate::cauchy::ArcPoint::from_tau(&s.tau_plus, s.theta.to_f64());
        let qw = r.q().eval(&s.t) * r.weight().eval(&p, P);
        let sum = Complex::with_val(P, &plus + &minus);
        assert!(diff(&sum, &Complex::with_val(P, qw * 2u32)) < 1e-25);
    }
}

#[test]
fn chebyshev_strong_asymptotics_are_exact() {
    let c = ctx();
    let spec = unit_weight();
    let opts = OrthoOptions::default();
    let z = c.complex(2.0, 0.0);
    let phi = Float::with_val(P, 3).sqrt() + 2u32;
    for n in [1, 4, 8] {
        let r = solve_qn(&spec, n, &opts, P).unwrap();
        let (q_branch, r_branch) = sa1_ratio(&r, &z).unwrap();
        let expected = Float::with_val(P, (&phi).pow(-2 * n as i32)) + 1u32;
        assert!(diff(&q_branch, &Complex::with_val(P, expected)) < 1e-30);
        assert!(diff(&r_branch, &c.one()) < 1e-30);

        let report = sa2_residuals(&r, 32).unwrap();
        assert!(report.sup < 1e-25, "{}", report.sup);
        let gaps = sa3_moments(&r, 3);
        assert!(gaps.abs[0] < 1e-30);
    }
}

#[test]
fn sa3_at_degree_zero_is_the_direct_formula() {
    let spec = unit_weight();
    let r = solve_qn(&spec, 0, &OrthoOptions::default(), P).unwrap();
    // w_0 = 1 and gamma_0 = 2, so Delta_j(0) = -(1/2) ∫ t^j dt/w^+
    let gaps = sa3_moments(&r, 4);
    for (j, v) in gaps.values.iter().enumerate() {
        let expected = segment_moment(j) / -2i32;
        assert!(diff(v, &expected) < 1e-35);
    }
}

#[test]
fn zeros_of_the_first_experiment_lie_near_the_arc() {
    let spec = circular_weight();
    let r = solve_qn(&spec, 8, &OrthoOptions::default(), P).unwrap();
    assert!(r.max_zero_distance().unwrap() < 0.05);
    let csv = zeros_to_csv(&r, &crate::numerics::RootOptions::default(), 20).unwrap();
    assert_eq!(csv.lines().count(), 9);
}

#[test]
fn insufficient_precision_is_reported() {
    let spec = WeightSpec::new(
        Arc::new(Constant(PrecisionContext::new(64).unwrap().one())),
        None,
        Arc::new(InterpolationScheme::new(segment(), SchemeKind::Classical, 64)),
    );
    let opts = OrthoOptions {
        quad: QuadOptions {
            stabilization_tol: 1e-15,
            ..QuadOptions::default()
        },
        ..OrthoOptions::default()
    };
    match solve_qn(&spec, 30, &opts, 64) {
        Err(OrthoError::ResidualTooLarge { suggested_bits, .. }) => assert!(suggested_bits > 64),
        Err(OrthoError::SingularMatrix { .. }) => {}
        other => panic!("expected a precision failure, got {:?}", other.map(|r| r.n())),
    }
}

#[test]
fn json_export_shape() {
    let spec = unit_weight();
    let r = solve_qn(&spec, 2, &OrthoOptions::default(), P).unwrap();
    let json = ortho_to_json(&r, 30);
    assert_eq!(json["n"], 2);
    assert_eq!(json["q"].as_array().unwrap().len(), 3);
    assert_eq!(json["q"][2][0], "1.00000000000000000000000000000");
    assert_eq!(json["diagnostics"]["basis"], "monomial");
    let again = ortho_to_json(&solve_qn(&spec, 2, &OrthoOptions::default(), P).unwrap(), 30);
    assert_eq!(json, again);
}
