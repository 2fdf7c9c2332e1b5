use super::*;
use crate::geometry::{
    gamma_from_parametrization, joukowski, trace_gamma, ArcF, FAlpha, Generator, GeneratorSet, Identity, TraceOptions,
};
use crate::numerics::{abs_f64, poly_roots, PrecisionContext, RootOptions};
use rug::ops::Pow;

const P: u32 = 128;

fn ctx() -> PrecisionContext {
    PrecisionContext::new(P).unwrap()
}

fn segment() -> Arc<GammaCurve> {
    Arc::new(gamma_from_parametrization(Arc::new(Identity), 64).unwrap())
}

fn circular_arc() -> Arc<GammaCurve> {
    Arc::new(gamma_from_parametrization(Arc::new(FAlpha::new(ctx().real(-0.5))), 128).unwrap())
}

fn three_point() -> Arc<GammaCurve> {
    let c = ctx();
    let pts = [
        (c.parse_complex("-3/4", "1/4").unwrap(), 1),
        (c.parse_complex("87/104", "6/104").unwrap(), 1),
        (c.parse_complex("0", "-1/10").unwrap(), 1),
    ];
    let g = GeneratorSet::from_points(&pts).unwrap();
    Arc::new(trace_gamma(&g, 256, &TraceOptions::default()).unwrap())
}

fn sup_log(level: &SchemeLevel, curve: &GammaCurve) -> f64 {
    symmetry_diagnostic(level, curve, 200, &[], P).unwrap().sup_log()
}

#[test]
fn repetition_on_the_generated_curve_is_unimodular() {
    let curve = three_point();
    let scheme = InterpolationScheme::from_generators(Arc::clone(&curve), false, P).unwrap();
    let level = scheme.level(3).unwrap();
    assert_eq!(level.points().len(), 6);
    let g = curve.generators().unwrap().points().unwrap();
    for e in &g {
        let count = level.finite_points().filter(|z| abs_f64(&Complex::with_val(P, *z - e)) < 1e-30).count();
        assert_eq!(count, 2);
    }
    assert!(sup_log(&level, &curve) < 1e-9);
    let level = scheme.level(12).unwrap();
    let report = symmetry_diagnostic(&level, &curve, 300, &[], P).unwrap();
    assert!(report.sup_log() < 1e-8, "{}", report.sup_log());
    assert!(report.product_residual < 1e-10);
}

#[test]
fn circular_arc_pair_scheme() {
    let c = ctx();
    let curve = circular_arc();
    let pts = [(Some(c.zero()), 1), (Some(c.parse_complex("0", "-4/3").unwrap()), 1)];
    let scheme = InterpolationScheme::from_points(Arc::clone(&curve), &pts, false, P).unwrap();
    let level = scheme.level(4).unwrap();
    let zeros = level.finite_points().filter(|z| z.is_zero()).count();
    assert_eq!(zeros, 4);
    assert_eq!(level.v().degree(), Some(8));
    assert!(sup_log(&level, &curve) < 1e-9);
}

#[test]
fn empty_level_and_padding() {
    let curve = three_point();
    let strict = InterpolationScheme::from_generators(Arc::clone(&curve), false, P).unwrap();
    let empty = strict.level(0).unwrap();
    assert!(empty.points().is_empty());
    let tau = ctx().complex(2.0, 1.0);
    assert_eq!(empty.rn_at_tau(&tau), ctx().one());
    assert!(matches!(
        strict.level(4),
        Err(SchemeError::IndivisibleWithoutPadding { slots: 8, k: 3 })
    ));

    let padded = InterpolationScheme::from_generators(Arc::clone(&curve), true, P).unwrap();
    let level = padded.level(4).unwrap();
    let g = curve.generators().unwrap().points().unwrap();
    let counts: Vec<usize> = g
        .iter()
        .map(|e| level.finite_points().filter(|z| abs_f64(&Complex::with_val(P, *z - e)) < 1e-30).count())
        .collect();
    assert_eq!(counts, vec![3, 3, 2]);
}

#[test]
fn equal_flux_on_the_segment_matches_the_circle() {
    let c = ctx();
    let level = equal_flux_level(&segment(), 0.5, 2, P).unwrap();
    for (j, p) in level.points().iter().enumerate() {
        let psi = c.pi() * (2 * j + 1) as u32 / 4u32;
        let (s, co) = psi.sin_cos(Float::new(P));
        let eps = Complex::with_val(P, (co, s)) / 2u32;
        let expected = joukowski(&eps).unwrap();
        assert!(abs_f64(&Complex::with_val(P, p.z().unwrap() - &expected)) < 1e-30);
        let phi = p.phi().unwrap();
        assert!(abs_f64(&(Complex::with_val(P, phi * &eps) - 1u32)) < 1e-30);
    }
    // conjugate-symmetric points give a real v_n
    assert!(level.v().coeffs().iter().all(|a| a.imag().to_f64().abs() < 1e-30));
}

#[test]
fn equal_flux_from_a_traced_circle_agrees_with_the_closed_form() {
    let g = GeneratorSet::from_tau(vec![Generator {
        eps: ctx().zero(),
        multiplicity: 1,
    }])
    .unwrap();
    let traced = trace_gamma(&g, 128, &TraceOptions::default()).unwrap();
    let a = equal_flux_level(&traced, 0.5, 3, P).unwrap();
    let b = equal_flux_level(&segment(), 0.5, 3, P).unwrap();
    for (p, q) in a.points().iter().zip(b.points()) {
        assert!(abs_f64(&Complex::with_val(P, p.z().unwrap() - q.z().unwrap())) < 1e-25);
    }
    let flux = a.flux().unwrap();
    assert!((flux.total_flux - std::f64::consts::TAU).abs() < 1e-8);
}

#[test]
fn equal_flux_on_the_generated_curve() {
    let curve = three_point();
    let mut sups = Vec::new();
    // at rho = 1/2 the level set splits into loops around single generators
    assert!(matches!(
        equal_flux_level(&curve, 0.5, 4, P),
        Err(SchemeError::Geometry(crate::geometry::GeometryError::LevelOutOfRange(_)))
    ));
    for n in [4, 8] {
        let level = equal_flux_level(&curve, 0.8, n, P).unwrap();
        let flux = level.flux().unwrap();
        assert!((flux.total_flux - 6.0 * std::f64::consts::PI).abs() < 1e-8);
        assert!(flux.max_relative_deviation < 1e-8);
        sups.push(sup_log(&level, &curve));
    }
    assert!(sups[1] < 1.5 * sups[0] + 1e-6, "{sups:?}");
}

#[test]
fn classical_scheme_gives_inverse_powers_of_phi() {
    let c = ctx();
    let curve = segment();
    let scheme = InterpolationScheme::new(Arc::clone(&curve), SchemeKind::Classical, P);
    let level = scheme.level(3).unwrap();
    assert_eq!(level.v(), &crate::numerics::Polynomial::constant(c.one()));
    let z = c.complex(2.0, 0.0);
    let rn = rn_eval(&level, &z, &curve).unwrap();
    let phi = Float::with_val(P, 3).sqrt() + 2u32;
    let expected = Float::with_val(P, (&phi).pow(-6i32));
    assert!(abs_f64(&(rn - Complex::with_val(P, expected))) < 1e-35);
}

#[test]
fn rn_vanishes_at_scheme_points_and_decays() {
    let c = ctx();
    let curve = three_point();
    let scheme = InterpolationScheme::from_generators(Arc::clone(&curve), false, P).unwrap();
    let level = scheme.level(3).unwrap();
    let e = level.finite_points().next().unwrap().clone();
    assert!(abs_f64(&rn_eval(&level, &e, &curve).unwrap()) < 1e-30);

    let probe = c.complex(3.0, 0.0);
    let mut logs = Vec::new();
    for n in [3, 6, 12] {
        let level = scheme.level(n).unwrap();
        let r = abs_f64(&rn_eval(&level, &probe, &curve).unwrap());
        assert!(r < 1.0);
        logs.push((n, r.ln()));
    }
    assert!(logs[1].1 < logs[0].1 - 2f64.ln() && logs[2].1 < logs[1].1 - 2f64.ln());
    let q = decay_rate(&logs).unwrap();
    assert!(q < 1.0);
}

#[test]
fn boundary_product_and_v_roots() {
    let curve = circular_arc();
    let level = equal_flux_level(&curve, 0.5, 3, P).unwrap();
    let arc = ArcF::new(&curve, 40, P).unwrap();
    for s in arc.samples() {
        let (rp, rm) = level.boundary(s);
        assert!(abs_f64(&(Complex::with_val(P, &rp * &rm) - 1u32)) < 1e-10);
    }
    let roots = poly_roots(level.v(), &RootOptions::default()).unwrap();
    for e in level.finite_points() {
        let best = roots
            .iter()
            .map(|r| abs_f64(&Complex::with_val(P, r - e)))
            .fold(f64::INFINITY, f64::min);
        assert!(best < 1e-10);
    }
}

#[test]
fn levels_are_cached_and_deterministic() {
    let curve = circular_arc();
    let a = InterpolationScheme::new(Arc::clone(&curve), SchemeKind::EqualFlux { rho: 0.5 }, P);
    let b = InterpolationScheme::new(Arc::clone(&curve), SchemeKind::EqualFlux { rho: 0.5 }, P);
    let l1 = a.level(4).unwrap();
    assert!(Arc::ptr_eq(&l1, &a.level(4).unwrap()));
    let l2 = b.level(4).unwrap();
    assert_eq!(level_to_json(&l1, 40), level_to_json(&l2, 40));
}

#[test]
fn json_export_shape() {
    let c = ctx();
    let curve = segment();
    let pts = [(Some(c.complex(0.0, 2.0)), 1), (None, 1)];
    let scheme = InterpolationScheme::from_points(Arc::clone(&curve), &pts, false, P).unwrap();
    let json = levels_to_json(&[&scheme.level(1).unwrap()], 20);
    let level = &json[0];
    assert_eq!(level["n"], 1);
    assert_eq!(level["points"][0]["z"][1], "2.0000000000000000000");
    assert!(level["points"][1]["z"].is_null());
    assert_eq!(level["v"].as_array().unwrap().len(), 2);
}

#[test]
fn clearance_and_rho_are_checked() {
    let c = ctx();
    let curve = segment();
    let pts = [(Some(c.complex(0.2, 1e-6)), 1)];
    let scheme = InterpolationScheme::from_points(Arc::clone(&curve), &pts, false, P).unwrap();
    assert!(matches!(scheme.level(1), Err(SchemeError::PointTooClose { .. })));
    assert!(matches!(equal_flux_level(&curve, 1.0, 2, P), Err(SchemeError::InvalidRho(_))));
}
