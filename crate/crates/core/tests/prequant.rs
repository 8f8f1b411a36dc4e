use std::f64::consts::PI;

use grassflow::acceptance::torus_filling;
use grassflow::ambient::{AmbientSpace, DifferentialForm, Vec3};
use grassflow::prequant::{
    chain_integral, integrality_gap, lambda_exactness_residual, lambda_path_form, loop_action, ClosedFormPath, LoopFamily, PathFamily, SweepMap,
};
use grassflow::quadrature::min_order;
use grassflow::Error;

fn torus() -> AmbientSpace {
    AmbientSpace::unit_torus()
}

#[test]
fn transgression_form_is_a_primitive() {
    let alpha = DifferentialForm::wavy_density(torus()).unwrap();
    let p = Vec3::new(0.31, 0.17, 0.62);
    for family in [PathFamily::Shear { a: 0.1 }, PathFamily::TriangularShear { a: 0.1, b: 0.05 }] {
        let path = ClosedFormPath::new(torus(), family).unwrap();
        let residuals: Vec<f64> = [0.08, 0.04, 0.02].iter().map(|&h| lambda_exactness_residual(&path, &alpha, &p, h, 32).unwrap().residual).collect();
        assert!(min_order(&residuals) > 1.9, "{family:?}: {residuals:?}");
        let r = lambda_exactness_residual(&path, &alpha, &p, 0.02, 32).unwrap();
        assert!(r.expected.abs() > 1e-3, "fixture should move the density");
    }
}

#[test]
fn transgression_form_is_antisymmetric_and_rejects_bad_degrees() {
    let path = ClosedFormPath::new(torus(), PathFamily::TriangularShear { a: 0.1, b: 0.05 }).unwrap();
    let alpha = DifferentialForm::wavy_density(torus()).unwrap();
    let (p, u, v) = (Vec3::new(0.2, 0.4, 0.9), Vec3::new(0.3, -1.0, 0.2), Vec3::new(1.0, 0.5, -0.7));
    let a = lambda_path_form(&path, &alpha, &p, &u, &v, 16).unwrap();
    let b = lambda_path_form(&path, &alpha, &p, &v, &u, 16).unwrap();
    assert!((a + b).abs() < 1e-14);
    let two = DifferentialForm::flux(torus(), "b", |_| Vec3::z()).unwrap();
    assert!(matches!(lambda_path_form(&path, &two, &p, &u, &v, 16), Err(Error::DegreeMismatch { .. })));
    assert!(matches!(lambda_path_form(&path, &alpha, &p, &u, &v, 3), Err(Error::InvalidParameter(_))));
}

#[test]
fn stokes_between_filling_and_loop_action() {
    let r = 0.2;
    let vol = DifferentialForm::volume(torus()).unwrap();
    // primitive of vol periodic along the z-loops
    let lambda = DifferentialForm::flux(AmbientSpace::Euclidean3, "x dy^dz", |p| Vec3::new(p.x, 0.0, 0.0)).unwrap();
    let circle = move |t: f64| Vec3::new(0.5 + r * (2.0 * PI * t).cos(), 0.5 + r * (2.0 * PI * t).sin(), 0.0);
    let tube = SweepMap::new(torus(), "tube", [16, 256, 8], move |s, t, h| Vec3::new(0.5, 0.5, h) + s * (circle(t) - Vec3::new(0.5, 0.5, 0.0))).unwrap();
    let family = LoopFamily::new(torus(), [256, 8], move |t, h| circle(t) + Vec3::new(0.0, 0.0, h)).unwrap();
    let filled = chain_integral(&tube, &vol).unwrap();
    let action = loop_action(&family, &lambda).unwrap();
    assert!((filled - action).abs() < 1e-12, "{filled} vs {action}");
    assert!((action - PI * r * r).abs() < 1e-4);
}

#[test]
fn parallel_paths_bound_a_unit_slab() {
    // a y-loop swept once around the x-period, at heights z₀ and z₀ + 1
    let lambda = DifferentialForm::flux(AmbientSpace::Euclidean3, "z dx^dy", |p| Vec3::new(0.0, 0.0, p.z)).unwrap();
    let at = |z0: f64| LoopFamily::new(torus(), [16, 16], move |t, h| Vec3::new(t, h, z0)).unwrap();
    let d = loop_action(&at(1.3), &lambda).unwrap() - loop_action(&at(0.3), &lambda).unwrap();
    assert!((d - 1.0).abs() < 1e-12);
}

#[test]
fn filling_differences_are_integers() {
    let vol = DifferentialForm::volume(torus()).unwrap();
    let a = torus_filling(false, 32).unwrap();
    let b = torus_filling(true, 32).unwrap();
    let gap = integrality_gap(&b, &a, &vol).unwrap();
    assert_eq!(gap.integer.abs(), 1);
    assert!(gap.gap < 1e-4);
    let back = integrality_gap(&a, &b, &vol).unwrap();
    assert_eq!(back.integer, -gap.integer);
    assert!(integrality_gap(&a, &a.reversed().reversed(), &vol).unwrap().gap < 1e-12);
    // the wiggled filling alone is not integral
    let v = chain_integral(&a, &vol).unwrap();
    assert!((v - v.round()).abs() > 1e-3);
}

#[test]
fn chain_integral_rejects_mismatched_inputs() {
    let sweep = torus_filling(false, 8).unwrap();
    let flux = DifferentialForm::flux(torus(), "b", |_| Vec3::z()).unwrap();
    assert!(matches!(chain_integral(&sweep, &flux), Err(Error::DegreeMismatch { .. })));
    let e = DifferentialForm::volume(AmbientSpace::Euclidean3).unwrap();
    assert_eq!(chain_integral(&sweep, &e), Err(Error::SpaceMismatch));
    assert!(sweep.restrict_s(0.0, 0.5, 4).is_err());
}
