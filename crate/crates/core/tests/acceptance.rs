//! Acceptance criteria 1–10, one PASS/FAIL line each, followed by
//! independent oracles for the derived reference values.

use std::f64::consts::PI;
use std::io::Write;

use grassflow::acceptance::CRITERIA;
use grassflow::ambient::{catalog, AmbientSpace, DifferentialForm, Vec3};
use grassflow::extension::{cocycle_c, ExactDivFreeField};
use grassflow::flow::{self, gradient_defect, FlowConfig};
use grassflow::loops::{circle, torus_loop, Axis, NormalSection};
use grassflow::prequant::{chain_integral, sphere_holonomy, sphere_rotation_hamiltonian, Filling, SweepMap};

#[test]
fn acceptance_criteria() {
    let outcomes: Vec<_> = CRITERIA.iter().map(|c| (c, c.run())).collect();
    // straight to the handle so the lines show up even when output is captured
    let mut out = std::io::stdout().lock();
    writeln!(out).unwrap();
    for (_, o) in &outcomes {
        writeln!(out, "{o}").unwrap();
    }
    drop(out);
    let mut problems = Vec::new();
    for (c, o) in &outcomes {
        for check in &o.checks {
            let documented = c.expected_failures.contains(&check.name.as_str());
            match (documented, check.pass) {
                (false, false) => problems.push(format!("criterion {}: {check}", c.id)),
                (true, true) => problems.push(format!("criterion {}: {} now passes; drop it from expected_failures", c.id, check.name)),
                _ => {}
            }
        }
    }
    assert!(problems.is_empty(), "{problems:#?}");
}

/// `c(mode_z_dy, mode_z_dx)` on a z-loop by brute force with the fields
/// written out by hand: `X = −2π cos(2πz) e₁`, `Y = 2π cos(2πz) e₂`.
#[test]
fn two_pi_squared_oracle() {
    let t = AmbientSpace::unit_torus();
    let x_hand = |z: f64| Vec3::new(-2.0 * PI * (2.0 * PI * z).cos(), 0.0, 0.0);
    let y_hand = |z: f64| Vec3::new(0.0, 2.0 * PI * (2.0 * PI * z).cos(), 0.0);
    let x = catalog::field("mode_z_dy", t).unwrap();
    let y = catalog::field("mode_z_dx", t).unwrap();
    for z in [0.0, 0.13, 0.61] {
        let p = Vec3::new(0.3, 0.6, z);
        assert!((x.eval(&p) - x_hand(z)).norm() < 1e-12);
        assert!((y.eval(&p) - y_hand(z)).norm() < 1e-12);
    }
    let n = 10_000;
    let oracle = -(0..n)
        .map(|i| {
            let z = (i as f64 + 0.5) / n as f64;
            x_hand(z).cross(&y_hand(z)).dot(&Vec3::z()) / n as f64
        })
        .sum::<f64>();
    assert!((oracle - 2.0 * PI * PI).abs() < 1e-9, "oracle {oracle}");
    let base = torus_loop(t, Axis::Z, [0.3, 0.6], 1024).unwrap();
    let lib = cocycle_c(&base, &ExactDivFreeField::new(x).unwrap(), &ExactDivFreeField::new(y).unwrap()).unwrap();
    assert!((lib - oracle).abs() < 1e-4);
}

/// Cap areas `(1 ∓ cos θ₀)/2` of the mass-one sphere.
#[test]
fn sphere_cap_oracle() {
    for th in [0.3, 1.0, 0.5 * PI, 2.5] {
        let north = sphere_holonomy(th, Filling::North, 512).unwrap();
        let south = sphere_holonomy(th, Filling::South, 512).unwrap();
        let en = (north.raw_value - 0.5 * (1.0 - f64::cos(th))).abs();
        let es = (south.raw_value + 0.5 * (1.0 + f64::cos(th))).abs();
        assert!(en < 2e-6 && es < 2e-6, "{th}: {en:e} {es:e}");
        // the Richardson estimate tracks the true error
        assert!(en <= 1.1 * north.estimated_error + 1e-12 && es <= 1.1 * south.estimated_error + 1e-12);
    }
}

/// `f(θ) = cos θ / 2` solves `df = i_X ω` for `X = 2π ∂_φ` and has zero mean.
#[test]
fn rotation_hamiltonian_oracle() {
    for th in [0.0, 0.4, 1.3, 0.5 * PI, 2.2, PI] {
        assert!((sphere_rotation_hamiltonian(th).unwrap() - 0.5 * f64::cos(th)).abs() < 1e-10);
    }
}

/// The regular n-gon of radius R translates rigidly with speed `sec(π/n)/R`.
#[test]
fn polygon_translation_oracle() {
    let n = 256;
    let l = circle(AmbientSpace::Euclidean3, Vec3::zeros(), 1.0, n).unwrap();
    let traj = flow::run(l, &FlowConfig { substeps: 4, ..FlowConfig::rk4(1e-3, 100) }).unwrap();
    let shift = traj.diagnostics.last().unwrap().center_of_mass[2] - traj.diagnostics[0].center_of_mass[2];
    let expected = 0.1 / (PI / n as f64).cos();
    assert!((shift - expected).abs() < 1e-12, "{shift} vs {expected}");
}

/// Radial section of the n-gon: `dL(e_r) = 2n sin(π/n)` and
/// `g̃(tr II, e_r) = −2n tan(π/n)`.
#[test]
fn polygon_gradient_oracle() {
    for n in [64, 128, 256] {
        let l = circle(AmbientSpace::Euclidean3, Vec3::zeros(), 1.0, n).unwrap();
        let radial = l.vertices().iter().map(|v| v.normalize()).collect();
        let y = NormalSection::new(&l, radial).unwrap();
        let a = PI / n as f64;
        let expected = 2.0 * n as f64 * (a.tan() - a.sin());
        assert!((gradient_defect(&l, &y).unwrap() - expected).abs() < 1e-7);
    }
}

/// Solid tube of radius r around a z-loop has volume πr².
#[test]
fn tube_volume_oracle() {
    let t = AmbientSpace::unit_torus();
    let r = 0.2;
    let errors: Vec<f64> = [64, 128, 256]
        .iter()
        .map(|&m| {
            let tube =
                SweepMap::new(t, "tube", [16, m, 8], move |s, u, h| Vec3::new(0.5 + s * r * (2.0 * PI * u).cos(), 0.5 + s * r * (2.0 * PI * u).sin(), h))
                    .unwrap();
            (chain_integral(&tube, &DifferentialForm::volume(t).unwrap()).unwrap() - PI * r * r).abs()
        })
        .collect();
    assert!(grassflow::quadrature::min_order(&errors) > 1.99);
    assert!(errors[2] < 1e-5);
}
