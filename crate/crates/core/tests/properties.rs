use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use grassflow::ambient::{catalog, AmbientSpace, DifferentialForm, Vec3};
use grassflow::extension::{cocycle_c, ExactDivFreeField};
use grassflow::flow::{curvature_binormal, step, FlowConfig, FlowState};
use grassflow::formats::{parse_polyline, read_loops, write_polyline, Scenario};
use grassflow::loops::{parametric, random_section, rotate_j, wavy_torus_loop, Axis, DiscreteLoop};
use grassflow::prequant::{chain_integral, SweepMap};
use grassflow::tilde::{mw_symplectic, tilde_metric};

/// Smooth closed curve `γ(s) = Σ aₖ cos(ks) + bₖ sin(ks)` plus a circle
/// large enough to keep it immersed.
fn fourier_loop(coeffs: &[[f64; 6]], n: usize) -> DiscreteLoop {
    parametric(AmbientSpace::Euclidean3, n, |s| {
        let mut p = Vec3::new(2.0 * s.cos(), 2.0 * s.sin(), 0.0);
        for (k, c) in coeffs.iter().enumerate() {
            let k = (k + 2) as f64;
            p += Vec3::new(c[0], c[1], c[2]) * (k * s).cos() / k + Vec3::new(c[3], c[4], c[5]) * (k * s).sin() / k;
        }
        p
    })
    .unwrap()
}

fn coeffs() -> impl Strategy<Value = Vec<[f64; 6]>> {
    prop::collection::vec(prop::array::uniform6(-0.3f64..0.3), 0..3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn symplectic_form_is_antisymmetric_and_compatible(c in coeffs(), n in 12usize..80, seed in any::<u64>()) {
        let l = fourier_loop(&c, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y1 = random_section(&l, &mut rng).unwrap();
        let y2 = random_section(&l, &mut rng).unwrap();
        let scale = tilde_metric(&l, &y1, &y1).unwrap().sqrt() * tilde_metric(&l, &y2, &y2).unwrap().sqrt();
        let a = mw_symplectic(&l, &y1, &y2).unwrap();
        prop_assert!((a + mw_symplectic(&l, &y2, &y1).unwrap()).abs() <= 1e-12 * scale);
        prop_assert!((a - tilde_metric(&l, &rotate_j(&l, &y1).unwrap(), &y2).unwrap()).abs() <= 1e-12 * scale);
        prop_assert!(mw_symplectic(&l, &y1, &rotate_j(&l, &y1).unwrap()).unwrap() >= -1e-12 * scale);
    }

    #[test]
    fn relabeling_is_equivariant(c in coeffs(), n in 12usize..80, shift in 0usize..80) {
        let l = fourier_loop(&c, n);
        let r = l.rotated(shift % n);
        prop_assert!((l.total_length() - r.total_length()).abs() <= 1e-12 * l.total_length());
        let mut a = l.dual_lengths();
        let mut b = r.dual_lengths();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-15 * l.total_length());
        }
        let config = FlowConfig::rk4(1e-4, 1);
        let lhs = step(&FlowState::new(l.clone()), &config).unwrap().loop_.rotated(shift % n);
        let rhs = step(&FlowState::new(r), &config).unwrap().loop_;
        for (p, q) in lhs.vertices().iter().zip(rhs.vertices()) {
            prop_assert!((p - q).norm() <= 1e-12);
        }
    }

    #[test]
    fn binormal_is_orthogonal_to_adjacent_edges(c in coeffs(), n in 12usize..80) {
        let l = fourier_loop(&c, n);
        let kb = curvature_binormal(&l).unwrap();
        for i in 0..n {
            let v = kb.vectors()[i];
            for e in [l.edge((i + n - 1) % n), l.edge(i)] {
                prop_assert!(v.dot(&e).abs() <= 1e-12 * (1.0 + v.norm()) * e.norm());
            }
        }
        // reversing the orientation negates κb
        let rev = l.reversed();
        let kr = curvature_binormal(&rev).unwrap();
        for i in 0..n {
            prop_assert!((kr.vectors()[(n - i) % n] + kb.vectors()[i]).norm() <= 1e-12 * (1.0 + kb.vectors()[i].norm()));
        }
    }

    #[test]
    fn cocycle_is_antisymmetric_for_random_fields(s1 in 0u64..1000, s2 in 0u64..1000, off in prop::array::uniform2(0.0f64..1.0)) {
        let t = AmbientSpace::unit_torus();
        let x = ExactDivFreeField::new(catalog::random_trig_field(t, s1, 2).unwrap()).unwrap();
        let y = ExactDivFreeField::new(catalog::random_trig_field(t, s2, 2).unwrap()).unwrap();
        let base = wavy_torus_loop(t, Axis::X, off, [0.05, 0.05], 64).unwrap();
        prop_assert_eq!(cocycle_c(&base, &x, &y).unwrap() + cocycle_c(&base, &y, &x).unwrap(), 0.0);
        prop_assert_eq!(cocycle_c(&base, &x, &x).unwrap(), 0.0);
    }

    #[test]
    fn lattice_sweeps_shift_the_volume_by_integers(k in -2i32..=2, amp in 0.0f64..0.2, y0 in 0.0f64..1.0) {
        let t = AmbientSpace::unit_torus();
        let vol = DifferentialForm::volume(t).unwrap();
        let sweep = |k: f64| SweepMap::new(t, "s", [8, 8, 8], move |s, u, h| {
            let w = s * (1.0 - s);
            let tau = std::f64::consts::TAU;
            Vec3::new(u + amp * w * (tau * u).sin(), y0 + 0.1 * s + k * s, h + amp * w * (tau * u).cos())
        }).unwrap();
        let d = chain_integral(&sweep(k as f64), &vol).unwrap() - chain_integral(&sweep(0.0), &vol).unwrap();
        // (∂s, ∂t, ∂θ) = (k e₂, e₁, e₃) is negatively oriented
        prop_assert!((d + k as f64).abs() < 1e-10, "{d}");
    }

    #[test]
    fn polyline_round_trips(pts in prop::collection::vec(prop::array::uniform3(-1e6f64..1e6), 3..40)) {
        let loops = parse_polyline(&write_polyline_points(&pts)).unwrap();
        prop_assert_eq!(loops.len(), 1);
        for (p, q) in pts.iter().zip(&loops[0]) {
            prop_assert_eq!(Vec3::from(*p), *q);
        }
    }

    #[test]
    fn polyline_parser_never_panics(text in "[0-9,.\\-e \n#a-z]{0,200}") {
        let _ = parse_polyline(&text);
        let _ = read_loops(&text, AmbientSpace::unit_torus());
    }

    #[test]
    fn scenario_parser_never_panics(text in "\\PC{0,300}") {
        let _ = Scenario::from_json(&text);
    }
}

fn write_polyline_points(pts: &[[f64; 3]]) -> String {
    pts.iter().enumerate().map(|(i, p)| format!("{i},{:?},{:?},{:?}\n", p[0], p[1], p[2])).collect()
}

#[test]
fn written_polylines_parse_back() {
    let l = fourier_loop(&[[0.1, 0.0, 0.2, 0.0, -0.1, 0.05]], 33);
    assert_eq!(read_loops(&write_polyline([&l]), AmbientSpace::Euclidean3).unwrap(), vec![l]);
}
