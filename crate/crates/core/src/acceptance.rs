//! The acceptance criteria as runnable check lists, shared by the
//! `acceptance` test target and `grassflow check --suite acceptance`.
//!
//! Each criterion reports every number it looks at. Expected values here
//! are closed forms; the test target adds independent brute-force oracles.

use std::f64::consts::PI;
use std::fmt;
use std::time::Instant;

use crate::ambient::{catalog, AmbientSpace, DifferentialForm, Vec3};
use crate::error::{Error, Result};
use crate::extension::{
    cocycle_c, cocycle_formula_constancy, cocycle_identity_residual, hamiltonian_residual, iso_check, lambda0, moment, Bordism, ExactDivFreeField,
};
use crate::flow::{self, fit_circle, gradient_residual, FlowConfig, FlowState};
use crate::formats::Check;
use crate::loops::{circle, ellipse, torus_loop, trefoil, wavy_torus_loop, Axis, DiscreteLoop, NormalSection};
use crate::prequant::{chain_integral, integrality_gap, sphere_holonomy, sphere_rotation_hamiltonian, Filling, IntegralityGap, SweepMap};
use crate::quadrature::{midpoint, min_order};
use crate::tilde::{compatibility_residual, contraction_check, mw_symplectic, pullback_check};

pub struct Criterion {
    pub id: u8,
    pub title: &'static str,
    pub budget_seconds: Option<f64>,
    /// Checks that cannot pass as literally configured; see the README.
    pub expected_failures: &'static [&'static str],
    run: fn() -> Result<Vec<Check>>,
}

#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: &'static str,
    pub checks: Vec<Check>,
    pub seconds: f64,
    pub pass: bool,
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{verdict} criterion {:>2}: {} ({:.2} s)", self.id, self.title, self.seconds)?;
        for c in &self.checks {
            write!(f, "\n    {c}")?;
        }
        Ok(())
    }
}

impl Criterion {
    pub fn run(&self) -> CriterionOutcome {
        let start = Instant::now();
        let mut checks = match (self.run)() {
            Ok(c) => c,
            Err(e) => vec![Check::failed(format!("computation failed: {e}"), 0.0)],
        };
        let seconds = start.elapsed().as_secs_f64();
        if let Some(b) = self.budget_seconds {
            checks.push(Check::at_most("runtime_seconds", seconds, b));
        }
        let pass = checks.iter().all(|c| c.pass);
        CriterionOutcome { id: self.id, title: self.title, checks, seconds, pass }
    }
}

pub static CRITERIA: &[Criterion] = &[
    Criterion { id: 1, title: "sphere holonomy", budget_seconds: Some(1.0), expected_failures: &[], run: sphere_holonomy_checks },
    Criterion { id: 2, title: "rotation Hamiltonian on the sphere", budget_seconds: Some(1.0), expected_failures: &[], run: rotation_hamiltonian_checks },
    Criterion {
        id: 3,
        title: "binormal-flow circle translation",
        budget_seconds: Some(5.0),
        expected_failures: &["dt1e-3_center_displacement_error", "dt1e-3_circle_rms", "dt1e-3_relative_length_drift"],
        run: circle_translation_checks,
    },
    Criterion { id: 4, title: "gradient identity grad L = -tr II", budget_seconds: Some(10.0), expected_failures: &[], run: gradient_checks },
    Criterion { id: 5, title: "Hamiltonian property of the moment map", budget_seconds: None, expected_failures: &[], run: moment_checks },
    Criterion { id: 6, title: "cocycle suite", budget_seconds: None, expected_failures: &[], run: cocycle_checks },
    Criterion { id: 7, title: "homologous-shift identity and Stokes consistency", budget_seconds: None, expected_failures: &[], run: iso_checks },
    Criterion { id: 8, title: "integrality of filling differences", budget_seconds: None, expected_failures: &[], run: integrality_checks },
    Criterion { id: 9, title: "tilde-calculus identities", budget_seconds: None, expected_failures: &[], run: tilde_checks },
    Criterion { id: 10, title: "conservation under the flow", budget_seconds: None, expected_failures: &[], run: conservation_checks },
];

/// Named suites for `grassflow check`.
pub fn suite(name: &str) -> Option<Vec<&'static Criterion>> {
    match name {
        "acceptance" => Some(CRITERIA.iter().collect()),
        "quick" => Some(CRITERIA.iter().filter(|c| [1, 2, 9].contains(&c.id)).collect()),
        _ => None,
    }
}

pub const SUITES: &[&str] = &["acceptance", "quick"];

fn torus() -> AmbientSpace {
    AmbientSpace::unit_torus()
}

fn exact(name: &str) -> Result<ExactDivFreeField> {
    ExactDivFreeField::new(catalog::field(name, torus())?)
}

fn sphere_holonomy_checks() -> Result<Vec<Check>> {
    let north = sphere_holonomy(0.5 * PI, Filling::North, 512)?;
    let south = sphere_holonomy(0.5 * PI, Filling::South, 512)?;
    let gap = IntegralityGap::of(north.raw_value - south.raw_value);
    Ok(vec![
        Check::close("equator_north_value_mod_1_error", north.value_mod_1, 0.5, 1e-6),
        Check::close("equator_south_value_mod_1_error", south.value_mod_1, 0.5, 1e-6),
        Check::at_most("north_south_integrality_gap", gap.gap, 1e-6),
        Check::close("north_south_integer_error", gap.integer as f64, 1.0, 0.0),
    ])
}

fn rotation_hamiltonian_checks() -> Result<Vec<Check>> {
    let f = |t: f64| sphere_rotation_hamiltonian(t).unwrap_or(f64::NAN);
    // ∫ f ω with ω = sinθ/(4π) dθ∧dφ, integrated over φ analytically
    let mass = midpoint(|t| f(t) * t.sin() * 0.5, 0.0, PI, 2000);
    Ok(vec![
        Check::close("north_pole_value_error", f(0.0), 0.5, 1e-8),
        Check::close("south_pole_value_error", f(PI), -0.5, 1e-8),
        Check::at_most("equator_value", f(0.5 * PI).abs(), 1e-10),
        Check::at_most("zero_integral", mass.abs(), 1e-6),
    ])
}

/// Flow of the unit circle: checks on center displacement, circle fit and
/// length drift after `T = 0.1`.
fn circle_flow(prefix: &str, substeps: usize) -> Vec<Check> {
    let names = ["center_displacement_error", "circle_rms", "relative_length_drift"].map(|n| format!("{prefix}_{n}"));
    let tol = [1e-4, 1e-4, 1e-6];
    let run = || -> Result<[f64; 3]> {
        let l = circle(AmbientSpace::Euclidean3, Vec3::zeros(), 1.0, 256)?;
        let config = FlowConfig { substeps, ..FlowConfig::rk4(1e-3, 100) };
        let traj = flow::run(l, &config)?;
        let (first, last) = (&traj.diagnostics[0], traj.diagnostics.last().expect("final diagnostics"));
        let shift = Vec3::from(last.center_of_mass) - Vec3::from(first.center_of_mass);
        Ok([(shift - 0.1 * Vec3::z()).norm(), fit_circle(&traj.last().loop_).3, last.relative_length_drift])
    };
    match run() {
        Ok(v) => (0..3).map(|k| Check::at_most(names[k].clone(), v[k], tol[k])).collect(),
        Err(_) => (0..3).map(|k| Check::failed(names[k].clone(), tol[k])).collect(),
    }
}

fn circle_translation_checks() -> Result<Vec<Check>> {
    // explicit RK4 at dt = 1e-3 is outside its stability region for the
    // highest mode of the 256-gon; four sub-steps bring it inside
    let mut checks = circle_flow("dt1e-3", 1);
    checks.extend(circle_flow("substeps4", 4));
    Ok(checks)
}

fn gradient_checks() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    type Fixture = fn(usize) -> Result<DiscreteLoop>;
    let fixtures: [(&str, Fixture); 2] = [
        ("circle", |n| circle(AmbientSpace::Euclidean3, Vec3::zeros(), 1.0, n)),
        ("ellipse", |n| ellipse(AmbientSpace::Euclidean3, Vec3::new(0.1, -0.2, 0.3), 1.5, 0.8, n)),
    ];
    for (name, make) in fixtures {
        let r = [64, 128, 256].iter().map(|&n| gradient_residual(&make(n)?, 4, 11)).collect::<Result<Vec<f64>>>()?;
        checks.push(Check::at_least(format!("{name}_order"), min_order(&r), 1.9));
        checks.push(Check::at_most(format!("{name}_residual_n256"), r[2], 1e-3));
    }
    Ok(checks)
}

fn moment_checks() -> Result<Vec<Check>> {
    let x = exact("abc_111")?;
    let r = [64, 128, 256]
        .iter()
        .map(|&n| {
            let l = wavy_torus_loop(torus(), Axis::Z, [0.3, 0.2], [0.08, 0.05], n)?;
            let b = torus_loop(torus(), Axis::Z, [0.5, 0.5], n)?;
            hamiltonian_residual(&l, &x, &b, 4, 5)
        })
        .collect::<Result<Vec<f64>>>()?;
    // straight z-loop at (x0, y0) moved along e1: d/dx0 ∫ A_z dz = −sin(2πx0)
    let x0 = 0.3;
    let l = torus_loop(torus(), Axis::Z, [x0, 0.2], 512)?;
    let b = torus_loop(torus(), Axis::Z, [0.5, 0.5], 512)?;
    let y = NormalSection::new(&l, vec![Vec3::x(); 512])?;
    let closed = -(2.0 * PI * x0).sin();
    let omega = mw_symplectic(&l, &crate::loops::fundamental_section(x.field(), &l)?, &y)?;
    let dmu = crate::flow::directional_derivative(&l, &y, |m| moment(m, &x, &b))?;
    Ok(vec![
        Check::at_least("hamiltonian_residual_order", min_order(&r), 1.9),
        Check::close("closed_form_dmu_error", dmu, closed, 1e-5),
        Check::close("closed_form_omega_error", omega, closed, 1e-5),
    ])
}

/// Straight closed geodesic of the unit torus in direction `(1, 1, 1)`.
pub fn diagonal_loop(n: usize) -> Result<DiscreteLoop> {
    let p0 = Vec3::new(0.13, 0.41, 0.07);
    DiscreteLoop::new(torus(), (0..n).map(|i| p0 + Vec3::repeat(i as f64 / n as f64)).collect())
}

fn cocycle_checks() -> Result<Vec<Check>> {
    let names = ["abc_111", "abc_123", "mode_x_dy", "mode_x_dz", "mode_y_dx", "mode_y_dz", "mode_z_dx", "mode_z_dy"];
    let fields = names.iter().map(|n| exact(n)).collect::<Result<Vec<_>>>()?;
    let worst_over_triples = |base: &DiscreteLoop| -> Result<(f64, f64)> {
        let (mut antisym, mut jacobi) = (0.0f64, 0.0f64);
        for i in 0..fields.len() {
            for j in 0..fields.len() {
                antisym = antisym.max((cocycle_c(base, &fields[i], &fields[j])? + cocycle_c(base, &fields[j], &fields[i])?).abs());
                if i < j {
                    for k in (j + 1)..fields.len() {
                        jacobi = jacobi.max(cocycle_identity_residual(base, &fields[i], &fields[j], &fields[k])?);
                    }
                }
            }
        }
        Ok((antisym, jacobi))
    };
    let (antisym, jacobi) = worst_over_triples(&diagonal_loop(1024)?)?;
    // on a curved loop the cyclic sum is the quadrature error of an exact
    // 1-form, so it only decays at the order of the vertex rule
    let wavy = [256, 512, 1024]
        .iter()
        .map(|&n| Ok(worst_over_triples(&wavy_torus_loop(torus(), Axis::Z, [0.4, 0.3], [0.1, 0.07], n)?)?.1))
        .collect::<Result<Vec<f64>>>()?;
    let base = wavy_torus_loop(torus(), Axis::Z, [0.4, 0.3], [0.1, 0.07], 2048)?;
    let probes = [([0.1, 0.2], [0.05, 0.1]), ([0.7, 0.4], [0.12, 0.0]), ([0.25, 0.8], [0.0, 0.09]), ([0.55, 0.55], [0.1, 0.1]), ([0.9, 0.1], [0.03, 0.06])]
        .iter()
        .map(|(o, a)| wavy_torus_loop(torus(), Axis::Z, *o, *a, 2048))
        .collect::<Result<Vec<_>>>()?;
    let constancy = cocycle_formula_constancy(&base, &fields[0], &fields[2], &probes)?;
    let z_loop = torus_loop(torus(), Axis::Z, [0.3, 0.6], 1024)?;
    let fixture = cocycle_c(&z_loop, &exact("mode_z_dy")?, &exact("mode_z_dx")?)?;
    Ok(vec![
        Check::at_most("antisymmetry", antisym, 0.0),
        Check::at_most("cocycle_identity_residual", jacobi, 1e-8),
        Check::at_least("cocycle_identity_curved_loop_order", min_order(&wavy), 1.9),
        Check::at_most("formula_constancy_spread", constancy.spread, 1e-5),
        Check::close("two_pi_squared_fixture_error", fixture, 2.0 * PI * PI, 1e-4),
    ])
}

fn scaled_mode(k: [i32; 3], phase: f64) -> Result<ExactDivFreeField> {
    ExactDivFreeField::new(catalog::trig_mode(torus(), k, Vec3::new(0.0, 0.0, 0.5 / PI), phase)?)
}

fn iso_checks() -> Result<Vec<Check>> {
    let (p0, p1) = ([0.2, 0.3], [0.45, 0.42]);
    let n = 256;
    let base = torus_loop(torus(), Axis::Z, p0, n)?;
    let top = torus_loop(torus(), Axis::Z, p1, n)?;
    let line = |p: [f64; 2]| move |v: f64| Vec3::new(p[0], p[1], v);
    let b = Bordism::cylinder(torus(), 128, 128, line(p0), line(p1))?;
    let x = scaled_mode([1, 0, 0], 0.0)?;
    let y = scaled_mode([0, 1, 0], 0.3)?;
    let iso = iso_check(&base, &top, &b, &x, &y)?;
    let stokes = (lambda0(&b, &x)? + moment(&top, &x, &base)?).abs();
    Ok(vec![
        Check::at_most("iso_residual", iso, 1e-4),
        Check::at_most("stokes_lambda0_plus_moment", stokes, 1e-4),
        Check::at_most("bordism_boundary_mismatch", b.boundary_mismatch(&base, &top), 1e-12),
    ])
}

/// Wiggled filling between two closed paths of z-loops, each translated
/// once around the x-period, at `y = 0.3` and `y = 0.5`. With `extra_sweep`
/// the filling also wraps once around the y-period; its faces agree with
/// the plain filling as chains on the torus.
pub fn torus_filling(extra_sweep: bool, resolution: usize) -> Result<SweepMap> {
    let tau = 2.0 * PI;
    let id = if extra_sweep { "wiggled+sweep" } else { "wiggled" };
    SweepMap::new(torus(), id, [resolution; 3], move |s, t, h| {
        let w = s * (1.0 - s);
        let y = 0.3 + 0.2 * s + 0.4 * w * (tau * h).sin() + if extra_sweep { s } else { 0.0 };
        Vec3::new(0.2 + t + 0.3 * w * (tau * t).sin(), y, h + 0.2 * w * (tau * (t + h)).sin())
    })
}

fn integrality_checks() -> Result<Vec<Check>> {
    let vol = DifferentialForm::volume(torus())?;
    let a = torus_filling(false, 64)?;
    let b = torus_filling(true, 64)?;
    let gap = integrality_gap(&b, &a, &vol)?;
    let whole = chain_integral(&a, &vol)?;
    let halves = chain_integral(&a.restrict_s(0.0, 0.5, 32)?, &vol)? + chain_integral(&a.restrict_s(0.5, 1.0, 32)?, &vol)?;
    Ok(vec![
        Check::at_most("double_filling_gap", gap.gap, 1e-4),
        Check::at_least("double_filling_integer_magnitude", gap.integer.abs() as f64, 1.0),
        Check::at_most("subdivision_additivity", (whole - halves).abs(), 1e-10),
    ])
}

fn tilde_checks() -> Result<Vec<Check>> {
    let l = trefoil(torus(), Vec3::new(0.5, 0.5, 0.5), 0.1, 200)?;
    let compat = compatibility_residual(&l, 8, 21)?;
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(22);
    let mut antisym = 0.0f64;
    for _ in 0..8 {
        let y1 = crate::loops::random_section(&l, &mut rng)?;
        let y2 = crate::loops::random_section(&l, &mut rng)?;
        let scale = mw_symplectic(&l, &y1, &y2)?.abs().max(1e-300);
        antisym = antisym.max((mw_symplectic(&l, &y1, &y2)? + mw_symplectic(&l, &y2, &y1)?).abs() / scale);
    }
    let x = catalog::field("abc_123", torus())?;
    let contraction = contraction_check(&x, &DifferentialForm::wavy_density(torus())?, &l, 8, 23)?;
    let phi = catalog::diffeo("triangular_shear", torus())?;
    let alpha = DifferentialForm::wavy_density(torus())?;
    let r = [64, 128, 256]
        .iter()
        .map(|&n| pullback_check(&phi, &alpha, &wavy_torus_loop(torus(), Axis::Z, [0.3, 0.4], [0.1, 0.05], n)?, 2, 24))
        .collect::<Result<Vec<f64>>>()?;
    Ok(vec![
        Check::at_most("symplectic_antisymmetry_relative", antisym, 1e-12),
        Check::at_most("compatibility_relative", compat, 1e-12),
        Check::at_most("contraction_identity", contraction, 1e-12),
        Check::at_least("pullback_residual_order", min_order(&r), 1.9),
    ])
}

/// Non-planar fixture for the conservation checks.
pub fn conservation_loop(n: usize) -> Result<DiscreteLoop> {
    trefoil(AmbientSpace::Euclidean3, Vec3::zeros(), 1.5, n)
}

fn conservation_checks() -> Result<Vec<Check>> {
    let l = conservation_loop(256)?;
    let config = FlowConfig::rk4(1e-3, 500);
    let traj = flow::run(l.clone(), &config)?;
    let last = traj.diagnostics.last().ok_or(Error::NonFinite("diagnostics"))?;
    let s0 = FlowState::new(l.clone());
    let shifted = FlowState::new(l.rotated(37));
    let a = flow::step(&s0, &config)?.loop_.rotated(37);
    let b = flow::step(&shifted, &config)?.loop_;
    let relabel = a.vertices().iter().zip(b.vertices()).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
    Ok(vec![
        Check::at_most("relative_length_drift", last.relative_length_drift, 1e-5),
        Check::at_most("arc_density_drift", last.max_dual_length_drift, 1e-4),
        Check::at_most("relabeling_equivariance", relabel, 1e-12),
    ])
}
