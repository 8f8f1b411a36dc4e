//! Named vector fields and diffeomorphisms used by tests and scenarios.
//!
//! Trigonometric fields on the torus use wavenumbers `2π/pᵢ` so that they
//! are periodic for any period vector; off the torus the periods are taken
//! to be 1.

use std::f64::consts::PI;
use std::sync::Arc;

use num_dual::DualNum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::diffeo::ClosedFormDiffeo;
use super::field::AnalyticVectorField;
use super::map::{jc, Jet, Jet3, JetMap};
use super::space::{AmbientSpace, Vec3};
use crate::error::{Error, Result};

/// Catalog entry: name and one-line parameter documentation.
pub type Entry = (&'static str, &'static str);

pub const FIELDS: &[Entry] = &[
    ("abc_111", "ABC flow with A = B = C = 1; potential X/2π (unit torus Beltrami field)"),
    ("abc_123", "ABC flow with A = 1, B = 2, C = 3"),
    ("mode_x_dy", "potential sin(2πx) dy, field 2π cos(2πx) e3"),
    ("mode_x_dz", "potential sin(2πx) dz, field -2π cos(2πx) e2"),
    ("mode_y_dx", "potential sin(2πy) dx, field -2π cos(2πy) e3"),
    ("mode_y_dz", "potential sin(2πy) dz, field 2π cos(2πy) e1"),
    ("mode_z_dx", "potential sin(2πz) dx, field 2π cos(2πz) e2"),
    ("mode_z_dy", "potential sin(2πz) dy, field -2π cos(2πz) e1"),
    ("rigid_rotation_z", "(-y, x, 0), potential -(x²+y²)/2 dz; Euclidean only"),
    ("translation_e3", "constant e3, potential (x dy - y dx)/2; Euclidean only"),
    ("zero", "the zero field"),
];

pub const DIFFEOS: &[Entry] = &[
    ("identity", "the identity map"),
    ("rotation_z", "rotation by 0.7 rad about the z-axis; Euclidean only"),
    ("scaling", "(1.5x, y, z), not volume-preserving; Euclidean only"),
    ("shear", "(x, y + 0.1 sin(2πx), z)"),
    ("translation", "p + (0.25, 0.1, 0.05)"),
    ("triangular_shear", "(x, y + 0.1 sin(2πx), z + 0.05 cos(2π(x + y)))"),
];

pub fn field_names() -> impl Iterator<Item = &'static str> {
    FIELDS.iter().map(|e| e.0)
}

pub fn diffeo_names() -> impl Iterator<Item = &'static str> {
    DIFFEOS.iter().map(|e| e.0)
}

fn wavenumbers(space: AmbientSpace) -> [f64; 3] {
    match space {
        AmbientSpace::FlatTorus3 { periods } => periods.map(|p| 2.0 * PI / p),
        _ => [2.0 * PI; 3],
    }
}

fn euclidean_only(space: AmbientSpace, what: &'static str) -> Result<()> {
    if space == AmbientSpace::Euclidean3 {
        Ok(())
    } else {
        Err(Error::UnsupportedSpace(what))
    }
}

/// Looks up a named exact divergence-free field.
pub fn field(name: &str, space: AmbientSpace) -> Result<AnalyticVectorField> {
    let f = match name {
        "abc_111" => abc(space, [1.0, 1.0, 1.0])?,
        "abc_123" => abc(space, [1.0, 2.0, 3.0])?,
        "mode_x_dy" => coordinate_mode(space, 0, 1)?,
        "mode_x_dz" => coordinate_mode(space, 0, 2)?,
        "mode_y_dx" => coordinate_mode(space, 1, 0)?,
        "mode_y_dz" => coordinate_mode(space, 1, 2)?,
        "mode_z_dx" => coordinate_mode(space, 2, 0)?,
        "mode_z_dy" => coordinate_mode(space, 2, 1)?,
        "rigid_rotation_z" => {
            euclidean_only(space, "rigid_rotation_z")?;
            AnalyticVectorField::new(space, name, JetMap::shared(|x: &Jet3| [-x[1], x[0], jc(0.0)]))?
                .with_potential(JetMap::shared(|x: &Jet3| [jc(0.0), jc(0.0), (x[0] * x[0] + x[1] * x[1]) * -0.5]))
        }
        "translation_e3" => {
            euclidean_only(space, "translation_e3")?;
            AnalyticVectorField::new(space, name, JetMap::shared(|_: &Jet3| [jc(0.0), jc(0.0), jc(1.0)]))?
                .with_potential(JetMap::shared(|x: &Jet3| [x[1] * -0.5, x[0] * 0.5, jc(0.0)]))
        }
        "zero" => AnalyticVectorField::zero(space)?,
        _ => return Err(Error::InvalidParameter(format!("unknown field `{name}`"))),
    };
    Ok(f.relabel(name))
}

/// ABC field `(A sin kz + C cos ky, B sin kx + A cos kz, C sin ky + B cos kx)`
/// with potential `X/k` (exact for equal wavenumbers).
pub fn abc(space: AmbientSpace, [a, b, c]: [f64; 3]) -> Result<AnalyticVectorField> {
    let k = wavenumbers(space);
    if k.iter().any(|ki| (ki - k[0]).abs() > 1e-12 * k[0]) {
        return Err(Error::UnsupportedSpace("ABC fields on a torus with unequal periods"));
    }
    let kk = k[0];
    let x = move |x: &Jet3| -> Jet3 {
        let (sx, cx) = ((x[0] * kk).sin(), (x[0] * kk).cos());
        let (sy, cy) = ((x[1] * kk).sin(), (x[1] * kk).cos());
        let (sz, cz) = ((x[2] * kk).sin(), (x[2] * kk).cos());
        [sz * a + cy * c, sx * b + cz * a, sy * c + cx * b]
    };
    let pot = move |p: &Jet3| -> Jet3 { x(p).map(|v| v / kk) };
    Ok(AnalyticVectorField::new(space, format!("abc({a},{b},{c})"), JetMap::shared(x))?.with_potential(JetMap::shared(pot)))
}

/// Potential `sin(k_i xᵢ) dxⱼ`.
fn coordinate_mode(space: AmbientSpace, i: usize, j: usize) -> Result<AnalyticVectorField> {
    let mut k = [0i32; 3];
    k[i] = 1;
    trig_mode(space, k, Vec3::ith(j, 1.0), 0.0)
}

/// Potential `u sin(θ)` with phase `θ = Σ kᵢ ωᵢ xᵢ + phase`; the field is
/// `cos(θ) (ω⊙k) × u`.
pub fn trig_mode(space: AmbientSpace, k: [i32; 3], u: Vec3, phase: f64) -> Result<AnalyticVectorField> {
    let w = wavenumbers(space);
    let kw = Vec3::new(k[0] as f64 * w[0], k[1] as f64 * w[1], k[2] as f64 * w[2]);
    let dir = kw.cross(&u);
    let theta = move |x: &Jet3| -> Jet { x[0] * kw.x + x[1] * kw.y + x[2] * kw.z + phase };
    let field = move |x: &Jet3| -> Jet3 {
        let c = theta(x).cos();
        [c * dir.x, c * dir.y, c * dir.z]
    };
    let pot = move |x: &Jet3| -> Jet3 {
        let s = theta(x).sin();
        [s * u.x, s * u.y, s * u.z]
    };
    Ok(AnalyticVectorField::new(space, format!("mode({k:?})"), JetMap::shared(field))?.with_potential(JetMap::shared(pot)))
}

/// Sum of `modes` random trigonometric modes with integer wavevectors in
/// `[-2, 2]³`, reproducible from `seed`.
pub fn random_trig_field(space: AmbientSpace, seed: u64, modes: usize) -> Result<AnalyticVectorField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut terms = Vec::with_capacity(modes);
    while terms.len() < modes {
        let k = [rng.random_range(-2..=2), rng.random_range(-2..=2), rng.random_range(-2..=2)];
        if k == [0, 0, 0] {
            continue;
        }
        let u = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let phase = rng.random_range(0.0..2.0 * PI);
        terms.push(trig_mode(space, k, u, phase)?);
    }
    sum(space, &terms, format!("trig(seed={seed},modes={modes})"))
}

/// Sum of fields, with the sum of potentials when every term has one.
pub fn sum(space: AmbientSpace, terms: &[AnalyticVectorField], label: String) -> Result<AnalyticVectorField> {
    use super::map::{SharedMap, VectorMap};
    use super::space::Mat3;
    struct Sum(Vec<SharedMap>);
    impl VectorMap for Sum {
        fn value(&self, p: &Vec3) -> Vec3 {
            self.0.iter().map(|m| m.value(p)).sum()
        }
        fn jacobian(&self, p: &Vec3) -> Mat3 {
            self.0.iter().map(|m| m.jacobian(p)).sum()
        }
        fn hessian(&self, p: &Vec3) -> [Mat3; 3] {
            let mut h = [Mat3::zeros(); 3];
            for m in &self.0 {
                for (a, b) in h.iter_mut().zip(m.hessian(p)) {
                    *a += b;
                }
            }
            h
        }
    }
    if terms.iter().any(|t| t.space() != space) {
        return Err(Error::SpaceMismatch);
    }
    let map = Arc::new(Sum(terms.iter().map(|t| t.map().clone()).collect()));
    let out = AnalyticVectorField::new(space, label, map)?;
    let pots: Option<Vec<SharedMap>> = terms.iter().map(|t| t.potential().cloned()).collect();
    Ok(match pots {
        Some(p) => out.with_potential(Arc::new(Sum(p))),
        None => out,
    })
}

/// Looks up a named diffeomorphism.
pub fn diffeo(name: &str, space: AmbientSpace) -> Result<ClosedFormDiffeo> {
    match name {
        "identity" => translation(space, Vec3::zeros()).map(|d| relabel(d, name)),
        "translation" => translation(space, Vec3::new(0.25, 0.1, 0.05)),
        "shear" => shear(space, 0.1),
        "triangular_shear" => triangular_shear(space, 0.1, 0.05),
        "rotation_z" => rotation_z(space, 0.7),
        "scaling" => {
            euclidean_only(space, "scaling")?;
            ClosedFormDiffeo::new(space, name, JetMap::shared(|x: &Jet3| [x[0] * 1.5, x[1], x[2]]), JetMap::shared(|x: &Jet3| [x[0] / 1.5, x[1], x[2]]), false)
        }
        _ => Err(Error::InvalidParameter(format!("unknown diffeomorphism `{name}`"))),
    }
}

fn relabel(d: ClosedFormDiffeo, name: &str) -> ClosedFormDiffeo {
    ClosedFormDiffeo::new(d.space(), name, d.forward_map().clone(), d.inverse_map().clone(), d.is_volume_preserving()).expect("space already validated")
}

pub fn translation(space: AmbientSpace, c: Vec3) -> Result<ClosedFormDiffeo> {
    ClosedFormDiffeo::new(
        space,
        format!("translate({},{},{})", c.x, c.y, c.z),
        JetMap::shared(move |x: &Jet3| [x[0] + c.x, x[1] + c.y, x[2] + c.z]),
        JetMap::shared(move |x: &Jet3| [x[0] - c.x, x[1] - c.y, x[2] - c.z]),
        true,
    )
}

/// `(x, y + amp sin(ω₁x), z)`.
pub fn shear(space: AmbientSpace, amp: f64) -> Result<ClosedFormDiffeo> {
    let w = wavenumbers(space)[0];
    ClosedFormDiffeo::new(
        space,
        "shear",
        JetMap::shared(move |x: &Jet3| [x[0], x[1] + (x[0] * w).sin() * amp, x[2]]),
        JetMap::shared(move |x: &Jet3| [x[0], x[1] - (x[0] * w).sin() * amp, x[2]]),
        true,
    )
}

/// `(x, y + f(x), z + g(x, y))` with `f = a sin(ω₁x)`,
/// `g = b cos(ω₁x + ω₂y)`.
pub fn triangular_shear(space: AmbientSpace, a: f64, b: f64) -> Result<ClosedFormDiffeo> {
    let w = wavenumbers(space);
    let f = move |x: Jet| (x * w[0]).sin() * a;
    let g = move |x: Jet, y: Jet| (x * w[0] + y * w[1]).cos() * b;
    ClosedFormDiffeo::new(
        space,
        "triangular_shear",
        JetMap::shared(move |x: &Jet3| {
            let y = x[1] + f(x[0]);
            [x[0], y, x[2] + g(x[0], x[1])]
        }),
        JetMap::shared(move |x: &Jet3| {
            let y = x[1] - f(x[0]);
            [x[0], y, x[2] - g(x[0], y)]
        }),
        true,
    )
}

/// Rotation about the z-axis by `angle`.
pub fn rotation_z(space: AmbientSpace, angle: f64) -> Result<ClosedFormDiffeo> {
    euclidean_only(space, "rotation_z")?;
    let (s, c) = angle.sin_cos();
    ClosedFormDiffeo::new(
        space,
        "rotation_z",
        JetMap::shared(move |x: &Jet3| [x[0] * c - x[1] * s, x[0] * s + x[1] * c, x[2]]),
        JetMap::shared(move |x: &Jet3| [x[0] * c + x[1] * s, -x[0] * s + x[1] * c, x[2]]),
        true,
    )
}
