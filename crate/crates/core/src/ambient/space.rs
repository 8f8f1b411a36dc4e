use nalgebra::{Matrix3, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;
/// Chart coordinates `(θ, φ)` on the round sphere, θ the polar angle.
pub type SphereChart = Vector2<f64>;

/// Background manifold. Orientation is the right-handed one in every case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AmbientSpace {
    Euclidean3,
    FlatTorus3 {
        periods: [f64; 3],
    },
    /// Round 2-sphere whose area form has total mass 1.
    Sphere2,
}

impl AmbientSpace {
    pub fn unit_torus() -> Self {
        AmbientSpace::FlatTorus3 { periods: [1.0; 3] }
    }

    pub fn torus(periods: [f64; 3]) -> Result<Self> {
        if periods.iter().all(|p| p.is_finite() && *p > 0.0) {
            Ok(AmbientSpace::FlatTorus3 { periods })
        } else {
            Err(Error::InvalidParameter(format!("torus periods must be positive, got {periods:?}")))
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            AmbientSpace::Sphere2 => 2,
            _ => 3,
        }
    }

    /// Total volume (or area mass for the sphere); `None` for Euclidean space.
    pub fn total_volume(&self) -> Option<f64> {
        match self {
            AmbientSpace::Euclidean3 => None,
            AmbientSpace::FlatTorus3 { periods } => Some(periods.iter().product()),
            AmbientSpace::Sphere2 => Some(1.0),
        }
    }

    pub fn min_period(&self) -> Option<f64> {
        match self {
            AmbientSpace::FlatTorus3 { periods } => Some(periods.iter().cloned().fold(f64::INFINITY, f64::min)),
            _ => None,
        }
    }

    /// Maps a lifted point into the fundamental domain `[0, p₁) × [0, p₂) × [0, p₃)`.
    /// Identity off the torus.
    pub fn reduce(&self, p: &Vec3) -> Vec3 {
        match self {
            AmbientSpace::FlatTorus3 { periods } => Vec3::new(p.x.rem_euclid(periods[0]), p.y.rem_euclid(periods[1]), p.z.rem_euclid(periods[2])),
            _ => *p,
        }
    }

    /// Shortest representative of a displacement modulo the period lattice.
    pub fn min_image(&self, d: &Vec3) -> Vec3 {
        match self {
            AmbientSpace::FlatTorus3 { periods } => Vec3::from_fn(|i, _| {
                let p = periods[i];
                d[i] - p * (d[i] / p).round()
            }),
            _ => *d,
        }
    }

    /// Evaluates the volume form on three vectors. The form is the oriented
    /// determinant, so it integrates to `p₁p₂p₃` over the torus.
    pub fn volume_form(&self, v1: &Vec3, v2: &Vec3, v3: &Vec3) -> Result<f64> {
        match self {
            AmbientSpace::Sphere2 => Err(Error::DegreeMismatch { expected: 2, got: 3 }),
            _ => Ok(det3(v1, v2, v3)),
        }
    }
}

/// `det[v1 v2 v3]`, symmetrized over the first two slots so that swapping
/// them negates the result exactly and `det3(v, v, w) == 0.0`.
#[inline]
pub fn det3(v1: &Vec3, v2: &Vec3, v3: &Vec3) -> f64 {
    0.5 * (v1.dot(&v2.cross(v3)) - v2.dot(&v1.cross(v3)))
}

/// Area form of the mass-1 round sphere in `(θ, φ)` coordinates,
/// `(1/4π) sin θ dθ∧dφ`.
pub fn sphere_area_form(at: &SphereChart, v1: &SphereChart, v2: &SphereChart) -> f64 {
    at.x.sin() / (4.0 * std::f64::consts::PI) * (v1.x * v2.y - v1.y * v2.x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn volume_form_on_basis() {
        let s = AmbientSpace::unit_torus();
        let (e1, e2, e3) = (Vec3::x(), Vec3::y(), Vec3::z());
        assert_eq!(s.volume_form(&e1, &e2, &e3).unwrap(), 1.0);
        assert_eq!(s.volume_form(&e1, &e1, &e3).unwrap(), 0.0);
        assert_eq!(s.volume_form(&e2, &e1, &e3).unwrap(), -1.0);
    }

    #[test]
    fn sphere_rejects_volume_form() {
        let e = Vec3::x();
        assert!(matches!(AmbientSpace::Sphere2.volume_form(&e, &e, &e), Err(Error::DegreeMismatch { .. })));
    }

    #[test]
    fn torus_reduction_and_min_image() {
        let s = AmbientSpace::torus([1.0, 2.0, 0.5]).unwrap();
        let r = s.reduce(&Vec3::new(-0.25, 4.5, 1.2));
        assert!((r - Vec3::new(0.75, 0.5, 0.2)).norm() < 1e-12);
        let d = s.min_image(&Vec3::new(0.9, -1.9, 0.3));
        assert!((d - Vec3::new(-0.1, 0.1, -0.2)).norm() < 1e-12);
        assert_eq!(s.total_volume(), Some(1.0));
        assert!(AmbientSpace::torus([1.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn sphere_area_mass_is_one() {
        let n = 400;
        let h = std::f64::consts::PI / n as f64;
        let mut total = 0.0;
        for i in 0..n {
            let th = (i as f64 + 0.5) * h;
            let at = SphereChart::new(th, 0.0);
            total += sphere_area_form(&at, &SphereChart::new(h, 0.0), &SphereChart::new(0.0, 2.0 * std::f64::consts::PI));
        }
        assert!((total - 1.0).abs() < 1e-5);
    }
}
