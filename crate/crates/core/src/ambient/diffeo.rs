use std::fmt;
use std::sync::Arc;

use super::field::AnalyticVectorField;
use super::map::{hessian_dot, Compose, SharedMap, VectorMap};
use super::space::{AmbientSpace, Mat3, Vec3};
use crate::error::{Error, Result};

/// A diffeomorphism with closed-form forward and inverse maps.
///
/// Both maps act on lifted coordinates. On the torus they must commute with
/// the period lattice so that they descend to the quotient.
#[derive(Clone)]
pub struct ClosedFormDiffeo {
    label: String,
    space: AmbientSpace,
    forward: SharedMap,
    inverse: SharedMap,
    volume_preserving: bool,
}

impl fmt::Debug for ClosedFormDiffeo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClosedFormDiffeo").field("label", &self.label).field("space", &self.space).field("volume_preserving", &self.volume_preserving).finish()
    }
}

impl ClosedFormDiffeo {
    pub fn new(space: AmbientSpace, label: impl Into<String>, forward: SharedMap, inverse: SharedMap, volume_preserving: bool) -> Result<Self> {
        if space.dimension() != 3 {
            return Err(Error::UnsupportedSpace("diffeomorphisms"));
        }
        Ok(Self { label: label.into(), space, forward, inverse, volume_preserving })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn space(&self) -> AmbientSpace {
        self.space
    }

    pub fn is_volume_preserving(&self) -> bool {
        self.volume_preserving
    }

    pub fn forward_map(&self) -> &SharedMap {
        &self.forward
    }

    pub fn inverse_map(&self) -> &SharedMap {
        &self.inverse
    }

    pub fn forward(&self, p: &Vec3) -> Vec3 {
        self.forward.value(p)
    }

    pub fn backward(&self, p: &Vec3) -> Vec3 {
        self.inverse.value(p)
    }

    pub fn tangent(&self, p: &Vec3) -> Mat3 {
        self.forward.jacobian(p)
    }

    pub fn inverse(&self) -> ClosedFormDiffeo {
        ClosedFormDiffeo {
            label: format!("{}^-1", self.label),
            space: self.space,
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
            volume_preserving: self.volume_preserving,
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &ClosedFormDiffeo) -> Result<ClosedFormDiffeo> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(ClosedFormDiffeo {
            label: format!("{}.{}", self.label, other.label),
            space: self.space,
            forward: Arc::new(Compose { outer: self.forward.clone(), inner: other.forward.clone() }),
            inverse: Arc::new(Compose { outer: other.inverse.clone(), inner: self.inverse.clone() }),
            volume_preserving: self.volume_preserving && other.volume_preserving,
        })
    }

    /// Largest round-trip error and (if flagged) largest `|det Dφ − 1|` at the
    /// given points.
    pub fn validation_defects(&self, samples: &[Vec3]) -> (f64, f64) {
        let mut round = 0.0f64;
        let mut det = 0.0f64;
        for p in samples {
            round = round.max((self.forward(&self.backward(p)) - p).norm());
            round = round.max((self.backward(&self.forward(p)) - p).norm());
            if self.volume_preserving {
                det = det.max((self.tangent(p).determinant() - 1.0).abs());
            }
        }
        (round, det)
    }
}

/// `q ↦ Dφ(p) X(p)` with `p = φ⁻¹(q)`.
struct Pushforward {
    forward: SharedMap,
    inverse: SharedMap,
    field: SharedMap,
}

impl VectorMap for Pushforward {
    fn value(&self, q: &Vec3) -> Vec3 {
        let p = self.inverse.value(q);
        self.forward.jacobian(&p) * self.field.value(&p)
    }

    fn jacobian(&self, q: &Vec3) -> Mat3 {
        let p = self.inverse.value(q);
        let x = self.field.value(&p);
        let d = hessian_dot(&self.forward.hessian(&p), &x) + self.forward.jacobian(&p) * self.field.jacobian(&p);
        d * self.inverse.jacobian(q)
    }
}

/// Pullback of a covector proxy, `q ↦ Dψ(q)ᵀ a(ψ(q))`.
pub(crate) struct PullbackCovector {
    pub map: SharedMap,
    pub covector: SharedMap,
}

impl VectorMap for PullbackCovector {
    fn value(&self, q: &Vec3) -> Vec3 {
        self.map.jacobian(q).transpose() * self.covector.value(&self.map.value(q))
    }

    fn jacobian(&self, q: &Vec3) -> Mat3 {
        let p = self.map.value(q);
        let a = self.covector.value(&p);
        let d = self.map.jacobian(q);
        let h = self.map.hessian(q);
        let mut j = d.transpose() * self.covector.jacobian(&p) * d;
        for (i, hi) in h.iter().enumerate() {
            j += a[i] * hi;
        }
        j
    }
}

/// `φ_* X = Tφ ∘ X ∘ φ⁻¹`.
///
/// For volume-preserving φ a potential `A` of `X` is carried along as
/// `(φ⁻¹)*A`, since `i_{φ_*X} vol = (φ⁻¹)*(i_X vol)`.
pub fn pushforward_field(phi: &ClosedFormDiffeo, x: &AnalyticVectorField) -> Result<AnalyticVectorField> {
    if phi.space != x.space() {
        return Err(Error::SpaceMismatch);
    }
    let map: SharedMap = Arc::new(Pushforward { forward: phi.forward.clone(), inverse: phi.inverse.clone(), field: x.map().clone() });
    let mut out = AnalyticVectorField::new(x.space(), format!("{}_*{}", phi.label, x.label()), map)?;
    if let (true, Some(a)) = (phi.volume_preserving, x.potential()) {
        out = out.with_potential(Arc::new(PullbackCovector { map: phi.inverse.clone(), covector: a.clone() }));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::catalog;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn samples(n: usize, seed: u64) -> Vec<Vec3> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| Vec3::new(rng.random_range(-1.0..2.0), rng.random_range(-1.0..2.0), rng.random_range(-1.0..2.0))).collect()
    }

    #[test]
    fn catalog_diffeos_are_valid() {
        let pts = samples(1000, 1);
        for space in [AmbientSpace::unit_torus(), AmbientSpace::Euclidean3] {
            for name in catalog::diffeo_names() {
                let Ok(phi) = catalog::diffeo(name, space) else { continue };
                let (round, det) = phi.validation_defects(&pts);
                assert!(round < 1e-10, "{name}: round trip {round}");
                assert!(det < 1e-10, "{name}: det {det}");
            }
        }
    }

    #[test]
    fn identity_and_translation_fix_fields() {
        let s = AmbientSpace::unit_torus();
        let x = catalog::field("abc_111", s).unwrap();
        let id = catalog::diffeo("identity", s).unwrap();
        let px = pushforward_field(&id, &x).unwrap();
        let c = catalog::field("mode_x_dy", s).unwrap();
        let tr = catalog::translation(s, Vec3::new(0.3, 0.1, -0.2)).unwrap();
        let e = AnalyticVectorField::from_potential(
            AmbientSpace::Euclidean3,
            "e3",
            catalog::field("translation_e3", AmbientSpace::Euclidean3).unwrap().potential().unwrap().clone(),
        )
        .unwrap();
        let tre = catalog::translation(AmbientSpace::Euclidean3, Vec3::new(1.0, 2.0, 3.0)).unwrap();
        let pe = pushforward_field(&tre, &e).unwrap();
        for p in samples(20, 2) {
            assert!((px.eval(&p) - x.eval(&p)).norm() < 1e-14);
            assert!((pe.eval(&p) - Vec3::z()).norm() < 1e-14);
            let q = tr.forward(&p);
            assert!((pushforward_field(&tr, &c).unwrap().eval(&q) - c.eval(&p)).norm() < 1e-12);
        }
    }

    #[test]
    fn shear_pushes_e1_to_e1_plus_fprime_e2() {
        let s = AmbientSpace::Euclidean3;
        let e1 = AnalyticVectorField::new(
            s,
            "e1",
            crate::ambient::map::JetMap::shared(|_| {
                use crate::ambient::map::jc;
                [jc(1.0), jc(0.0), jc(0.0)]
            }),
        )
        .unwrap();
        let amp = 0.1;
        let phi = catalog::shear(s, amp).unwrap();
        let pushed = pushforward_field(&phi, &e1).unwrap();
        for p in samples(50, 3) {
            let expected = Vec3::new(1.0, amp * 2.0 * PI * (2.0 * PI * p.x).cos(), 0.0);
            assert!((pushed.eval(&p) - expected).norm() < 1e-13);
        }
    }

    #[test]
    fn pushforward_is_functorial() {
        let s = AmbientSpace::unit_torus();
        let x = catalog::field("abc_123", s).unwrap();
        let phi = catalog::diffeo("shear", s).unwrap();
        let psi = catalog::diffeo("triangular_shear", s).unwrap();
        let lhs = pushforward_field(&phi.compose(&psi).unwrap(), &x).unwrap();
        let rhs = pushforward_field(&phi, &pushforward_field(&psi, &x).unwrap()).unwrap();
        for p in samples(100, 4) {
            assert!((lhs.eval(&p) - rhs.eval(&p)).norm() < 1e-8);
            assert!((lhs.jacobian(&p) - rhs.jacobian(&p)).norm() < 1e-8);
        }
    }

    #[test]
    fn pushforward_jacobian_and_potential_are_consistent() {
        let s = AmbientSpace::unit_torus();
        let x = catalog::field("abc_111", s).unwrap();
        let phi = catalog::diffeo("triangular_shear", s).unwrap();
        let y = pushforward_field(&phi, &x).unwrap();
        let h = 1e-6;
        for p in samples(30, 5) {
            let j = y.jacobian(&p);
            for k in 0..3 {
                let e = Vec3::ith(k, h);
                let fd = (y.eval(&(p + e)) - y.eval(&(p - e))) / (2.0 * h);
                assert!((fd - j.column(k)).norm() < 1e-6 * (1.0 + fd.norm()));
            }
            assert!(y.curl_defect(&p).unwrap() < 1e-10);
            assert!(y.divergence(&p).abs() < 1e-10);
        }
    }
}
