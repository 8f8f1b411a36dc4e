use std::fmt;
use std::sync::Arc;

use super::map::{hessian_dot, SharedMap, VectorMap};
use super::space::{AmbientSpace, Mat3, Vec3};
use crate::error::{Error, Result};

/// A vector field given in closed form together with its exact Jacobian.
///
/// An optional potential `A` (stored through its metric dual vector field)
/// certifies that the field is exact divergence-free: `dA = i_X vol`, which
/// for the flat metric reads `X = curl A`.
#[derive(Clone)]
pub struct AnalyticVectorField {
    space: AmbientSpace,
    map: SharedMap,
    potential: Option<SharedMap>,
    label: String,
}

impl fmt::Debug for AnalyticVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticVectorField").field("label", &self.label).field("space", &self.space).field("has_potential", &self.potential.is_some()).finish()
    }
}

impl AnalyticVectorField {
    pub fn new(space: AmbientSpace, label: impl Into<String>, map: SharedMap) -> Result<Self> {
        if space.dimension() != 3 {
            return Err(Error::UnsupportedSpace("vector fields"));
        }
        Ok(Self { space, map, potential: None, label: label.into() })
    }

    pub fn with_potential(mut self, potential: SharedMap) -> Self {
        self.potential = Some(potential);
        self
    }

    /// A field defined as the curl of the given potential.
    pub fn from_potential(space: AmbientSpace, label: impl Into<String>, potential: SharedMap) -> Result<Self> {
        let curl = Arc::new(Curl(potential.clone()));
        Ok(Self::new(space, label, curl)?.with_potential(potential))
    }

    pub fn zero(space: AmbientSpace) -> Result<Self> {
        Self::from_potential(space, "zero", Arc::new(Zero))
    }

    pub fn space(&self) -> AmbientSpace {
        self.space
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn relabel(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn map(&self) -> &SharedMap {
        &self.map
    }

    pub fn potential(&self) -> Option<&SharedMap> {
        self.potential.as_ref()
    }

    pub fn eval(&self, p: &Vec3) -> Vec3 {
        self.map.value(&self.space.reduce(p))
    }

    pub fn jacobian(&self, p: &Vec3) -> Mat3 {
        self.map.jacobian(&self.space.reduce(p))
    }

    pub fn hessian(&self, p: &Vec3) -> [Mat3; 3] {
        self.map.hessian(&self.space.reduce(p))
    }

    pub fn divergence(&self, p: &Vec3) -> f64 {
        self.jacobian(p).trace()
    }

    /// Metric dual of the potential 1-form at `p`.
    pub fn potential_at(&self, p: &Vec3) -> Result<Vec3> {
        self.potential.as_ref().map(|a| a.value(&self.space.reduce(p))).ok_or_else(|| Error::MissingPotential(self.label.clone()))
    }

    /// `|X − curl A|` at `p`.
    pub fn curl_defect(&self, p: &Vec3) -> Result<f64> {
        let a = self.potential.as_ref().ok_or_else(|| Error::MissingPotential(self.label.clone()))?;
        let q = self.space.reduce(p);
        Ok((self.map.value(&q) - curl_of(&a.jacobian(&q))).norm())
    }
}

/// Curl from a Jacobian `J[(i, j)] = ∂_j a_i`.
pub fn curl_of(j: &Mat3) -> Vec3 {
    Vec3::new(j[(2, 1)] - j[(1, 2)], j[(0, 2)] - j[(2, 0)], j[(1, 0)] - j[(0, 1)])
}

struct Zero;

impl VectorMap for Zero {
    fn value(&self, _: &Vec3) -> Vec3 {
        Vec3::zeros()
    }
    fn jacobian(&self, _: &Vec3) -> Mat3 {
        Mat3::zeros()
    }
    fn hessian(&self, _: &Vec3) -> [Mat3; 3] {
        [Mat3::zeros(); 3]
    }
}

/// `curl A` for a potential with exact Hessian.
struct Curl(SharedMap);

impl VectorMap for Curl {
    fn value(&self, p: &Vec3) -> Vec3 {
        curl_of(&self.0.jacobian(p))
    }

    fn jacobian(&self, p: &Vec3) -> Mat3 {
        // ∂_k (curl a)_i from second derivatives of a
        let h = self.0.hessian(p);
        let mut j = Mat3::zeros();
        for k in 0..3 {
            j[(0, k)] = h[2][(1, k)] - h[1][(2, k)];
            j[(1, k)] = h[0][(2, k)] - h[2][(0, k)];
            j[(2, k)] = h[1][(0, k)] - h[0][(1, k)];
        }
        j
    }
}

/// `[X, Y] = (DY)X − (DX)Y`, so that `[X, Y]f = X(Yf) − Y(Xf)`.
struct Bracket {
    x: SharedMap,
    y: SharedMap,
}

impl VectorMap for Bracket {
    fn value(&self, p: &Vec3) -> Vec3 {
        self.y.jacobian(p) * self.x.value(p) - self.x.jacobian(p) * self.y.value(p)
    }

    fn jacobian(&self, p: &Vec3) -> Mat3 {
        let (xv, yv) = (self.x.value(p), self.y.value(p));
        let (dx, dy) = (self.x.jacobian(p), self.y.jacobian(p));
        hessian_dot(&self.y.hessian(p), &xv) + dy * dx - hessian_dot(&self.x.hessian(p), &yv) - dx * dy
    }
}

/// `Y × X`, the proxy of the 1-form `i_X i_Y vol`.
struct CrossPotential {
    x: SharedMap,
    y: SharedMap,
}

impl VectorMap for CrossPotential {
    fn value(&self, p: &Vec3) -> Vec3 {
        self.y.value(p).cross(&self.x.value(p))
    }

    fn jacobian(&self, p: &Vec3) -> Mat3 {
        let (xv, yv) = (self.x.value(p), self.y.value(p));
        let (dx, dy) = (self.x.jacobian(p), self.y.jacobian(p));
        Mat3::from_columns(&[0, 1, 2].map(|k| dy.column(k).cross(&xv) + yv.cross(&dx.column(k))))
    }
}

/// Lie bracket with the convention `[X, Y] = (DY)X − (DX)Y`.
///
/// When both fields carry potentials the result carries `i_X i_Y vol`
/// (proxy `Y × X`), which satisfies `d(i_X i_Y vol) = i_{[X,Y]} vol` for
/// divergence-free `X`, `Y`.
pub fn lie_bracket(x: &AnalyticVectorField, y: &AnalyticVectorField) -> Result<AnalyticVectorField> {
    if x.space != y.space {
        return Err(Error::SpaceMismatch);
    }
    let map: SharedMap = Arc::new(Bracket { x: x.map.clone(), y: y.map.clone() });
    let mut out = AnalyticVectorField::new(x.space, format!("[{},{}]", x.label, y.label), map)?;
    if x.potential.is_some() && y.potential.is_some() {
        out.potential = Some(Arc::new(CrossPotential { x: x.map.clone(), y: y.map.clone() }));
    }
    Ok(out)
}

/// Negated field; the potential is negated with it.
pub fn negate(x: &AnalyticVectorField) -> AnalyticVectorField {
    struct Neg(SharedMap);
    impl VectorMap for Neg {
        fn value(&self, p: &Vec3) -> Vec3 {
            -self.0.value(p)
        }
        fn jacobian(&self, p: &Vec3) -> Mat3 {
            -self.0.jacobian(p)
        }
        fn hessian(&self, p: &Vec3) -> [Mat3; 3] {
            self.0.hessian(p).map(|h| -h)
        }
    }
    AnalyticVectorField {
        space: x.space,
        map: Arc::new(Neg(x.map.clone())),
        potential: x.potential.as_ref().map(|a| Arc::new(Neg(a.clone())) as SharedMap),
        label: format!("-{}", x.label),
    }
}

/// Integrates `ṗ = X(p)` over time `t` with `steps` classical RK4 steps.
///
/// Points stay in lifted coordinates; call [`AmbientSpace::reduce`] on the
/// result when a fundamental-domain representative is wanted.
pub fn flow_point(x: &AnalyticVectorField, t: f64, p: &Vec3, steps: usize) -> Result<Vec3> {
    if steps == 0 {
        return Err(Error::InvalidParameter("flow_point needs at least one step".into()));
    }
    let h = t / steps as f64;
    let mut q = *p;
    for _ in 0..steps {
        let k1 = x.eval(&q);
        let k2 = x.eval(&(q + 0.5 * h * k1));
        let k3 = x.eval(&(q + 0.5 * h * k2));
        let k4 = x.eval(&(q + h * k3));
        q += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if !q.iter().all(|c| c.is_finite()) {
            return Err(Error::NonFinite("flow_point"));
        }
    }
    Ok(q)
}
