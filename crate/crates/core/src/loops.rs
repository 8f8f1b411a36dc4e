//! Closed oriented polylines, their normal sections and the rotation `J`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ambient::{AmbientSpace, AnalyticVectorField, Vec3};
use crate::error::{Error, Result};

pub const MIN_EDGE: f64 = 1e-12;
/// Orthogonality tolerance for [`NormalSection`].
pub const NORMAL_TOL: f64 = 1e-10;

/// A closed polyline in lifted coordinates. Vertex order fixes the
/// orientation; indices are taken mod `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteLoop {
    vertices: Vec<Vec3>,
    space: AmbientSpace,
}

impl DiscreteLoop {
    pub fn new(space: AmbientSpace, vertices: Vec<Vec3>) -> Result<Self> {
        if space.dimension() != 3 {
            return Err(Error::UnsupportedSpace("discrete loops"));
        }
        let n = vertices.len();
        if n < 3 {
            return Err(Error::TooFewVertices(n));
        }
        if vertices.iter().any(|v| !v.iter().all(|c| c.is_finite())) {
            return Err(Error::NonFinite("loop vertices"));
        }
        let half = space.min_period().map(|p| 0.5 * p);
        for i in 0..n {
            let raw = vertices[(i + 1) % n] - vertices[i];
            let e = space.min_image(&raw);
            let length = e.norm();
            if length <= MIN_EDGE {
                return Err(Error::EdgeTooShort { index: i, length });
            }
            if let Some(h) = half {
                if length >= h {
                    return Err(Error::EdgeTooLong { index: i, length });
                }
                // only the closing edge may jump by a lattice vector
                if i + 1 < n && (raw - e).norm() > 1e-9 * (1.0 + raw.norm()) {
                    return Err(Error::DiscontinuousLift { index: i });
                }
            }
        }
        Ok(Self { vertices, space })
    }

    pub fn space(&self) -> AmbientSpace {
        self.space
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> Vec3 {
        self.vertices[i % self.len()]
    }

    /// `e_i = v_{i+1} − v_i`, as the shortest lattice representative.
    pub fn edge(&self, i: usize) -> Vec3 {
        let n = self.len();
        let i = i % n;
        self.space.min_image(&(self.vertices[(i + 1) % n] - self.vertices[i]))
    }

    pub fn edges(&self) -> Vec<Vec3> {
        (0..self.len()).map(|i| self.edge(i)).collect()
    }

    /// Edge midpoint in lifted coordinates.
    pub fn midpoint(&self, i: usize) -> Vec3 {
        self.vertex(i) + 0.5 * self.edge(i)
    }

    fn prev(&self, i: usize) -> usize {
        (i + self.len() - 1) % self.len()
    }

    /// Lattice vector accumulated by one traversal (zero off the torus and
    /// for contractible torus loops).
    pub fn winding(&self) -> Vec3 {
        self.edges().iter().sum()
    }

    /// Unit central-difference tangent `normalize(v_{i+1} − v_{i−1})`.
    pub fn discrete_tangent(&self, i: usize) -> Result<Vec3> {
        let i = i % self.len();
        let d = self.edge(self.prev(i)) + self.edge(i);
        let norm = d.norm();
        if norm <= MIN_EDGE {
            return Err(Error::DegenerateVertex(i));
        }
        Ok(d / norm)
    }

    pub fn tangents(&self) -> Result<Vec<Vec3>> {
        (0..self.len()).map(|i| self.discrete_tangent(i)).collect()
    }

    /// Vertex quadrature weight `(|e_{i−1}| + |e_i|)/2`.
    pub fn dual_length(&self, i: usize) -> f64 {
        let i = i % self.len();
        0.5 * (self.edge(self.prev(i)).norm() + self.edge(i).norm())
    }

    pub fn dual_lengths(&self) -> Vec<f64> {
        let lens: Vec<f64> = self.edges().iter().map(|e| e.norm()).collect();
        let n = lens.len();
        (0..n).map(|i| 0.5 * (lens[(i + n - 1) % n] + lens[i])).collect()
    }

    pub fn total_length(&self) -> f64 {
        self.edges().iter().map(|e| e.norm()).sum()
    }

    /// Dual-length weighted vertex average.
    pub fn center_of_mass(&self) -> Vec3 {
        let w = self.dual_lengths();
        let total: f64 = w.iter().sum();
        self.vertices.iter().zip(&w).map(|(v, wi)| v * *wi).sum::<Vec3>() / total
    }

    /// Same polyline traversed backwards, starting from the same vertex.
    pub fn reversed(&self) -> Self {
        let mut v = self.vertices.clone();
        v[1..].reverse();
        Self::lift_continuously(self.space, v)
    }

    /// Cyclic relabeling: vertex `k` of the result is vertex `k + shift`.
    pub fn rotated(&self, shift: usize) -> Self {
        let mut v = self.vertices.clone();
        v.rotate_left(shift % self.len());
        Self::lift_continuously(self.space, v)
    }

    /// Image under a vertex map.
    pub fn map_vertices(&self, f: impl Fn(&Vec3) -> Vec3) -> Result<Self> {
        Self::new(self.space, self.vertices.iter().map(f).collect())
    }

    /// Re-lifts so that every interior edge equals its minimal image.
    fn lift_continuously(space: AmbientSpace, mut v: Vec<Vec3>) -> Self {
        for i in 1..v.len() {
            let e = space.min_image(&(v[i] - v[i - 1]));
            v[i] = v[i - 1] + e;
        }
        Self { vertices: v, space }
    }

    /// `v_i + ε Y_i`, revalidated.
    pub fn perturb(&self, y: &NormalSection, eps: f64) -> Result<Self> {
        self.perturb_raw(y.vectors(), eps)
    }

    pub fn perturb_raw(&self, y: &[Vec3], eps: f64) -> Result<Self> {
        check_len(self, y.len())?;
        Self::new(self.space, self.vertices.iter().zip(y).map(|(v, yi)| v + eps * yi).collect())
    }
}

fn check_len(l: &DiscreteLoop, got: usize) -> Result<()> {
    if got == l.len() {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected: l.len(), got })
    }
}

/// Per-vertex vectors orthogonal to the discrete tangent.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalSection {
    vectors: Vec<Vec3>,
}

impl NormalSection {
    /// Checks orthogonality to `NORMAL_TOL` (relative to `max(1, |Yᵢ|)`).
    pub fn new(l: &DiscreteLoop, vectors: Vec<Vec3>) -> Result<Self> {
        check_len(l, vectors.len())?;
        for (i, (y, t)) in vectors.iter().zip(l.tangents()?).enumerate() {
            let component = y.dot(&t);
            if component.abs() > NORMAL_TOL * y.norm().max(1.0) {
                return Err(Error::NotNormal { index: i, component });
            }
        }
        Ok(Self { vectors })
    }

    pub fn zeros(l: &DiscreteLoop) -> Self {
        Self { vectors: vec![Vec3::zeros(); l.len()] }
    }

    pub fn vectors(&self) -> &[Vec3] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { vectors: self.vectors.iter().map(|v| v * s).collect() }
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch { expected: self.len(), got: other.len() });
        }
        Ok(Self { vectors: self.vectors.iter().zip(&other.vectors).map(|(a, b)| a + b).collect() })
    }

    pub fn max_norm(&self) -> f64 {
        self.vectors.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn rotated(&self, shift: usize) -> Self {
        let mut v = self.vectors.clone();
        v.rotate_left(shift % self.len().max(1));
        Self { vectors: v }
    }
}

/// Removes the tangential component at each vertex.
pub fn project_normal(l: &DiscreteLoop, raw: &[Vec3]) -> Result<NormalSection> {
    check_len(l, raw.len())?;
    let t = l.tangents()?;
    Ok(NormalSection { vectors: raw.iter().zip(&t).map(|(y, t)| y - y.dot(t) * t).collect() })
}

/// `ζ_X(N)`: the field sampled at the vertices, projected to the normal plane.
pub fn fundamental_section(x: &AnalyticVectorField, l: &DiscreteLoop) -> Result<NormalSection> {
    if x.space() != l.space() {
        return Err(Error::SpaceMismatch);
    }
    let raw: Vec<Vec3> = l.vertices().iter().map(|v| x.eval(v)).collect();
    project_normal(l, &raw)
}

/// `J Y = t × Y`, the +90° rotation in the normal plane oriented so that
/// `(t, Y, JY)` is right-handed.
pub fn rotate_j(l: &DiscreteLoop, y: &NormalSection) -> Result<NormalSection> {
    check_len(l, y.len())?;
    let t = l.tangents()?;
    Ok(NormalSection { vectors: y.vectors.iter().zip(&t).map(|(y, t)| t.cross(y)).collect() })
}

/// Lenient `J` for raw vectors: projects first and reports whether the
/// input had a tangential component above `NORMAL_TOL`.
pub fn rotate_j_raw(l: &DiscreteLoop, raw: &[Vec3]) -> Result<(NormalSection, bool)> {
    check_len(l, raw.len())?;
    let t = l.tangents()?;
    let projected = raw.iter().zip(&t).any(|(y, t)| y.dot(t).abs() > NORMAL_TOL * y.norm().max(1.0));
    let y = project_normal(l, raw)?;
    Ok((rotate_j(l, &y)?, projected))
}

/// Per-vertex uniform `[-1, 1]³` vectors, projected.
pub fn random_section(l: &DiscreteLoop, rng: &mut impl Rng) -> Result<NormalSection> {
    let raw: Vec<Vec3> = (0..l.len()).map(|_| Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    project_normal(l, &raw)
}

/// A smooth random ambient vector field, used to draw normal sections that
/// are samples of one continuum section across resolutions.
#[derive(Debug, Clone)]
pub struct SmoothProbe {
    terms: Vec<(Vec3, Vec3, f64)>,
}

impl SmoothProbe {
    /// Four modes `u sin(k·x + φ)` with integer wavevectors in `[-1, 1]³`
    /// scaled to the torus periods (period 4 off the torus).
    pub fn new(space: AmbientSpace, seed: u64) -> Self {
        let periods = match space {
            AmbientSpace::FlatTorus3 { periods } => periods,
            _ => [4.0; 3],
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let terms = (0..4)
            .map(|_| {
                let k = Vec3::from_fn(|i, _| 2.0 * PI * rng.random_range(-1..=1) as f64 / periods[i]);
                let u = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                (k, u, rng.random_range(0.0..2.0 * PI))
            })
            .collect();
        Self { terms }
    }

    pub fn eval(&self, p: &Vec3) -> Vec3 {
        self.terms.iter().map(|(k, u, ph)| u * (k.dot(p) + ph).sin()).sum()
    }

    pub fn section(&self, l: &DiscreteLoop) -> Result<NormalSection> {
        let raw: Vec<Vec3> = l.vertices().iter().map(|v| self.eval(v)).collect();
        project_normal(l, &raw)
    }
}

/// Axis for [`torus_loop`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

/// Regular `n`-gon inscribed in the circle of radius `r` in the plane
/// `z = center.z`, counterclockwise seen from `+e₃`.
pub fn circle(space: AmbientSpace, center: Vec3, r: f64, n: usize) -> Result<DiscreteLoop> {
    ellipse(space, center, r, r, n)
}

pub fn ellipse(space: AmbientSpace, center: Vec3, a: f64, b: f64, n: usize) -> Result<DiscreteLoop> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::InvalidParameter("ellipse semi-axes must be positive".into()));
    }
    parametric(space, n, |s| center + Vec3::new(a * s.cos(), b * s.sin(), 0.0))
}

/// Samples `θ ↦ f(θ)` at `θ_i = 2πi/n`.
pub fn parametric(space: AmbientSpace, n: usize, f: impl Fn(f64) -> Vec3) -> Result<DiscreteLoop> {
    DiscreteLoop::new(space, (0..n).map(|i| f(2.0 * PI * i as f64 / n as f64)).collect())
}

/// Straight non-contractible loop along `axis` through the point whose other
/// two coordinates are `offsets` (in increasing axis order).
pub fn torus_loop(space: AmbientSpace, axis: Axis, offsets: [f64; 2], n: usize) -> Result<DiscreteLoop> {
    wavy_torus_loop(space, axis, offsets, [0.0, 0.0], n)
}

/// Like [`torus_loop`] with the two transverse coordinates displaced by
/// `amp · (sin s, sin 2s + cos s − 1)`, `s` the axial angle.
pub fn wavy_torus_loop(space: AmbientSpace, axis: Axis, offsets: [f64; 2], amp: [f64; 2], n: usize) -> Result<DiscreteLoop> {
    let AmbientSpace::FlatTorus3 { periods } = space else {
        return Err(Error::UnsupportedSpace("torus_loop"));
    };
    let a = axis.index();
    let (b, c) = ((a + 1) % 3, (a + 2) % 3);
    let (b, c) = (b.min(c), b.max(c));
    let length = periods[a];
    parametric(space, n, |s| {
        let mut p = Vec3::zeros();
        p[a] = length * s / (2.0 * PI);
        p[b] = offsets[0] + amp[0] * s.sin();
        p[c] = offsets[1] + amp[1] * ((2.0 * s).sin() + s.cos() - 1.0);
        p
    })
}

/// Trefoil knot `(sin s + 2 sin 2s, cos s − 2 cos 2s, −sin 3s)·scale + center`.
pub fn trefoil(space: AmbientSpace, center: Vec3, scale: f64, n: usize) -> Result<DiscreteLoop> {
    parametric(space, n, |s| center + scale * Vec3::new(s.sin() + 2.0 * (2.0 * s).sin(), s.cos() - 2.0 * (2.0 * s).cos(), -(3.0 * s).sin()))
}
