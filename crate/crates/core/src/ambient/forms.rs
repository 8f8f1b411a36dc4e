//! Differential forms on three-dimensional ambient spaces.
//!
//! Every k-form on an oriented Riemannian 3-manifold with flat metric has a
//! proxy: a function (k = 0, 3) or a vector field (k = 1, 2). The evaluator
//! uses the proxy, which makes each form alternating by construction:
//!
//! | degree | proxy   | evaluation                     |
//! |--------|---------|--------------------------------|
//! | 0      | `f`     | `f(p)`                         |
//! | 1      | `a`     | `a(p)·v`                       |
//! | 2      | `b`     | `b(p)·(v × w)`                 |
//! | 3      | `ρ`     | `ρ(p) det[u v w]`              |

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use super::diffeo::ClosedFormDiffeo;
use super::field::AnalyticVectorField;
use super::space::{det3, AmbientSpace, Mat3, Vec3};
use crate::error::{Error, Result};

pub type ScalarFn = Arc<dyn Fn(&Vec3) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(&Vec3) -> Vec3 + Send + Sync>;

#[derive(Clone)]
enum Proxy {
    Function(ScalarFn),
    Covector(VectorFn),
    Flux(VectorFn),
    Density(ScalarFn),
}

#[derive(Clone)]
pub struct DifferentialForm {
    space: AmbientSpace,
    proxy: Proxy,
    label: String,
}

impl fmt::Debug for DifferentialForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DifferentialForm").field("label", &self.label).field("degree", &self.degree()).field("space", &self.space).finish()
    }
}

fn check_3d(space: AmbientSpace) -> Result<()> {
    if space.dimension() == 3 {
        Ok(())
    } else {
        Err(Error::UnsupportedSpace("a 3-dimensional differential form"))
    }
}

impl DifferentialForm {
    pub fn function(space: AmbientSpace, label: impl Into<String>, f: impl Fn(&Vec3) -> f64 + Send + Sync + 'static) -> Result<Self> {
        check_3d(space)?;
        Ok(Self { space, proxy: Proxy::Function(Arc::new(f)), label: label.into() })
    }

    /// The 1-form `v ↦ a(p)·v`.
    pub fn covector(space: AmbientSpace, label: impl Into<String>, a: impl Fn(&Vec3) -> Vec3 + Send + Sync + 'static) -> Result<Self> {
        check_3d(space)?;
        Ok(Self { space, proxy: Proxy::Covector(Arc::new(a)), label: label.into() })
    }

    /// The 2-form `(v, w) ↦ b(p)·(v × w)`.
    pub fn flux(space: AmbientSpace, label: impl Into<String>, b: impl Fn(&Vec3) -> Vec3 + Send + Sync + 'static) -> Result<Self> {
        check_3d(space)?;
        Ok(Self { space, proxy: Proxy::Flux(Arc::new(b)), label: label.into() })
    }

    /// The 3-form `ρ(p) vol`.
    pub fn density(space: AmbientSpace, label: impl Into<String>, rho: impl Fn(&Vec3) -> f64 + Send + Sync + 'static) -> Result<Self> {
        check_3d(space)?;
        Ok(Self { space, proxy: Proxy::Density(Arc::new(rho)), label: label.into() })
    }

    /// The volume form of the space.
    pub fn volume(space: AmbientSpace) -> Result<Self> {
        if space == AmbientSpace::Sphere2 {
            return Err(Error::DegreeMismatch { expected: 2, got: 3 });
        }
        Self::density(space, "vol", |_| 1.0)
    }

    /// `x dy − y dx`.
    pub fn planar_angle_form(space: AmbientSpace) -> Result<Self> {
        Self::covector(space, "x dy - y dx", |p| Vec3::new(-p.y, p.x, 0.0))
    }

    /// Mass-one bump-weighted volume `(1 + ½ sin 2πx cos 2πy) vol` used to
    /// exercise non-invariant densities.
    pub fn wavy_density(space: AmbientSpace) -> Result<Self> {
        Self::density(space, "(1 + sin(2pi x) cos(2pi y)/2) vol", |p| 1.0 + 0.5 * (2.0 * PI * p.x).sin() * (2.0 * PI * p.y).cos())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn space(&self) -> AmbientSpace {
        self.space
    }

    pub fn degree(&self) -> usize {
        match self.proxy {
            Proxy::Function(_) => 0,
            Proxy::Covector(_) => 1,
            Proxy::Flux(_) => 2,
            Proxy::Density(_) => 3,
        }
    }

    fn expect_degree(&self, k: usize) -> Result<()> {
        if self.degree() == k {
            Ok(())
        } else {
            Err(Error::DegreeMismatch { expected: k, got: self.degree() })
        }
    }

    /// Evaluates the form at a (lifted) point on `degree()` vectors.
    pub fn eval(&self, at: &Vec3, args: &[Vec3]) -> Result<f64> {
        if args.len() != self.degree() {
            return Err(Error::DegreeMismatch { expected: self.degree(), got: args.len() });
        }
        let p = self.space.reduce(at);
        Ok(match &self.proxy {
            Proxy::Function(f) => f(&p),
            Proxy::Covector(a) => a(&p).dot(&args[0]),
            Proxy::Flux(b) => b(&p).dot(&args[0].cross(&args[1])),
            Proxy::Density(r) => r(&p) * det3(&args[0], &args[1], &args[2]),
        })
    }

    /// Proxy vector of a 1-form at a point.
    pub fn covector_at(&self, at: &Vec3) -> Result<Vec3> {
        match &self.proxy {
            Proxy::Covector(a) => Ok(a(&self.space.reduce(at))),
            _ => Err(Error::DegreeMismatch { expected: 1, got: self.degree() }),
        }
    }

    /// Proxy vector of a 2-form at a point.
    pub fn flux_at(&self, at: &Vec3) -> Result<Vec3> {
        match &self.proxy {
            Proxy::Flux(b) => Ok(b(&self.space.reduce(at))),
            _ => Err(Error::DegreeMismatch { expected: 2, got: self.degree() }),
        }
    }

    /// Density of a 3-form at a point.
    pub fn density_at(&self, at: &Vec3) -> Result<f64> {
        match &self.proxy {
            Proxy::Density(r) => Ok(r(&self.space.reduce(at))),
            _ => Err(Error::DegreeMismatch { expected: 3, got: self.degree() }),
        }
    }

    /// Interior product `i_X α`, inserting `X` into the first slot.
    pub fn interior(&self, x: &AnalyticVectorField) -> Result<DifferentialForm> {
        if self.space != x.space() {
            return Err(Error::SpaceMismatch);
        }
        let x = x.clone();
        let label = format!("i_{{{}}} {}", x.label(), self.label);
        match &self.proxy {
            Proxy::Function(_) => Err(Error::DegreeMismatch { expected: 1, got: 0 }),
            Proxy::Covector(a) => {
                let a = a.clone();
                Self::function(self.space, label, move |p| a(p).dot(&x.eval(p)))
            }
            // b·(X × v) = (b × X)·v
            Proxy::Flux(b) => {
                let b = b.clone();
                Self::covector(self.space, label, move |p| b(p).cross(&x.eval(p)))
            }
            // ρ det[X v w] = ρ X·(v × w)
            Proxy::Density(r) => {
                let r = r.clone();
                Self::flux(self.space, label, move |p| r(p) * x.eval(p))
            }
        }
    }

    /// Pullback `φ*α`.
    pub fn pullback(&self, phi: &ClosedFormDiffeo) -> Result<DifferentialForm> {
        if self.space != phi.space() {
            return Err(Error::SpaceMismatch);
        }
        let phi = phi.clone();
        let space = self.space;
        let label = format!("{}^* {}", phi.label(), self.label);
        match &self.proxy {
            Proxy::Function(f) => {
                let f = f.clone();
                Self::function(self.space, label, move |p| f(&space.reduce(&phi.forward(p))))
            }
            Proxy::Covector(a) => {
                let a = a.clone();
                Self::covector(self.space, label, move |p| phi.tangent(p).transpose() * a(&space.reduce(&phi.forward(p))))
            }
            // b(φp)·(Dφv × Dφw) = (cof Dφ)ᵀ b · (v × w)
            Proxy::Flux(b) => {
                let b = b.clone();
                Self::flux(self.space, label, move |p| cofactor(&phi.tangent(p)).transpose() * b(&space.reduce(&phi.forward(p))))
            }
            Proxy::Density(r) => {
                let r = r.clone();
                Self::density(self.space, label, move |p| r(&space.reduce(&phi.forward(p))) * phi.tangent(p).determinant())
            }
        }
    }

    /// `self − other`, for forms of equal degree.
    pub fn difference(&self, other: &DifferentialForm) -> Result<DifferentialForm> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        other.expect_degree(self.degree())?;
        let label = format!("({}) - ({})", self.label, other.label);
        let proxy = match (&self.proxy, &other.proxy) {
            (Proxy::Function(f), Proxy::Function(g)) => {
                let (f, g) = (f.clone(), g.clone());
                Proxy::Function(Arc::new(move |p| f(p) - g(p)))
            }
            (Proxy::Covector(f), Proxy::Covector(g)) => {
                let (f, g) = (f.clone(), g.clone());
                Proxy::Covector(Arc::new(move |p| f(p) - g(p)))
            }
            (Proxy::Flux(f), Proxy::Flux(g)) => {
                let (f, g) = (f.clone(), g.clone());
                Proxy::Flux(Arc::new(move |p| f(p) - g(p)))
            }
            (Proxy::Density(f), Proxy::Density(g)) => {
                let (f, g) = (f.clone(), g.clone());
                Proxy::Density(Arc::new(move |p| f(p) - g(p)))
            }
            _ => unreachable!("degrees checked above"),
        };
        Ok(DifferentialForm { space: self.space, proxy, label })
    }
}

/// Cofactor matrix, `cof(A) = det(A) A⁻ᵀ`, computed without inversion.
pub fn cofactor(a: &Mat3) -> Mat3 {
    let c0 = a.column(1).cross(&a.column(2));
    let c1 = a.column(2).cross(&a.column(0));
    let c2 = a.column(0).cross(&a.column(1));
    // det(A) A⁻¹ has rows c0, c1, c2
    Mat3::from_columns(&[c0, c1, c2])
}
