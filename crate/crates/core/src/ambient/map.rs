//! Smooth maps `R³ → R³` with exact first and (where available) second
//! derivatives.
//!
//! Closed-form maps are written once as functions of second-order dual
//! numbers ([`Jet`]); value, Jacobian and Hessian all come out of a single
//! evaluation. Derived maps (brackets, pushforwards, compositions) implement
//! [`VectorMap`] directly through the chain rule.

use std::fmt;
use std::sync::Arc;

use nalgebra::{U1, U3};
use num_dual::Dual2SVec64;

use super::space::{Mat3, Vec3};

/// Second-order jet in the three ambient coordinates.
pub type Jet = Dual2SVec64<3>;
pub type Jet3 = [Jet; 3];

pub trait VectorMap: Send + Sync {
    fn value(&self, p: &Vec3) -> Vec3;

    /// `J[(i, j)] = ∂_j v_i`.
    fn jacobian(&self, p: &Vec3) -> Mat3;

    /// `H[i][(j, k)] = ∂_j ∂_k v_i`.
    ///
    /// The default differentiates the analytic Jacobian by fourth-order
    /// central differences; jet-backed maps override it with exact values.
    fn hessian(&self, p: &Vec3) -> [Mat3; 3] {
        let h = 1e-3 * p.norm().max(1.0);
        let mut out = [Mat3::zeros(); 3];
        for k in 0..3 {
            let e = Vec3::ith(k, h);
            let d =
                (self.jacobian(&(p - 2.0 * e)) - 8.0 * self.jacobian(&(p - e)) + 8.0 * self.jacobian(&(p + e)) - self.jacobian(&(p + 2.0 * e))) / (12.0 * h);
            for (i, hi) in out.iter_mut().enumerate() {
                for j in 0..3 {
                    hi[(j, k)] = d[(i, j)];
                }
            }
        }
        // symmetrize: ∂_j∂_k = ∂_k∂_j
        for hi in out.iter_mut() {
            *hi = 0.5 * (*hi + hi.transpose());
        }
        out
    }
}

pub type SharedMap = Arc<dyn VectorMap>;

/// A closed-form map defined on jets.
#[derive(Clone)]
pub struct JetMap {
    f: Arc<dyn Fn(&Jet3) -> Jet3 + Send + Sync>,
}

impl JetMap {
    pub fn new(f: impl Fn(&Jet3) -> Jet3 + Send + Sync + 'static) -> Self {
        JetMap { f: Arc::new(f) }
    }

    pub fn shared(f: impl Fn(&Jet3) -> Jet3 + Send + Sync + 'static) -> SharedMap {
        Arc::new(Self::new(f))
    }

    fn eval(&self, p: &Vec3) -> Jet3 {
        let x = [Jet::from_re(p.x).derivative(0), Jet::from_re(p.y).derivative(1), Jet::from_re(p.z).derivative(2)];
        (self.f)(&x)
    }
}

impl fmt::Debug for JetMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("JetMap")
    }
}

impl VectorMap for JetMap {
    fn value(&self, p: &Vec3) -> Vec3 {
        let x = [Jet::from_re(p.x), Jet::from_re(p.y), Jet::from_re(p.z)];
        let v = (self.f)(&x);
        Vec3::new(v[0].re, v[1].re, v[2].re)
    }

    fn jacobian(&self, p: &Vec3) -> Mat3 {
        let v = self.eval(p);
        let mut j = Mat3::zeros();
        for (i, vi) in v.iter().enumerate() {
            let row = vi.v1.unwrap_generic(U1, U3);
            for k in 0..3 {
                j[(i, k)] = row[k];
            }
        }
        j
    }

    fn hessian(&self, p: &Vec3) -> [Mat3; 3] {
        let v = self.eval(p);
        let mut out = [Mat3::zeros(); 3];
        for (i, vi) in v.iter().enumerate() {
            let h = vi.v2.unwrap_generic(U3, U3);
            out[i] = Mat3::from_fn(|r, c| h[(r, c)]);
        }
        out
    }
}

/// Lifts a constant into jet arithmetic.
pub fn jc(c: f64) -> Jet {
    Jet::from_re(c)
}

/// `outer ∘ inner`, differentiated by the chain rule.
#[derive(Clone)]
pub struct Compose {
    pub outer: SharedMap,
    pub inner: SharedMap,
}

impl VectorMap for Compose {
    fn value(&self, p: &Vec3) -> Vec3 {
        self.outer.value(&self.inner.value(p))
    }

    fn jacobian(&self, p: &Vec3) -> Mat3 {
        let q = self.inner.value(p);
        self.outer.jacobian(&q) * self.inner.jacobian(p)
    }

    fn hessian(&self, p: &Vec3) -> [Mat3; 3] {
        let q = self.inner.value(p);
        let di = self.inner.jacobian(p);
        let ho = self.outer.hessian(&q);
        let hi = self.inner.hessian(p);
        let dout = self.outer.jacobian(&q);
        let mut out = [Mat3::zeros(); 3];
        for (i, oi) in out.iter_mut().enumerate() {
            *oi = di.transpose() * ho[i] * di;
            for (l, hl) in hi.iter().enumerate() {
                *oi += dout[(i, l)] * hl;
            }
        }
        out
    }
}

/// Contracts a Hessian with a vector in its first derivative slot:
/// `(H·v)[(i, k)] = Σ_j H[i][(j, k)] v_j`.
pub fn hessian_dot(h: &[Mat3; 3], v: &Vec3) -> Mat3 {
    let mut m = Mat3::zeros();
    for i in 0..3 {
        let row = v.transpose() * h[i];
        for k in 0..3 {
            m[(i, k)] = row[k];
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_dual::DualNum;

    fn sample_map() -> JetMap {
        JetMap::new(|x: &Jet3| [x[0] * x[1] + x[2].sin(), x[1] * x[1] * x[2], (x[0] * jc(2.0)).cos() + x[1]])
    }

    #[test]
    fn jet_jacobian_matches_central_differences() {
        let m = sample_map();
        let p = Vec3::new(0.3, -0.7, 1.1);
        let j = m.jacobian(&p);
        let h = 1e-6;
        for k in 0..3 {
            let e = Vec3::ith(k, h);
            let fd = (m.value(&(p + e)) - m.value(&(p - e))) / (2.0 * h);
            for i in 0..3 {
                assert!((fd[i] - j[(i, k)]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn default_hessian_agrees_with_exact() {
        struct NoHessian(JetMap);
        impl VectorMap for NoHessian {
            fn value(&self, p: &Vec3) -> Vec3 {
                self.0.value(p)
            }
            fn jacobian(&self, p: &Vec3) -> Mat3 {
                self.0.jacobian(p)
            }
        }
        let m = sample_map();
        let p = Vec3::new(0.2, 0.4, -0.3);
        let exact = m.hessian(&p);
        let approx = NoHessian(m).hessian(&p);
        for i in 0..3 {
            assert!((exact[i] - approx[i]).norm() < 1e-9);
        }
    }

    #[test]
    fn composition_chain_rule() {
        let a: SharedMap = Arc::new(sample_map());
        let b = JetMap::shared(|x: &Jet3| [x[0] + x[1] * jc(0.5), x[1].sin(), x[2] * x[0]]);
        let c = Compose { outer: a.clone(), inner: b.clone() };
        let direct = JetMap::new({
            let sa = sample_map();
            move |x: &Jet3| {
                let inner = [x[0] + x[1] * jc(0.5), x[1].sin(), x[2] * x[0]];
                (sa.f)(&inner)
            }
        });
        let p = Vec3::new(0.1, 0.9, -0.4);
        assert!((c.jacobian(&p) - direct.jacobian(&p)).norm() < 1e-13);
        let (h1, h2) = (c.hessian(&p), direct.hessian(&p));
        for i in 0..3 {
            assert!((h1[i] - h2[i]).norm() < 1e-12);
        }
    }
}
