//! Moment maps of exact divergence-free fields, the Lie algebra 2-cocycle
//! `c`, the group 1-cocycle `κ`, and the homologous-base comparison.
//!
//! Bracket conventions: `lie_bracket` is the vector-field bracket
//! `[X, Y] = (DY)X − (DX)Y`. The Lie algebra of the diffeomorphism group
//! carries the opposite bracket, `[X, Y]_grp = −[X, Y]`, and the cocycle
//! formula `c(X, Y) = h_{[X,Y]} − Ω(ζ_X, ζ_Y)` holds with that one.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::ambient::field::negate;
use crate::ambient::{det3, lie_bracket, AmbientSpace, AnalyticVectorField, ClosedFormDiffeo, DifferentialForm, Vec3};
use crate::error::{Error, Result};
use crate::flow::directional_derivative;
use crate::loops::{fundamental_section, DiscreteLoop, SmoothProbe};
use crate::tilde::{mw_symplectic, tilde_function};

/// A vector field with a certified potential `A`, `dA = i_X vol`.
#[derive(Debug, Clone)]
pub struct ExactDivFreeField {
    field: AnalyticVectorField,
}

impl ExactDivFreeField {
    /// Wraps a field that carries a potential.
    pub fn new(field: AnalyticVectorField) -> Result<Self> {
        if field.potential().is_none() {
            return Err(Error::MissingPotential(field.label().to_string()));
        }
        Ok(Self { field })
    }

    /// Like [`new`](Self::new), additionally requiring
    /// `|X − curl A| < 1e-10` and `|div X| < 1e-10` at the samples.
    pub fn validated(field: AnalyticVectorField, samples: &[Vec3]) -> Result<Self> {
        let f = Self::new(field)?;
        for p in samples {
            let (curl, div) = (f.field.curl_defect(p)?, f.field.divergence(p).abs());
            if !(curl < 1e-10 && div < 1e-10) {
                return Err(Error::InvalidParameter(format!(
                    "`{}` is not exact divergence-free at {p:?}: curl defect {curl:e}, divergence {div:e}",
                    f.field.label()
                )));
            }
        }
        Ok(f)
    }

    pub fn field(&self) -> &AnalyticVectorField {
        &self.field
    }

    pub fn label(&self) -> &str {
        self.field.label()
    }

    pub fn space(&self) -> AmbientSpace {
        self.field.space()
    }

    pub fn eval(&self, p: &Vec3) -> Vec3 {
        self.field.eval(p)
    }

    /// The potential as a 1-form.
    pub fn potential_form(&self) -> DifferentialForm {
        let a = self.field.potential().expect("checked at construction").clone();
        DifferentialForm::covector(self.space(), format!("A[{}]", self.label()), move |p| a.value(p)).expect("3-dimensional by construction")
    }

    /// Vector-field bracket, potential `i_X i_Y vol`.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        Self::new(lie_bracket(&self.field, &other.field)?)
    }

    /// Group bracket `−[X, Y]`.
    pub fn group_bracket(&self, other: &Self) -> Result<Self> {
        Ok(Self { field: negate(&self.bracket(other)?.field) })
    }

    pub fn negated(&self) -> Self {
        Self { field: negate(&self.field) }
    }

    /// `φ*X = (φ⁻¹)_* X`, with potential `φ*A`.
    pub fn pulled_back(&self, phi: &ClosedFormDiffeo) -> Result<Self> {
        if !phi.is_volume_preserving() {
            return Err(Error::InvalidParameter(format!("`{}` is not volume-preserving", phi.label())));
        }
        Self::new(crate::ambient::pushforward_field(&phi.inverse(), &self.field)?)
    }
}

fn same_space(a: AmbientSpace, b: AmbientSpace) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::SpaceMismatch)
    }
}

/// `μ(N)(X) = ∫_N A − ∫_{N₀} A`.
pub fn moment(l: &DiscreteLoop, x: &ExactDivFreeField, base: &DiscreteLoop) -> Result<f64> {
    same_space(l.space(), base.space())?;
    same_space(l.space(), x.space())?;
    let a = x.potential_form();
    Ok(tilde_function(&a, l)? - tilde_function(&a, base)?)
}

/// `|dμ(X)(Y) − Ω(ζ_X, Y)|` for one section, by central differences.
pub fn hamiltonian_defect(l: &DiscreteLoop, x: &ExactDivFreeField, base: &DiscreteLoop, y: &crate::loops::NormalSection) -> Result<f64> {
    let fd = directional_derivative(l, y, |m| moment(m, x, base))?;
    let om = mw_symplectic(l, &fundamental_section(x.field(), l)?, y)?;
    Ok((fd - om).abs())
}

/// Largest [`hamiltonian_defect`] over smooth random sections.
pub fn hamiltonian_residual(l: &DiscreteLoop, x: &ExactDivFreeField, base: &DiscreteLoop, trials: usize, seed: u64) -> Result<f64> {
    let mut worst = 0.0f64;
    for k in 0..trials {
        let y = SmoothProbe::new(l.space(), seed.wrapping_add(k as u64)).section(l)?;
        worst = worst.max(hamiltonian_defect(l, x, base, &y)?);
    }
    Ok(worst)
}

/// `c_{N₀}(X, Y) = −Σ vol(X(vᵢ), Y(vᵢ), tᵢ) ℓᵢ`, with unprojected field
/// values. Tangential parts drop out of the determinant, so this equals
/// `−Ω(ζ_X, ζ_Y)(N₀)`.
pub fn cocycle_c(base: &DiscreteLoop, x: &ExactDivFreeField, y: &ExactDivFreeField) -> Result<f64> {
    same_space(base.space(), x.space())?;
    same_space(base.space(), y.space())?;
    let (t, w) = (base.tangents()?, base.dual_lengths());
    Ok(-(0..base.len())
        .map(|i| {
            let v = base.vertex(i);
            det3(&x.eval(&v), &y.eval(&v), &t[i]) * w[i]
        })
        .sum::<f64>())
}

/// `|c([X,Y], Z) + c([Y,Z], X) + c([Z,X], Y)|`.
pub fn cocycle_identity_residual(base: &DiscreteLoop, x: &ExactDivFreeField, y: &ExactDivFreeField, z: &ExactDivFreeField) -> Result<f64> {
    let s = cocycle_c(base, &x.bracket(y)?, z)? + cocycle_c(base, &y.bracket(z)?, x)? + cocycle_c(base, &z.bracket(x)?, y)?;
    Ok(s.abs())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constancy {
    /// `h_{[X,Y]_grp}(N) − Ω(ζ_X, ζ_Y)(N)` per probe.
    pub values: Vec<f64>,
    /// `max − min` of `values`.
    pub spread: f64,
}

/// Evaluates `h_{[X,Y]_grp}(N) − Ω(ζ_X, ζ_Y)(N)` on each probe loop, with
/// `h` normalized to vanish on `base`.
pub fn cocycle_formula_constancy(base: &DiscreteLoop, x: &ExactDivFreeField, y: &ExactDivFreeField, probes: &[DiscreteLoop]) -> Result<Constancy> {
    if probes.is_empty() {
        return Err(Error::InvalidParameter("at least one probe loop is required".into()));
    }
    let xy = x.group_bracket(y)?;
    let values = probes
        .iter()
        .map(|n| {
            let om = mw_symplectic(n, &fundamental_section(x.field(), n)?, &fundamental_section(y.field(), n)?)?;
            Ok(moment(n, &xy, base)? - om)
        })
        .collect::<Result<Vec<f64>>>()?;
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(Constancy { values, spread: max - min })
}

/// `κ(φ)(X) = ∫_{φ(N₀)} A − ∫_{N₀} A`, with `φ(N₀)` the vertex-wise image.
pub fn kappa(phi: &ClosedFormDiffeo, x: &ExactDivFreeField, base: &DiscreteLoop) -> Result<f64> {
    if !phi.is_volume_preserving() {
        return Err(Error::InvalidParameter(format!("`{}` is not volume-preserving", phi.label())));
    }
    same_space(phi.space(), base.space())?;
    let image = base.map_vertices(|v| phi.forward(v))?;
    moment(&image, x, base)
}

/// Residual of the 1-cocycle law `κ(φψ)(X) = κ(φ)(X) + κ(ψ)(φ*X)`.
pub fn kappa_cocycle_residual(phi: &ClosedFormDiffeo, psi: &ClosedFormDiffeo, x: &ExactDivFreeField, base: &DiscreteLoop) -> Result<f64> {
    let lhs = kappa(&phi.compose(psi)?, x, base)?;
    let rhs = kappa(phi, x, base)? + kappa(psi, &x.pulled_back(phi)?, base)?;
    Ok((lhs - rhs).abs())
}

/// A closed-form surface `B(u, v)`, `u ∈ [0, 1]`, `v ∈ [0, 1)` periodic,
/// with `∂B = B(1, ·) − B(0, ·)`.
#[derive(Clone)]
pub struct Bordism {
    space: AmbientSpace,
    map: Arc<dyn Fn(f64, f64) -> Vec3 + Send + Sync>,
    pub grid_u: usize,
    pub grid_v: usize,
}

impl fmt::Debug for Bordism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Bordism").field("grid_u", &self.grid_u).field("grid_v", &self.grid_v).finish()
    }
}

impl Bordism {
    pub fn new(space: AmbientSpace, grid_u: usize, grid_v: usize, map: impl Fn(f64, f64) -> Vec3 + Send + Sync + 'static) -> Result<Self> {
        if grid_u == 0 || grid_v == 0 {
            return Err(Error::InvalidParameter("bordism grid must be non-empty".into()));
        }
        Ok(Self { space, map: Arc::new(map), grid_u, grid_v })
    }

    /// Straight-line interpolation `(1 − u) γ₀(v) + u γ₁(v)`.
    pub fn cylinder(
        space: AmbientSpace,
        grid_u: usize,
        grid_v: usize,
        gamma0: impl Fn(f64) -> Vec3 + Send + Sync + 'static,
        gamma1: impl Fn(f64) -> Vec3 + Send + Sync + 'static,
    ) -> Result<Self> {
        Self::new(space, grid_u, grid_v, move |u, v| (1.0 - u) * gamma0(v) + u * gamma1(v))
    }

    pub fn space(&self) -> AmbientSpace {
        self.space
    }

    pub fn at(&self, u: f64, v: f64) -> Vec3 {
        (self.map)(u, v)
    }

    /// Largest distance between `B(0, j/n)` and `base` vertex `j`, and
    /// between `B(1, j/n)` and `top` vertex `j`, up to lattice shifts.
    pub fn boundary_mismatch(&self, base: &DiscreteLoop, top: &DiscreteLoop) -> f64 {
        let trace = |l: &DiscreteLoop, u: f64| {
            (0..l.len()).map(|j| self.space.min_image(&(self.at(u, j as f64 / l.len() as f64) - l.vertex(j))).norm()).fold(0.0, f64::max)
        };
        trace(base, 0.0).max(trace(top, 1.0))
    }
}

/// `λ₀(X) = −∫_B i_X vol ≈ −Σ vol(X(c), ∂_u B, ∂_v B) ΔuΔv` over cell
/// centers, partials by differences across cell faces.
pub fn lambda0(b: &Bordism, x: &ExactDivFreeField) -> Result<f64> {
    same_space(b.space(), x.space())?;
    let (nu, nv) = (b.grid_u, b.grid_v);
    let (du, dv) = (1.0 / nu as f64, 1.0 / nv as f64);
    let rows: Vec<f64> = (0..nu)
        .into_par_iter()
        .map(|i| {
            let u = (i as f64 + 0.5) * du;
            (0..nv)
                .map(|j| {
                    let v = (j as f64 + 0.5) * dv;
                    let c = b.at(u, v);
                    let bu = (b.at(u + 0.5 * du, v) - b.at(u - 0.5 * du, v)) / du;
                    let bv = (b.at(u, v + 0.5 * dv) - b.at(u, v - 0.5 * dv)) / dv;
                    det3(&x.eval(&c), &bu, &bv)
                })
                .sum::<f64>()
        })
        .collect();
    Ok(-rows.iter().sum::<f64>() * du * dv)
}

/// `|c_{N'}(X, Y) − c_N(X, Y) − λ₀(B, −[X, Y])|` with the vector-field
/// bracket.
pub fn iso_check(base: &DiscreteLoop, base2: &DiscreteLoop, b: &Bordism, x: &ExactDivFreeField, y: &ExactDivFreeField) -> Result<f64> {
    let z = x.bracket(y)?.negated();
    Ok((cocycle_c(base2, x, y)? - cocycle_c(base, x, y)? - lambda0(b, &z)?).abs())
}
