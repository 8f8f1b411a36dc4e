//! Transgression forms, swept-chain integrals, integrality, and the
//! prequantum holonomy of the mass-one sphere.
//!
//! The circle bundle itself is never built. Holonomies are filling
//! integrals reduced mod 1; their consistency rests on integrality of the
//! difference between two fillings.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ambient::space::sphere_area_form;
use crate::ambient::{AmbientSpace, DifferentialForm, Mat3, SphereChart, Vec3};
use crate::error::{Error, Result};
use crate::quadrature::{richardson, simpson};

/// A diffeotopy `φ_t`, `t ∈ [0, 1]`, with `φ₀ = id`.
pub trait DiffeoPath: Send + Sync {
    fn space(&self) -> AmbientSpace;
    fn label(&self) -> String;
    fn map(&self, t: f64, p: &Vec3) -> Vec3;
    /// `∂_t φ_t(p)`.
    fn velocity(&self, t: f64, p: &Vec3) -> Vec3;
    /// `Dφ_t(p)`.
    fn tangent(&self, t: f64, p: &Vec3) -> Mat3;
}

/// Closed-form diffeotopies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PathFamily {
    Identity,
    /// `p + t c`.
    Translation {
        c: [f64; 3],
    },
    /// `(x, y + t a sin(ω₁x), z)`.
    Shear {
        a: f64,
    },
    /// `(x, y + t a sin(ω₁x), z + t b cos(ω₁x + ω₂y))`.
    TriangularShear {
        a: f64,
        b: f64,
    },
}

#[derive(Debug, Clone, Copy)]
pub struct ClosedFormPath {
    pub space: AmbientSpace,
    pub family: PathFamily,
}

impl ClosedFormPath {
    pub fn new(space: AmbientSpace, family: PathFamily) -> Result<Self> {
        if space.dimension() != 3 {
            return Err(Error::UnsupportedSpace("diffeotopies"));
        }
        Ok(Self { space, family })
    }

    fn omega(&self) -> [f64; 3] {
        match self.space {
            AmbientSpace::FlatTorus3 { periods } => periods.map(|p| 2.0 * PI / p),
            _ => [2.0 * PI; 3],
        }
    }
}

impl DiffeoPath for ClosedFormPath {
    fn space(&self) -> AmbientSpace {
        self.space
    }

    fn label(&self) -> String {
        format!("{:?}", self.family)
    }

    fn map(&self, t: f64, p: &Vec3) -> Vec3 {
        p + t * self.velocity(t, p)
    }

    fn velocity(&self, _t: f64, p: &Vec3) -> Vec3 {
        let w = self.omega();
        match self.family {
            PathFamily::Identity => Vec3::zeros(),
            PathFamily::Translation { c } => Vec3::from(c),
            PathFamily::Shear { a } => Vec3::new(0.0, a * (w[0] * p.x).sin(), 0.0),
            PathFamily::TriangularShear { a, b } => Vec3::new(0.0, a * (w[0] * p.x).sin(), b * (w[0] * p.x + w[1] * p.y).cos()),
        }
    }

    fn tangent(&self, t: f64, p: &Vec3) -> Mat3 {
        let w = self.omega();
        let mut d = Mat3::identity();
        match self.family {
            PathFamily::Identity | PathFamily::Translation { .. } => {}
            PathFamily::Shear { a } => d[(1, 0)] = t * a * w[0] * (w[0] * p.x).cos(),
            PathFamily::TriangularShear { a, b } => {
                let s = (w[0] * p.x + w[1] * p.y).sin();
                d[(1, 0)] = t * a * w[0] * (w[0] * p.x).cos();
                d[(2, 0)] = -t * b * w[0] * s;
                d[(2, 1)] = -t * b * w[1] * s;
            }
        }
        d
    }
}

/// `λ_φ(v₁, v₂) = −∫₀¹ α(φ_t p)(∂_tφ_t p, Dφ_t v₁, Dφ_t v₂) dt`, composite
/// Simpson in `t`.
pub fn lambda_path_form(path: &dyn DiffeoPath, alpha: &DifferentialForm, at: &Vec3, v1: &Vec3, v2: &Vec3, panels: usize) -> Result<f64> {
    if alpha.degree() != 3 {
        return Err(Error::DegreeMismatch { expected: 3, got: alpha.degree() });
    }
    if alpha.space() != path.space() {
        return Err(Error::SpaceMismatch);
    }
    let integrand = |t: f64| {
        let d = path.tangent(t, at);
        alpha.eval(&path.map(t, at), &[path.velocity(t, at), d * v1, d * v2]).unwrap_or(f64::NAN)
    };
    let v = simpson(integrand, 0.0, 1.0, panels)?;
    if !v.is_finite() {
        return Err(Error::NonFinite("lambda_path_form"));
    }
    Ok(-v)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactnessResidual {
    /// Stokes face sum of `λ_φ` divided by the cell volume.
    pub d_lambda: f64,
    /// `(α − φ₁*α)(e₁, e₂, e₃)` at the cell center.
    pub expected: f64,
    pub residual: f64,
}

/// Compares `dλ_φ` (boundary-face sum over the cube of side `scale` around
/// `at`, one midpoint per face) with `α − φ₁*α` at `at`.
pub fn lambda_exactness_residual(path: &dyn DiffeoPath, alpha: &DifferentialForm, at: &Vec3, scale: f64, panels: usize) -> Result<ExactnessResidual> {
    if scale.is_nan() || scale <= 0.0 {
        return Err(Error::InvalidParameter("scale must be positive".into()));
    }
    let e = [Vec3::x(), Vec3::y(), Vec3::z()];
    let mut flux = 0.0;
    for k in 0..3 {
        let (a, b) = (e[(k + 1) % 3], e[(k + 2) % 3]);
        let off = 0.5 * scale * e[k];
        let hi = lambda_path_form(path, alpha, &(at + off), &a, &b, panels)?;
        let lo = lambda_path_form(path, alpha, &(at - off), &a, &b, panels)?;
        flux += (hi - lo) * scale * scale;
    }
    let d_lambda = flux / scale.powi(3);
    let d1 = path.tangent(1.0, at);
    let pulled = alpha.eval(&path.map(1.0, at), &[d1 * e[0], d1 * e[1], d1 * e[2]])?;
    let expected = alpha.eval(at, &e)? - pulled;
    Ok(ExactnessResidual { d_lambda, expected, residual: (d_lambda - expected).abs() })
}

/// Closed-form map `(s, t, θ) ↦ M` on a box, with its midpoint resolution.
#[derive(Clone)]
pub struct SweepMap {
    space: AmbientSpace,
    map: Arc<dyn Fn(f64, f64, f64) -> Vec3 + Send + Sync>,
    pub ranges: [(f64, f64); 3],
    pub resolution: [usize; 3],
    pub id: String,
}

impl fmt::Debug for SweepMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SweepMap").field("id", &self.id).field("ranges", &self.ranges).field("resolution", &self.resolution).finish()
    }
}

pub const MIN_RESOLUTION: usize = 8;

impl SweepMap {
    /// Sweep over the unit box `[0, 1]³`.
    pub fn new(
        space: AmbientSpace,
        id: impl Into<String>,
        resolution: [usize; 3],
        map: impl Fn(f64, f64, f64) -> Vec3 + Send + Sync + 'static,
    ) -> Result<Self> {
        if space.dimension() != 3 {
            return Err(Error::UnsupportedSpace("3-dimensional sweeps"));
        }
        let s = Self { space, map: Arc::new(map), ranges: [(0.0, 1.0); 3], resolution, id: id.into() };
        s.check_resolution()?;
        Ok(s)
    }

    fn check_resolution(&self) -> Result<()> {
        if self.resolution.iter().any(|&r| r < MIN_RESOLUTION) {
            return Err(Error::InvalidParameter(format!("sweep resolution {:?} is below the minimum {MIN_RESOLUTION} per axis", self.resolution)));
        }
        Ok(())
    }

    pub fn space(&self) -> AmbientSpace {
        self.space
    }

    pub fn at(&self, s: f64, t: f64, th: f64) -> Vec3 {
        (self.map)(s, t, th)
    }

    /// Same map restricted to `s ∈ [a, b]` with `ns` cells in `s`.
    pub fn restrict_s(&self, a: f64, b: f64, ns: usize) -> Result<Self> {
        let mut out = self.clone();
        out.ranges[0] = (a, b);
        out.resolution[0] = ns;
        out.check_resolution()?;
        Ok(out)
    }

    pub fn with_resolution(&self, resolution: [usize; 3]) -> Result<Self> {
        let mut out = self.clone();
        out.resolution = resolution;
        out.check_resolution()?;
        Ok(out)
    }

    /// `(s, t, θ) ↦ map(1 − s, t, θ)` on the reflected `s` range.
    pub fn reversed(&self) -> Self {
        let inner = self.map.clone();
        let (a, b) = self.ranges[0];
        let mut out = self.clone();
        out.map = Arc::new(move |s, t, th| inner(a + b - s, t, th));
        out.id = format!("-{}", self.id);
        out
    }
}

/// `∫ Φ*α ≈ Σ α(c)(∂_s, ∂_t, ∂_θ) ΔsΔtΔθ` over cell centers; partials are
/// differences across cell faces. Rows in `s` run in parallel and are summed
/// in index order.
pub fn chain_integral(sweep: &SweepMap, alpha: &DifferentialForm) -> Result<f64> {
    if alpha.degree() != 3 {
        return Err(Error::DegreeMismatch { expected: 3, got: alpha.degree() });
    }
    if alpha.space() != sweep.space {
        return Err(Error::SpaceMismatch);
    }
    let [ns, nt, nh] = sweep.resolution;
    let h: Vec<f64> = (0..3).map(|k| (sweep.ranges[k].1 - sweep.ranges[k].0) / sweep.resolution[k] as f64).collect();
    let node = |k: usize, i: usize| sweep.ranges[k].0 + (i as f64 + 0.5) * h[k];
    let rows: Vec<Result<f64>> = (0..ns)
        .into_par_iter()
        .map(|i| {
            let s = node(0, i);
            let mut acc = 0.0;
            for j in 0..nt {
                let t = node(1, j);
                for k in 0..nh {
                    let th = node(2, k);
                    let c = sweep.at(s, t, th);
                    let ds = (sweep.at(s + 0.5 * h[0], t, th) - sweep.at(s - 0.5 * h[0], t, th)) / h[0];
                    let dt = (sweep.at(s, t + 0.5 * h[1], th) - sweep.at(s, t - 0.5 * h[1], th)) / h[1];
                    let dh = (sweep.at(s, t, th + 0.5 * h[2]) - sweep.at(s, t, th - 0.5 * h[2])) / h[2];
                    acc += alpha.eval(&c, &[ds, dt, dh])?;
                }
            }
            Ok(acc)
        })
        .collect();
    let mut total = 0.0;
    for r in rows {
        total += r?;
    }
    Ok(total * h[0] * h[1] * h[2])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralityGap {
    /// `∫_A α − ∫_B α`.
    pub difference: f64,
    pub integer: i64,
    /// Distance of `difference` to `integer`.
    pub gap: f64,
}

impl IntegralityGap {
    pub fn of(difference: f64) -> Self {
        let integer = difference.round();
        Self { difference, integer: integer as i64, gap: (difference - integer).abs() }
    }
}

/// Integrality of the difference of two fillings with the same boundary
/// (as chains in `M`) for an integral 3-form.
pub fn integrality_gap(a: &SweepMap, b: &SweepMap, alpha: &DifferentialForm) -> Result<IntegralityGap> {
    Ok(IntegralityGap::of(chain_integral(a, alpha)? - chain_integral(b, alpha)?))
}

/// A closed path of loops `(t, θ) ↦ N_t(θ)`, both parameters periodic on
/// `[0, 1)`.
#[derive(Clone)]
pub struct LoopFamily {
    space: AmbientSpace,
    map: Arc<dyn Fn(f64, f64) -> Vec3 + Send + Sync>,
    pub resolution: [usize; 2],
}

impl fmt::Debug for LoopFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LoopFamily").field("resolution", &self.resolution).finish()
    }
}

impl LoopFamily {
    pub fn new(space: AmbientSpace, resolution: [usize; 2], map: impl Fn(f64, f64) -> Vec3 + Send + Sync + 'static) -> Result<Self> {
        if resolution.iter().any(|&r| r < MIN_RESOLUTION) {
            return Err(Error::InvalidParameter(format!("loop family resolution {resolution:?} is below {MIN_RESOLUTION}")));
        }
        Ok(Self { space, map: Arc::new(map), resolution })
    }

    pub fn at(&self, t: f64, th: f64) -> Vec3 {
        (self.map)(t, th)
    }
}

/// Action `∫₀¹ λ̃(N_t)(∂_t N_t) dt = ∫∫ λ(∂_t, ∂_θ) dθ dt` of a closed path
/// of loops for a 2-form `λ` with `dλ = α` on a neighbourhood of the swept
/// surface. `λ` is evaluated in its own space, which may be the universal
/// cover (`Euclidean3`) when no periodic primitive exists.
pub fn loop_action(family: &LoopFamily, lambda: &DifferentialForm) -> Result<f64> {
    if lambda.degree() != 2 {
        return Err(Error::DegreeMismatch { expected: 2, got: lambda.degree() });
    }
    if lambda.space() != family.space && lambda.space() != AmbientSpace::Euclidean3 {
        return Err(Error::SpaceMismatch);
    }
    let [nt, nh] = family.resolution;
    let (ht, hh) = (1.0 / nt as f64, 1.0 / nh as f64);
    let rows: Vec<Result<f64>> = (0..nt)
        .into_par_iter()
        .map(|i| {
            let t = (i as f64 + 0.5) * ht;
            let mut acc = 0.0;
            for j in 0..nh {
                let th = (j as f64 + 0.5) * hh;
                let dt = (family.at(t + 0.5 * ht, th) - family.at(t - 0.5 * ht, th)) / ht;
                let dh = (family.at(t, th + 0.5 * hh) - family.at(t, th - 0.5 * hh)) / hh;
                acc += lambda.eval(&family.at(t, th), &[dt, dh])?;
            }
            Ok(acc)
        })
        .collect();
    let mut total = 0.0;
    for r in rows {
        total += r?;
    }
    Ok(total * ht * hh)
}

/// Closed-form map `(s, t) ↦ (θ, φ)` into the sphere chart.
#[derive(Clone)]
pub struct SphereSweep {
    map: Arc<dyn Fn(f64, f64) -> SphereChart + Send + Sync>,
    pub resolution: [usize; 2],
    pub id: String,
}

impl fmt::Debug for SphereSweep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SphereSweep").field("id", &self.id).field("resolution", &self.resolution).finish()
    }
}

impl SphereSweep {
    pub fn new(id: impl Into<String>, resolution: [usize; 2], map: impl Fn(f64, f64) -> SphereChart + Send + Sync + 'static) -> Result<Self> {
        if resolution.iter().any(|&r| r < MIN_RESOLUTION) {
            return Err(Error::InvalidParameter(format!("sphere sweep resolution {resolution:?} is below {MIN_RESOLUTION}")));
        }
        Ok(Self { map: Arc::new(map), resolution, id: id.into() })
    }

    pub fn at(&self, s: f64, t: f64) -> SphereChart {
        (self.map)(s, t)
    }

    pub fn with_resolution(&self, resolution: [usize; 2]) -> Result<Self> {
        Self::new(self.id.clone(), resolution, {
            let m = self.map.clone();
            move |s, t| m(s, t)
        })
    }
}

/// `∫ Φ*ω` for the mass-one area form, midpoint cells (no node on a pole).
pub fn sphere_chain_integral(sweep: &SphereSweep) -> f64 {
    let [ns, nt] = sweep.resolution;
    let (hs, ht) = (1.0 / ns as f64, 1.0 / nt as f64);
    let rows: Vec<f64> = (0..ns)
        .into_par_iter()
        .map(|i| {
            let s = (i as f64 + 0.5) * hs;
            (0..nt)
                .map(|j| {
                    let t = (j as f64 + 0.5) * ht;
                    let ds = (sweep.at(s + 0.5 * hs, t) - sweep.at(s - 0.5 * hs, t)) / hs;
                    let dt = (sweep.at(s, t + 0.5 * ht) - sweep.at(s, t - 0.5 * ht)) / ht;
                    sphere_area_form(&sweep.at(s, t), &ds, &dt)
                })
                .sum::<f64>()
        })
        .collect();
    rows.iter().sum::<f64>() * hs * ht
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Filling {
    North,
    South,
}

/// Cap filling of the latitude circle `θ = θ₀`, traversed with increasing
/// `φ`. `s` runs from the pole to the latitude.
pub fn sphere_cap(theta0: f64, filling: Filling, resolution: usize) -> Result<SphereSweep> {
    if !(0.0..=PI).contains(&theta0) {
        return Err(Error::InvalidParameter(format!("polar angle {theta0} outside [0, π]")));
    }
    let (id, map): (&str, Box<dyn Fn(f64) -> f64 + Send + Sync>) = match filling {
        Filling::North => ("north", Box::new(move |s| s * theta0)),
        Filling::South => ("south", Box::new(move |s| PI - s * (PI - theta0))),
    };
    SphereSweep::new(format!("{id}_cap({theta0})"), [resolution, resolution], move |s, t| SphereChart::new(map(s), 2.0 * PI * t))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolonomyReport {
    pub value_mod_1: f64,
    pub raw_value: f64,
    pub filling_id: String,
    pub resolution: Vec<usize>,
    /// Richardson estimate from the half-resolution value.
    pub estimated_error: f64,
}

/// Holonomy of the latitude `θ₀` for the mass-one sphere: the cap integral
/// reduced mod 1.
pub fn sphere_holonomy(theta0: f64, filling: Filling, resolution: usize) -> Result<HolonomyReport> {
    let cap = sphere_cap(theta0, filling, resolution)?;
    let fine = sphere_chain_integral(&cap);
    let coarse = sphere_chain_integral(&cap.with_resolution([resolution / 2, resolution / 2]).unwrap_or(cap.clone()));
    let (_, err) = richardson(coarse, fine, 2.0);
    Ok(HolonomyReport {
        value_mod_1: fine.rem_euclid(1.0),
        raw_value: fine,
        filling_id: cap.id,
        resolution: vec![resolution, resolution],
        estimated_error: err,
    })
}

/// `i_X ω (∂_θ)` for the period-one rotation `X = 2π ∂_φ`.
fn rotation_contraction(theta: f64) -> f64 {
    let at = SphereChart::new(theta, 0.0);
    sphere_area_form(&at, &SphereChart::new(0.0, 2.0 * PI), &SphereChart::new(1.0, 0.0))
}

pub const HAMILTONIAN_PANELS: usize = 2048;

/// `g(θ) = ∫_{π/2}^{θ} i_Xω(∂_θ)` along a meridian.
fn meridian_primitive(theta: f64) -> Result<f64> {
    simpson(rotation_contraction, 0.5 * PI, theta, HAMILTONIAN_PANELS)
}

/// Hamilton function `f` of the period-one rotation about the z-axis,
/// `i_X ω = df`, normalized by `∫ f ω = 0`: `f = g + C` with `g` the
/// meridian primitive from the equator and `C = −∫ g ω`.
pub fn sphere_rotation_hamiltonian(theta: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::InvalidParameter(format!("polar angle {theta} outside [0, π]")));
    }
    Ok(meridian_primitive(theta)? + hamiltonian_constant()?)
}

fn hamiltonian_constant() -> Result<f64> {
    // ∫ g ω = ∫₀^π g(θ) sinθ/(4π) · 2π dθ; g is tabulated cumulatively
    let n = HAMILTONIAN_PANELS;
    let h = PI / n as f64;
    let mut g = vec![0.0; n + 1];
    let mid = n / 2;
    for i in (mid + 1)..=n {
        g[i] = g[i - 1] + simpson(rotation_contraction, (i - 1) as f64 * h, i as f64 * h, 2)?;
    }
    for i in (0..mid).rev() {
        g[i] = g[i + 1] - simpson(rotation_contraction, i as f64 * h, (i + 1) as f64 * h, 2)?;
    }
    let mut integral = 0.0;
    for (i, gi) in g.iter().enumerate() {
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        integral += w * gi * (i as f64 * h).sin() * 0.5;
    }
    Ok(-integral * h / 3.0)
}
