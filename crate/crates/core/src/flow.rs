//! Binormal (vortex filament) flow `∂N/∂t = J tr II` on discrete loops.

use serde::{Deserialize, Serialize};

use crate::ambient::Vec3;
use crate::error::{Error, Result};
use crate::loops::{project_normal, DiscreteLoop, NormalSection, SmoothProbe};
use crate::tilde::tilde_metric;

const CUSP_TOL: f64 = 1e-12;

/// `κbᵢ = 2(e_{i−1} × eᵢ) / ((|e_{i−1}||eᵢ| + e_{i−1}·eᵢ) ℓᵢ)`.
///
/// The numerator over the bracket is the integrated curvature binormal,
/// `2 tan(ψ/2)` for turning angle `ψ`; dividing by the dual length gives the
/// pointwise value, which is `sec(π/n)/R` on a regular n-gon of radius `R`.
pub fn curvature_binormal(l: &DiscreteLoop) -> Result<NormalSection> {
    let n = l.len();
    let e = l.edges();
    let w = l.dual_lengths();
    let mut raw = Vec::with_capacity(n);
    for i in 0..n {
        let (a, b) = (e[(i + n - 1) % n], e[i]);
        let denom = a.norm() * b.norm() + a.dot(&b);
        if denom <= CUSP_TOL * a.norm() * b.norm() {
            return Err(Error::Cusp(i));
        }
        raw.push(2.0 * a.cross(&b) / (denom * w[i]));
    }
    project_normal(l, &raw)
}

/// `tr II = −J κb = −t × κb`, the curvature vector.
pub fn mean_curvature(l: &DiscreteLoop) -> Result<NormalSection> {
    let kb = curvature_binormal(l)?;
    let t = l.tangents()?;
    let v = kb.vectors().iter().zip(&t).map(|(k, t)| -t.cross(k)).collect();
    NormalSection::new(l, v)
}

/// Finite-difference step for length derivatives, `1e-5 · L/n`.
pub fn fd_step(l: &DiscreteLoop) -> f64 {
    1e-5 * l.total_length() / l.len() as f64
}

/// Central difference of `f` along `Y`.
pub fn directional_derivative(l: &DiscreteLoop, y: &NormalSection, f: impl Fn(&DiscreteLoop) -> Result<f64>) -> Result<f64> {
    let eps = fd_step(l);
    Ok((f(&l.perturb(y, eps)?)? - f(&l.perturb(y, -eps)?)?) / (2.0 * eps))
}

/// `|dL(Y) + g̃(tr II, Y)|` for a given section.
pub fn gradient_defect(l: &DiscreteLoop, y: &NormalSection) -> Result<f64> {
    let fd = directional_derivative(l, y, |m| Ok(m.total_length()))?;
    Ok((fd + tilde_metric(l, &mean_curvature(l)?, y)?).abs())
}

/// Largest [`gradient_defect`] over smooth random sections.
pub fn gradient_residual(l: &DiscreteLoop, trials: usize, seed: u64) -> Result<f64> {
    let mut worst = 0.0f64;
    for k in 0..trials {
        let y = SmoothProbe::new(l.space(), seed.wrapping_add(k as u64)).section(l)?;
        worst = worst.max(gradient_defect(l, &y)?);
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Integrator {
    Rk4,
    Euler,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    pub dt: f64,
    pub steps: usize,
    pub integrator: Integrator,
    /// Diagnostics and snapshots every `cadence` steps (and at the end).
    pub cadence: usize,
    /// Equal RK4/Euler sub-steps of `dt / substeps` per step.
    #[serde(default = "one")]
    pub substeps: usize,
}

fn one() -> usize {
    1
}

impl FlowConfig {
    pub fn rk4(dt: f64, steps: usize) -> Self {
        Self { dt, steps, integrator: Integrator::Rk4, cadence: steps.max(1), substeps: 1 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {}", self.dt)));
        }
        if self.cadence == 0 || self.substeps == 0 {
            return Err(Error::InvalidParameter("cadence and substeps must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub loop_: DiscreteLoop,
    pub time: f64,
    pub step: usize,
}

impl FlowState {
    pub fn new(l: DiscreteLoop) -> Self {
        Self { loop_: l, time: 0.0, step: 0 }
    }
}

fn stage(l: &DiscreteLoop, k: &[Vec3], h: f64, step: usize) -> Result<DiscreteLoop> {
    l.perturb_raw(k, h).map_err(|e| Error::StepFailure { step, reason: e.to_string() })
}

fn velocity(l: &DiscreteLoop, step: usize) -> Result<Vec<Vec3>> {
    match curvature_binormal(l) {
        Ok(v) => Ok(v.vectors().to_vec()),
        Err(e @ Error::Cusp(_)) => Err(e),
        Err(e) => Err(Error::StepFailure { step, reason: e.to_string() }),
    }
}

/// One step of the vertex ODE `v̇ᵢ = κbᵢ`.
pub fn step(state: &FlowState, config: &FlowConfig) -> Result<FlowState> {
    config.validate()?;
    let h = config.dt / config.substeps as f64;
    let mut l = state.loop_.clone();
    for _ in 0..config.substeps {
        l = substep(&l, h, config.integrator, state.step)?;
    }
    Ok(FlowState { loop_: l, time: state.time + config.dt, step: state.step + 1 })
}

fn substep(l: &DiscreteLoop, dt: f64, integrator: Integrator, s: usize) -> Result<DiscreteLoop> {
    Ok(match integrator {
        Integrator::Euler => stage(l, &velocity(l, s)?, dt, s)?,
        Integrator::Rk4 => {
            let k1 = velocity(l, s)?;
            let k2 = velocity(&stage(l, &k1, 0.5 * dt, s)?, s)?;
            let k3 = velocity(&stage(l, &k2, 0.5 * dt, s)?, s)?;
            let k4 = velocity(&stage(l, &k3, dt, s)?, s)?;
            let k: Vec<Vec3> = (0..l.len()).map(|i| (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0).collect();
            stage(l, &k, dt, s)?
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub step: usize,
    pub time: f64,
    pub length: f64,
    /// `|L − L₀| / L₀`.
    pub relative_length_drift: f64,
    /// `maxᵢ |ℓᵢ − ℓᵢ⁰| / ℓᵢ⁰`.
    pub max_dual_length_drift: f64,
    pub center_of_mass: [f64; 3],
}

impl Diagnostics {
    fn of(state: &FlowState, length0: f64, dual0: &[f64]) -> Self {
        let l = &state.loop_;
        let length = l.total_length();
        let drift = l.dual_lengths().iter().zip(dual0).map(|(a, b)| ((a - b) / b).abs()).fold(0.0, f64::max);
        let c = l.center_of_mass();
        Self {
            step: state.step,
            time: state.time,
            length,
            relative_length_drift: ((length - length0) / length0).abs(),
            max_dual_length_drift: drift,
            center_of_mass: [c.x, c.y, c.z],
        }
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Snapshots at the configured cadence, starting with the initial state.
    pub snapshots: Vec<FlowState>,
    pub diagnostics: Vec<Diagnostics>,
    /// `dt · max|κ|` at the start; should be well below 1.
    pub curvature_cfl: f64,
    /// `(dt/substeps) · 4/h²` with `h` the shortest edge: the largest
    /// linearized frequency times the sub-step. Explicit RK4 is unstable
    /// above `2√2`.
    pub dispersive_cfl: f64,
}

impl Trajectory {
    pub fn last(&self) -> &FlowState {
        self.snapshots.last().expect("trajectory holds the initial state")
    }
}

/// Integrates `config.steps` steps from `initial`.
pub fn run(initial: DiscreteLoop, config: &FlowConfig) -> Result<Trajectory> {
    config.validate()?;
    let kmax = curvature_binormal(&initial)?.max_norm();
    let hmin = initial.edges().iter().map(|e| e.norm()).fold(f64::INFINITY, f64::min);
    let (length0, dual0) = (initial.total_length(), initial.dual_lengths());
    let mut state = FlowState::new(initial);
    let mut out = Trajectory {
        snapshots: vec![state.clone()],
        diagnostics: vec![Diagnostics::of(&state, length0, &dual0)],
        curvature_cfl: config.dt * kmax,
        dispersive_cfl: config.dt / config.substeps as f64 * 4.0 / (hmin * hmin),
    };
    for k in 1..=config.steps {
        state = step(&state, config)?;
        if !state.loop_.vertices().iter().all(|v| v.iter().all(|c| c.is_finite())) {
            return Err(Error::StepFailure { step: k, reason: "non-finite vertex".into() });
        }
        if k % config.cadence == 0 || k == config.steps {
            out.diagnostics.push(Diagnostics::of(&state, length0, &dual0));
            out.snapshots.push(state.clone());
        }
    }
    Ok(out)
}

/// Least-squares circle through the vertices: returns the center, normal,
/// radius and RMS of the radial deviation. The plane is fitted first.
pub fn fit_circle(l: &DiscreteLoop) -> (Vec3, Vec3, f64, f64) {
    let n = l.len() as f64;
    let c: Vec3 = l.vertices().iter().sum::<Vec3>() / n;
    let mut cov = crate::ambient::Mat3::zeros();
    for v in l.vertices() {
        let d = v - c;
        cov += d * d.transpose();
    }
    let eig = cov.symmetric_eigen();
    let k = eig.eigenvalues.imin();
    let normal: Vec3 = eig.eigenvectors.column(k).into();
    let radii: Vec<f64> = l.vertices().iter().map(|v| (v - c - (v - c).dot(&normal) * normal).norm()).collect();
    let r = radii.iter().sum::<f64>() / n;
    let off_plane: Vec<f64> = l.vertices().iter().map(|v| (v - c).dot(&normal)).collect();
    let rms = (radii.iter().zip(&off_plane).map(|(ri, z)| (ri - r).powi(2) + z * z).sum::<f64>() / n).sqrt();
    (c, normal, r, rms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::AmbientSpace;
    use crate::loops::{circle, ellipse, rotate_j, trefoil};
    use std::f64::consts::PI;

    fn circ(r: f64, n: usize) -> DiscreteLoop {
        circle(AmbientSpace::Euclidean3, Vec3::zeros(), r, n).unwrap()
    }

    #[test]
    fn circle_binormal() {
        for r in [1.0, 2.0] {
            let l = circ(r, 256);
            let kb = curvature_binormal(&l).unwrap();
            let expected = 1.0 / (r * (PI / 256.0).cos());
            for v in kb.vectors() {
                assert!((v - expected * Vec3::z()).norm() < 1e-12);
                assert!((v - Vec3::z() / r).norm() < 1e-4);
            }
            let h = mean_curvature(&l).unwrap();
            for (hv, p) in h.vectors().iter().zip(l.vertices()) {
                assert!((hv + p.normalize() / r).norm() < 1e-4);
            }
            let jh = rotate_j(&l, &h).unwrap();
            assert!(jh.vectors().iter().zip(kb.vectors()).all(|(a, b)| (a - b).norm() < 1e-14));
        }
    }

    #[test]
    fn planar_and_reversed() {
        let l = ellipse(AmbientSpace::Euclidean3, Vec3::zeros(), 2.0, 0.7, 100).unwrap();
        let kb = curvature_binormal(&l).unwrap();
        assert!(kb.vectors().iter().all(|v| v.x == 0.0 && v.y == 0.0 && v.z > 0.0));
        // reversal swaps and negates the edge pair, so κb changes sign
        let r = curvature_binormal(&l.reversed()).unwrap();
        for i in 0..100 {
            assert!((kb.vectors()[i] + r.vectors()[(100 - i) % 100]).norm() < 1e-12);
        }
    }

    #[test]
    fn cusp_is_rejected() {
        let l = DiscreteLoop::new(AmbientSpace::Euclidean3, vec![Vec3::zeros(), Vec3::x(), Vec3::new(0.5, 0.0, 0.0), Vec3::new(0.5, 1.0, 0.0)]).unwrap();
        assert_eq!(curvature_binormal(&l), Err(Error::Cusp(1)));
    }

    #[test]
    fn gradient_defect_on_circle() {
        let l = circ(1.0, 256);
        let r = NormalSection::new(&l, l.vertices().to_vec()).unwrap();
        let fd = directional_derivative(&l, &r, |m| Ok(m.total_length())).unwrap();
        assert!((fd - l.total_length()).abs() < 1e-8);
        assert!(gradient_defect(&l, &r).unwrap() < 1e-3);
        let z = NormalSection::new(&l, vec![Vec3::z(); 256]).unwrap();
        assert!(gradient_defect(&l, &z).unwrap() < 1e-8);
    }

    #[test]
    fn euler_step_on_straight_torus_loop_is_identity() {
        let l = crate::loops::torus_loop(AmbientSpace::unit_torus(), crate::loops::Axis::X, [0.1, 0.2], 32).unwrap();
        assert_eq!(curvature_binormal(&l).unwrap().max_norm(), 0.0);
        let cfg = FlowConfig { integrator: Integrator::Euler, ..FlowConfig::rk4(1e-3, 1) };
        assert_eq!(step(&FlowState::new(l.clone()), &cfg).unwrap().loop_, l);
        let bad = FlowConfig { dt: 0.0, ..cfg };
        assert!(step(&FlowState::new(l), &bad).is_err());
    }

    #[test]
    fn rk4_stability_threshold_on_the_circle() {
        // stable below 2√2, blows up above it
        let limit = 2.0 * std::f64::consts::SQRT_2;
        for (n, stable) in [(64usize, true), (128, true), (256, false)] {
            let t = run(circ(1.0, n), &FlowConfig { cadence: 10, ..FlowConfig::rk4(1e-3, 100) }).unwrap();
            assert_eq!(t.dispersive_cfl < limit, stable, "n={n} cfl={}", t.dispersive_cfl);
            let drift = t.diagnostics.last().unwrap().relative_length_drift;
            assert_eq!(drift < 1e-10, stable, "n={n} drift={drift:e}");
        }
    }

    #[test]
    fn circle_radius_two_translates() {
        let l = circ(2.0, 256);
        let s = step(&FlowState::new(l.clone()), &FlowConfig::rk4(1e-3, 1)).unwrap();
        let d = s.loop_.center_of_mass() - l.center_of_mass();
        assert!((d - 5e-4 * Vec3::z()).norm() < 1e-7);
        let (_, _, r, _) = fit_circle(&s.loop_);
        assert!((r - 2.0).abs() < 1e-9);
    }

    #[test]
    fn zero_steps_returns_initial() {
        let l = circ(1.0, 32);
        let t = run(l.clone(), &FlowConfig::rk4(1e-3, 0)).unwrap();
        assert_eq!(t.snapshots.len(), 1);
        assert_eq!(t.last().loop_, l);
    }

    #[test]
    fn relabeling_commutes_with_step() {
        let l = trefoil(AmbientSpace::Euclidean3, Vec3::zeros(), 1.0, 128).unwrap();
        let cfg = FlowConfig::rk4(1e-3, 1);
        let a = step(&FlowState::new(l.rotated(17)), &cfg).unwrap();
        let b = step(&FlowState::new(l), &cfg).unwrap();
        let b = b.loop_.rotated(17);
        for (p, q) in a.loop_.vertices().iter().zip(b.vertices()) {
            assert!((p - q).norm() < 1e-12);
        }
    }
}
