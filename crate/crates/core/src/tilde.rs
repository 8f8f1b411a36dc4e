//! The tilde operator on discrete loops.
//!
//! Pure line integrals use the edge-midpoint rule; anything that takes
//! normal sections uses the vertex rule weighted by dual lengths.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ambient::{det3, AnalyticVectorField, ClosedFormDiffeo, DifferentialForm, Vec3};
use crate::error::{Error, Result};
use crate::loops::{fundamental_section, project_normal, random_section, rotate_j, DiscreteLoop, NormalSection, SmoothProbe};

fn check_space(form: &DifferentialForm, l: &DiscreteLoop) -> Result<()> {
    if form.space() == l.space() {
        Ok(())
    } else {
        Err(Error::SpaceMismatch)
    }
}

fn check_len(l: &DiscreteLoop, y: &NormalSection) -> Result<()> {
    if y.len() == l.len() {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected: l.len(), got: y.len() })
    }
}

/// `∫_N β ≈ Σ β(mᵢ)(eᵢ)` over edge midpoints.
pub fn tilde_function(beta: &DifferentialForm, l: &DiscreteLoop) -> Result<f64> {
    check_space(beta, l)?;
    if beta.degree() != 1 {
        return Err(Error::DegreeMismatch { expected: 1, got: beta.degree() });
    }
    let mut sum = 0.0;
    for i in 0..l.len() {
        sum += beta.eval(&l.midpoint(i), &[l.edge(i)])?;
    }
    Ok(sum)
}

/// `∫_N i_Y β ≈ Σ β(vᵢ)(Yᵢ, tᵢ) ℓᵢ`.
pub fn tilde_oneform(beta: &DifferentialForm, l: &DiscreteLoop, y: &NormalSection) -> Result<f64> {
    check_space(beta, l)?;
    check_len(l, y)?;
    if beta.degree() != 2 {
        return Err(Error::DegreeMismatch { expected: 2, got: beta.degree() });
    }
    let (t, w) = (l.tangents()?, l.dual_lengths());
    let mut sum = 0.0;
    for i in 0..l.len() {
        sum += beta.eval(&l.vertex(i), &[y.vectors()[i], t[i]])? * w[i];
    }
    Ok(sum)
}

/// `∫_N i_{Y₂} i_{Y₁} α ≈ Σ α(vᵢ)(Y₁ᵢ, Y₂ᵢ, tᵢ) ℓᵢ`.
pub fn tilde_twoform(alpha: &DifferentialForm, l: &DiscreteLoop, y1: &NormalSection, y2: &NormalSection) -> Result<f64> {
    check_space(alpha, l)?;
    check_len(l, y1)?;
    check_len(l, y2)?;
    if alpha.degree() != 3 {
        return Err(Error::DegreeMismatch { expected: 3, got: alpha.degree() });
    }
    let (t, w) = (l.tangents()?, l.dual_lengths());
    let mut sum = 0.0;
    for i in 0..l.len() {
        sum += alpha.eval(&l.vertex(i), &[y1.vectors()[i], y2.vectors()[i], t[i]])? * w[i];
    }
    Ok(sum)
}

/// Marsden–Weinstein form `Ω(Y₁, Y₂) = Σ vol(Y₁ᵢ, Y₂ᵢ, tᵢ) ℓᵢ`.
pub fn mw_symplectic(l: &DiscreteLoop, y1: &NormalSection, y2: &NormalSection) -> Result<f64> {
    check_len(l, y1)?;
    check_len(l, y2)?;
    let (t, w) = (l.tangents()?, l.dual_lengths());
    Ok((0..l.len()).map(|i| det3(&y1.vectors()[i], &y2.vectors()[i], &t[i]) * w[i]).sum())
}

/// `g̃(Y₁, Y₂) = Σ ⟨Y₁ᵢ, Y₂ᵢ⟩ ℓᵢ`.
pub fn tilde_metric(l: &DiscreteLoop, y1: &NormalSection, y2: &NormalSection) -> Result<f64> {
    check_len(l, y1)?;
    check_len(l, y2)?;
    let w = l.dual_lengths();
    Ok((0..l.len()).map(|i| y1.vectors()[i].dot(&y2.vectors()[i]) * w[i]).sum())
}

/// Per-trial scale `Σ |Y₁ᵢ||Y₂ᵢ| ℓᵢ` used to make residuals relative.
fn pair_scale(l: &DiscreteLoop, y1: &NormalSection, y2: &NormalSection) -> f64 {
    let w = l.dual_lengths();
    (0..l.len()).map(|i| y1.vectors()[i].norm() * y2.vectors()[i].norm() * w[i]).sum::<f64>().max(f64::MIN_POSITIVE)
}

/// Largest relative `|Ω(Y₁, Y₂) − g̃(JY₁, Y₂)|` over random sections.
pub fn compatibility_residual(l: &DiscreteLoop, trials: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let y1 = random_section(l, &mut rng)?;
        let y2 = random_section(l, &mut rng)?;
        let r = (mw_symplectic(l, &y1, &y2)? - tilde_metric(l, &rotate_j(l, &y1)?, &y2)?).abs();
        worst = worst.max(r / pair_scale(l, &y1, &y2));
    }
    Ok(worst)
}

/// Residual of `φ*α̃ = (φ*α)~` over smooth random section pairs.
///
/// The left side transports sections by `Tφ` and re-projects them on the
/// image loop; both sides use their own vertex quadrature, so the residual
/// is a discretization error rather than round-off.
pub fn pullback_check(phi: &ClosedFormDiffeo, alpha: &DifferentialForm, l: &DiscreteLoop, trials: usize, seed: u64) -> Result<f64> {
    if phi.space() != l.space() {
        return Err(Error::SpaceMismatch);
    }
    let image = l.map_vertices(|v| phi.forward(v))?;
    let pulled = alpha.pullback(phi)?;
    let transport = |y: &NormalSection| -> Result<NormalSection> {
        let raw: Vec<Vec3> = l.vertices().iter().zip(y.vectors()).map(|(v, yi)| phi.tangent(v) * yi).collect();
        project_normal(&image, &raw)
    };
    let mut worst = 0.0f64;
    for k in 0..trials {
        let y1 = SmoothProbe::new(l.space(), seed.wrapping_add(2 * k as u64)).section(l)?;
        let y2 = SmoothProbe::new(l.space(), seed.wrapping_add(2 * k as u64 + 1)).section(l)?;
        let lhs = tilde_twoform(alpha, &image, &transport(&y1)?, &transport(&y2)?)?;
        let rhs = tilde_twoform(&pulled, l, &y1, &y2)?;
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// Largest `|α̃(ζ_X, Y) − (i_X α)~(Y)|` over random sections.
pub fn contraction_check(x: &AnalyticVectorField, alpha: &DifferentialForm, l: &DiscreteLoop, trials: usize, seed: u64) -> Result<f64> {
    let zeta = fundamental_section(x, l)?;
    let ix = alpha.interior(x)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let y = random_section(l, &mut rng)?;
        let r = (tilde_twoform(alpha, l, &zeta, &y)? - tilde_oneform(&ix, l, &y)?).abs();
        worst = worst.max(r);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::{catalog, AmbientSpace};
    use crate::loops::{circle, torus_loop, trefoil, Axis};
    use std::f64::consts::PI;

    fn unit_circle(n: usize) -> DiscreteLoop {
        circle(AmbientSpace::Euclidean3, Vec3::zeros(), 1.0, n).unwrap()
    }

    fn radial(l: &DiscreteLoop) -> NormalSection {
        NormalSection::new(l, l.vertices().iter().map(|v| v.normalize()).collect()).unwrap()
    }

    fn constant(l: &DiscreteLoop, v: Vec3) -> NormalSection {
        NormalSection::new(l, vec![v; l.len()]).unwrap()
    }

    #[test]
    fn line_integrals() {
        let e = AmbientSpace::Euclidean3;
        let l = unit_circle(256);
        let dz = DifferentialForm::covector(e, "dz", |_| Vec3::z()).unwrap();
        assert_eq!(tilde_function(&dz, &l).unwrap(), 0.0);
        let ang = DifferentialForm::planar_angle_form(e).unwrap();
        let v = tilde_function(&ang, &l).unwrap();
        assert!((v - 2.0 * PI).abs() < 1e-3);
        assert!((tilde_function(&ang, &l.reversed()).unwrap() + v).abs() < 1e-12);
    }

    #[test]
    fn oneform_on_circle() {
        let e = AmbientSpace::Euclidean3;
        let l = unit_circle(256);
        let dxdy = DifferentialForm::flux(e, "dx^dy", |_| Vec3::z()).unwrap();
        assert_eq!(tilde_oneform(&dxdy, &l, &NormalSection::zeros(&l)).unwrap(), 0.0);
        let r = radial(&l);
        let v = tilde_oneform(&dxdy, &l, &r).unwrap();
        assert!((v - 2.0 * PI).abs() < 1e-3);
        assert!((tilde_oneform(&dxdy, &l, &r.scaled(2.0)).unwrap() - 2.0 * v).abs() < 1e-12);
    }

    #[test]
    fn symplectic_and_metric_examples() {
        let l = unit_circle(256);
        let (e3, r) = (constant(&l, Vec3::z()), radial(&l));
        assert_eq!(mw_symplectic(&l, &r, &r).unwrap(), 0.0);
        let om = mw_symplectic(&l, &e3, &r).unwrap();
        assert!((om - 2.0 * PI).abs() < 1e-3);
        assert_eq!(mw_symplectic(&l, &r, &e3).unwrap(), -om);
        assert!((tilde_metric(&l, &e3, &e3).unwrap() - 2.0 * PI).abs() < 1e-3);
        // Ω(r̂, e₃) = g̃(J r̂, e₃) = g̃(−e₃, e₃)
        let jr = rotate_j(&l, &r).unwrap();
        let lhs = mw_symplectic(&l, &r, &e3).unwrap();
        let rhs = tilde_metric(&l, &jr, &e3).unwrap();
        assert!((lhs - rhs).abs() < 1e-12);
        assert!((lhs + 2.0 * PI).abs() < 1e-3);
        let bad = NormalSection::zeros(&unit_circle(10));
        assert!(matches!(mw_symplectic(&l, &bad, &r), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn compatibility_is_round_off() {
        let l = trefoil(AmbientSpace::Euclidean3, Vec3::zeros(), 1.0, 200).unwrap();
        assert!(compatibility_residual(&l, 100, 1).unwrap() < 1e-12);
        let t = torus_loop(AmbientSpace::unit_torus(), Axis::Y, [0.3, 0.4], 64).unwrap();
        assert!(compatibility_residual(&t, 100, 2).unwrap() < 1e-12);
    }

    #[test]
    fn nondegeneracy_sign() {
        let l = trefoil(AmbientSpace::Euclidean3, Vec3::zeros(), 1.0, 100).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let y = random_section(&l, &mut rng).unwrap();
            let jy = rotate_j(&l, &y).unwrap();
            let om = mw_symplectic(&l, &y, &jy).unwrap();
            let g = tilde_metric(&l, &y, &y).unwrap();
            assert!(om > 0.0);
            assert!((om - g).abs() < 1e-12 * g);
        }
    }

    #[test]
    fn pullback_identity_and_translation() {
        let t = AmbientSpace::unit_torus();
        let l = torus_loop(t, Axis::Z, [0.2, 0.7], 64).unwrap();
        let vol = DifferentialForm::volume(t).unwrap();
        let id = catalog::diffeo("identity", t).unwrap();
        assert_eq!(pullback_check(&id, &vol, &l, 5, 1).unwrap(), 0.0);
        let tr = catalog::diffeo("translation", t).unwrap();
        assert!(pullback_check(&tr, &vol, &l, 5, 1).unwrap() < 1e-12);
    }

    #[test]
    fn contraction_examples() {
        let e = AmbientSpace::Euclidean3;
        let l = unit_circle(64);
        let vol = DifferentialForm::volume(e).unwrap();
        for name in ["zero", "translation_e3", "rigid_rotation_z"] {
            let x = catalog::field(name, e).unwrap();
            assert!(contraction_check(&x, &vol, &l, 20, 3).unwrap() < 1e-12, "{name}");
        }
    }
}
