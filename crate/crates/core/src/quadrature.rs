//! One-dimensional rules and refinement-order estimates.

use crate::error::{Error, Result};

/// Composite Simpson rule with `panels` (even, ≥ 2) subintervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> Result<f64> {
    if panels < 2 || panels % 2 != 0 {
        return Err(Error::InvalidParameter(format!("Simpson needs an even panel count ≥ 2, got {panels}")));
    }
    let h = (b - a) / panels as f64;
    let mut sum = f(a) + f(b);
    for i in 1..panels {
        sum += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    Ok(sum * h / 3.0)
}

/// Composite midpoint rule with `cells` subintervals.
pub fn midpoint(f: impl Fn(f64) -> f64, a: f64, b: f64, cells: usize) -> f64 {
    let h = (b - a) / cells as f64;
    (0..cells).map(|i| f(a + (i as f64 + 0.5) * h)).sum::<f64>() * h
}

/// Observed order `log₂(e_coarse / e_fine)` for a halving of the mesh size.
pub fn observed_order(e_coarse: f64, e_fine: f64) -> f64 {
    (e_coarse / e_fine).log2()
}

/// Smallest observed order along a refinement sequence of errors, each
/// obtained with half the mesh size of the previous.
pub fn min_order(errors: &[f64]) -> f64 {
    errors.windows(2).map(|w| observed_order(w[0], w[1])).fold(f64::INFINITY, f64::min)
}

/// Richardson extrapolation for a method of order `p` from values at mesh
/// sizes `h` and `h/2`: returns the extrapolated value and the error
/// estimate of the fine value.
pub fn richardson(coarse: f64, fine: f64, p: f64) -> (f64, f64) {
    let corr = (fine - coarse) / (2f64.powf(p) - 1.0);
    (fine + corr, corr.abs())
}
