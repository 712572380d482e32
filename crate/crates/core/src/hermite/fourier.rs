//! F f(ξ) = (2π)^{−1/2} ∫ f(x) e^{−iξx} dx by the trapezoid rule.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{ensure_finite, Error, Result};
use crate::grid::uniform_step;

/// Largest |f| allowed at the ends of the sample grid without a warning.
pub const DECAY_THRESHOLD: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledTransform {
    pub xi: Vec<f64>,
    pub values: Vec<Complex64>,
    /// max(|f(x_0)|, |f(x_last)|).
    pub boundary_magnitude: f64,
    pub truncation_warning: Option<String>,
}

/// Checks that `xs` is uniform and symmetric about 0; returns the spacing.
pub(crate) fn uniform_symmetric_step(xs: &[f64]) -> Result<f64> {
    let step = uniform_step(xs)?;
    if (xs[0] + xs[xs.len() - 1]).abs() > 1e-9 * step {
        return Err(Error::Argument("sample grid is not symmetric about 0".into()));
    }
    Ok(step)
}

pub fn fourier_numeric(xs: &[f64], f: &[Complex64], xi_grid: &[f64]) -> Result<SampledTransform> {
    if xs.len() != f.len() {
        return Err(Error::Data(format!("{} abscissae but {} samples", xs.len(), f.len())));
    }
    ensure_finite(f.iter().flat_map(|v| [v.re, v.im]), "function samples")?;
    ensure_finite(xi_grid.iter().copied(), "frequency grid")?;
    let step = uniform_symmetric_step(xs)?;
    let last = xs.len() - 1;
    let boundary_magnitude = f[0].norm().max(f[last].norm());
    let truncation_warning = (boundary_magnitude > DECAY_THRESHOLD).then(|| {
        format!(
            "samples have not decayed at the grid ends (|f| = {boundary_magnitude:.3e} at |x| = {}); \
             the transform is truncated",
            xs[last]
        )
    });
    let scale = step / (2.0 * std::f64::consts::PI).sqrt();
    let values = xi_grid
        .par_iter()
        .map(|&xi| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, (&x, &v)) in xs.iter().zip(f).enumerate() {
                let w = if k == 0 || k == last { 0.5 } else { 1.0 };
                acc += v * Complex64::cis(-xi * x) * w;
            }
            acc * scale
        })
        .collect();
    Ok(SampledTransform { xi: xi_grid.to_vec(), values, boundary_magnitude, truncation_warning })
}
