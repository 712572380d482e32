//! Fit of |α_n| ≈ Ĉ e^{−λ̂ n^{β̂/2}}.
//!
//! With Ĉ = max|α_n|, the model is linear in log coordinates:
//! ln(−ln(|α_n|/Ĉ)) = ln λ̂ + β̂ · ln √n.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hermite::CoefficientSequence;

pub const MIN_SUPPORT: usize = 8;
const FIRST_INDEX: usize = 4;
const FLOOR: f64 = 1e-12;
const MAX_RESIDUAL: f64 = 0.05;
const BETA_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayEnvelope {
    pub lambda_hat: f64,
    pub beta_hat: f64,
    pub c_hat: f64,
    /// Largest |residual| of the fit in the ln(−ln) coordinates.
    pub residual: f64,
    pub support_count: usize,
}

/// Ordinary least squares y ≈ a + b x; returns (b, a).
pub fn ols(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let b = sxy / sxx;
    (b, my - b * mx)
}

pub fn fit_envelope(alpha: &CoefficientSequence) -> Result<DecayEnvelope> {
    let mags: Vec<f64> = alpha.values().iter().map(|v| v.norm()).collect();
    let c_hat = mags.iter().copied().fold(0.0, f64::max);
    let above_floor: Vec<usize> =
        (FIRST_INDEX..mags.len()).filter(|&n| c_hat > 0.0 && mags[n] > c_hat * FLOOR).collect();
    if above_floor.len() < MIN_SUPPORT {
        return Err(Error::InsufficientSupport { usable: above_floor.len(), required: MIN_SUPPORT });
    }
    let usable: Vec<usize> = above_floor.iter().copied().filter(|&n| mags[n] < c_hat).collect();
    if usable.len() < MIN_SUPPORT {
        return Err(Error::FitDegenerate(format!(
            "sequence does not decay: only {} of {} indices lie below the maximum",
            usable.len(),
            above_floor.len()
        )));
    }
    let xs: Vec<f64> = usable.iter().map(|&n| 0.5 * (n as f64).ln()).collect();
    let ys: Vec<f64> = usable.iter().map(|&n| (-(mags[n] / c_hat).ln()).ln()).collect();
    let (slope, intercept) = ols(&xs, &ys);
    let residual = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).abs()).fold(0.0, f64::max);
    let lambda_hat = intercept.exp();
    if !(slope > 0.0) || slope > 2.0 + BETA_SLACK {
        return Err(Error::FitDegenerate(format!(
            "fitted exponent β̂ = {slope:.4} lies outside (0, 2] (residual {residual:.3})"
        )));
    }
    if !(lambda_hat.is_finite() && lambda_hat > 0.0) {
        return Err(Error::FitDegenerate(format!("fitted scale λ̂ = {lambda_hat} is not positive")));
    }
    if residual > MAX_RESIDUAL {
        return Err(Error::FitDegenerate(format!(
            "decay is not of the form e^{{−λ n^{{β/2}}}}: residual {residual:.3} exceeds {MAX_RESIDUAL} \
             (β̂ = {slope:.4}, λ̂ = {lambda_hat:.4})"
        )));
    }
    Ok(DecayEnvelope {
        lambda_hat,
        beta_hat: slope.min(2.0),
        c_hat,
        residual,
        support_count: usable.len(),
    })
}
