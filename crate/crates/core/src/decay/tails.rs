//! Tail sums of e^{−C̄ω(√n)} and weighted L² moments.

use serde::Serialize;

use super::TestFunction;
use crate::error::{Error, Result};
use crate::hermite::DECAY_THRESHOLD;
use crate::integrate::trapezoid;
use crate::grid::uniform_step;
use crate::weights::{OmegaStar, WeightFunction};

/// Terms below this are dropped from tail sums.
pub const TERM_CUTOFF: f64 = 1e-30;
/// Largest number of terms summed before the tail is declared divergent.
pub const MAX_TERMS: usize = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailPoint {
    pub y: f64,
    /// Σ_{n ≥ y} e^{−C̄ω(√n)}.
    pub tail: f64,
    /// tail / e^{−C̄ω(√y)/2}.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailSumReport {
    pub cbar: f64,
    pub points: Vec<TailPoint>,
    /// Smallest C with Σ_{n ≥ y} e^{−C̄ω(√n)} ≤ C e^{−C̄ω(√y)/2} for every
    /// integer y in [1, max ys] and every requested y.
    pub constant: f64,
    /// Index at which the summation stopped.
    pub terms: usize,
    pub holds: bool,
}

/// Checks Σ_{n ≥ y} e^{−C̄ω(√n)} ≤ C e^{−C̄ω(√y)/2} by direct summation.
pub fn tail_sum_check(w: &WeightFunction, cbar: f64, ys: &[f64]) -> Result<TailSumReport> {
    if !(cbar.is_finite() && cbar > 0.0) {
        return Err(Error::Argument(format!("C̄ must be positive, got {cbar}")));
    }
    if ys.is_empty() {
        return Err(Error::Argument("no tail positions given".into()));
    }
    if let Some(y) = ys.iter().find(|y| !(y.is_finite() && **y >= 1.0)) {
        return Err(Error::Argument(format!("tail positions must be ≥ 1, got {y}")));
    }
    let w = w.scaled(cbar)?;
    let weight = |t: f64| {
        w.eval(t).map_err(|e| match e {
            Error::Extrapolation { t, hi, .. } => Error::Data(format!(
                "tail sum not summable within the weight's range: terms still above {TERM_CUTOFF:e} at \
                 √n = {t} beyond the table end {hi} (axiom (ii) fails numerically)"
            )),
            other => other,
        })
    };
    let y_max = ys.iter().copied().fold(1.0, f64::max).ceil() as usize;
    // terms[k] = e^{−C̄ω(√(k+1))}; summed until past y_max and below the cutoff.
    let mut terms = Vec::new();
    let mut n = 1usize;
    loop {
        let t = (-weight((n as f64).sqrt())?).exp();
        terms.push(t);
        if n >= y_max && t < TERM_CUTOFF {
            break;
        }
        if n >= MAX_TERMS {
            return Err(Error::Data(format!(
                "tail sum not resolved by direct summation: term {n} is still {t:.3e} (decay too slow or absent)"
            )));
        }
        n += 1;
    }
    let mut suffix = vec![0.0; terms.len() + 1];
    for k in (0..terms.len()).rev() {
        suffix[k] = suffix[k + 1] + terms[k];
    }
    let tail_at = |y: f64| suffix[(y.ceil() as usize - 1).min(terms.len())];
    let ratio_at = |y: f64| -> Result<f64> { Ok(tail_at(y) * (weight(y.sqrt())? / 2.0).exp()) };
    let mut constant = 0.0f64;
    for y in 1..=y_max {
        constant = constant.max(ratio_at(y as f64)?);
    }
    let mut points = Vec::with_capacity(ys.len());
    for &y in ys {
        let ratio = ratio_at(y)?;
        constant = constant.max(ratio);
        points.push(TailPoint { y, tail: tail_at(y), ratio });
    }
    Ok(TailSumReport { cbar, points, constant, terms: n, holds: constant.is_finite() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentPoint {
    pub nu: u32,
    /// ‖x^ν f‖_{L²}.
    pub moment: f64,
    pub omega_star: OmegaStar,
    /// moment / (e^{Ω*(ν+1)} ‖f‖_ω).
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentReport {
    pub weighted_norm: f64,
    pub points: Vec<MomentPoint>,
    /// Largest ratio over ν = 0..nu_max.
    pub constant: f64,
    /// √2 (e^{−Ω*(1)} + 1), a constant valid for every ν.
    pub reference_constant: f64,
    pub within_reference: bool,
    pub truncation_warning: Option<String>,
}

/// ‖x^ν f‖_{L²} against e^{Ω*(ν+1)} ‖f‖_ω for ν = 0..nu_max, with Ω* the
/// conjugate over the half line.
pub fn moment_bound_check(f: &TestFunction, w: &WeightFunction, nu_max: u32) -> Result<MomentReport> {
    let norm = f.norm(w)?;
    if !norm.is_finite() {
        return Err(Error::Precondition(format!(
            "‖f‖_ω is not finite on the sample grid (value {}, witness {:?})",
            norm.value, norm.witness
        )));
    }
    let xs = f.xs();
    let step = uniform_step(xs)?;
    let samples = f.samples();
    let last = xs.len() - 1;
    let mut points = Vec::with_capacity(nu_max as usize + 1);
    let mut warning = None;
    for nu in 0..=nu_max {
        let weighted: Vec<f64> = xs.iter().zip(samples).map(|(&x, v)| x.powi(nu as i32) * v.norm()).collect();
        let edge = weighted[0].max(weighted[last]);
        if warning.is_none() && edge > DECAY_THRESHOLD {
            warning = Some(format!(
                "|x^{nu} f| has not decayed at the grid ends ({edge:.3e}); the moments are truncated"
            ));
        }
        let squares: Vec<f64> = weighted.iter().map(|v| v * v).collect();
        let moment = trapezoid(step, &squares).sqrt();
        let omega_star = w.omega_star_half_line(f64::from(nu + 1))?;
        let ratio = moment / (omega_star.value.exp() * norm.value);
        points.push(MomentPoint { nu, moment, omega_star, ratio });
    }
    let constant = points.iter().map(|p| p.ratio).fold(0.0, f64::max);
    let reference_constant = 2f64.sqrt() * ((-w.omega_star_half_line(1.0)?.value).exp() + 1.0);
    Ok(MomentReport {
        weighted_norm: norm.value,
        within_reference: constant <= reference_constant,
        points,
        constant,
        reference_constant,
        truncation_warning: warning,
    })
}
