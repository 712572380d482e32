//! Wigner and ambiguity functions on grids.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{PI, SQRT_2};

use super::laguerre::{normalized_laguerre, parity_sign, phase, LAGUERRE_CEILING};
use super::{Convention, PhaseSpaceGrid};
use crate::error::{Error, Result};
use crate::grid::uniform_step;
use crate::hermite::{minus_i_pow, CoefficientSequence};
use crate::integrate::{gauss_kronrod, Tolerance};
use crate::states::DensityMatrix;
use crate::weights::{
    matrix_norm, phase_space_norm, require_strict_gaussian_limit, NormEstimate, WeightFunction,
};

/// Boundary magnitude above which marginals carry a truncation warning.
const MARGINAL_DECAY: f64 = 1e-12;

/// Σ_{m,n} X_{m,n} Φ_{m,n}(q,p), one Laguerre recurrence per diagonal band.
/// Uses Φ_{n,m} = conj Φ_{m,n}, so each band covers both triangles.
fn band_sum(x: &DMatrix<Complex64>, bands: &[bool], q: f64, p: f64) -> Complex64 {
    let big_n = x.nrows() - 1;
    let arg = 2.0 * (q * q + p * p);
    let u = phase(q, p);
    let mut u_pow = Complex64::new(1.0, 0.0);
    let mut total = Complex64::new(0.0, 0.0);
    for (alpha, &active) in bands.iter().enumerate() {
        if alpha > 0 {
            u_pow *= u;
        }
        if !active {
            continue;
        }
        let ell = normalized_laguerre(alpha, arg, big_n - alpha + 1);
        for (n, &l) in ell.iter().enumerate() {
            if l == 0.0 {
                continue;
            }
            let m = n + alpha;
            let phi = u_pow * (parity_sign(m) * l / PI);
            if alpha == 0 {
                total += x[(n, n)] * phi;
            } else {
                total += x[(m, n)] * phi + x[(n, m)] * phi.conj();
            }
        }
    }
    total
}

fn active_bands(x: &DMatrix<Complex64>) -> Vec<bool> {
    let n = x.nrows();
    let zero = Complex64::new(0.0, 0.0);
    (0..n)
        .map(|alpha| (0..n - alpha).any(|k| x[(k + alpha, k)] != zero || x[(k, k + alpha)] != zero))
        .collect()
}

fn evaluate_on_grid(
    x: &DMatrix<Complex64>,
    q_axis: &[f64],
    p_axis: &[f64],
    scale_args: f64,
    convention: Convention,
) -> Result<PhaseSpaceGrid> {
    if x.nrows() - 1 > LAGUERRE_CEILING {
        return Err(Error::Capacity { requested: x.nrows() - 1, ceiling: LAGUERRE_CEILING });
    }
    let bands = active_bands(x);
    let np = p_axis.len();
    let values: Vec<Complex64> = (0..q_axis.len() * np)
        .into_par_iter()
        .map(|k| band_sum(x, &bands, scale_args * q_axis[k / np], scale_args * p_axis[k % np]))
        .collect();
    PhaseSpaceGrid::new(q_axis.to_vec(), p_axis.to_vec(), values, convention)
}

/// Φ_ρ(q,p) = Σ_{m,n} ρ_{m,n} Φ_{m,n}(q,p) on the grid.
pub fn wigner_of_density(rho: &DensityMatrix, q_axis: &[f64], p_axis: &[f64]) -> Result<PhaseSpaceGrid> {
    evaluate_on_grid(rho.entries(), q_axis, p_axis, 1.0, Convention::Plain)
}

/// Wigner transform of f by adaptive quadrature of its defining integral.
/// `support` is a half-width beyond which |f| is negligible.
pub fn wigner_pure_direct(
    f: impl Fn(f64) -> Complex64 + Sync,
    support: f64,
    q_axis: &[f64],
    p_axis: &[f64],
) -> Result<PhaseSpaceGrid> {
    if !(support > 0.0 && support.is_finite()) {
        return Err(Error::Argument(format!("support half-width must be positive, got {support}")));
    }
    let np = p_axis.len();
    let tol = Tolerance { abs: 1e-14, rel: 1e-12, max_intervals: 20_000 };
    let values = (0..q_axis.len() * np)
        .into_par_iter()
        .map(|k| {
            let (q, p) = (q_axis[k / np], p_axis[k % np]);
            // Both q ∓ x/2 must lie in [−support, support].
            let half = support - q.abs();
            if half <= 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let integrand = |x: f64| Complex64::cis(p * x) * f(q - x / 2.0) * f(q + x / 2.0).conj();
            Ok(gauss_kronrod(integrand, -2.0 * half, 2.0 * half, tol)?.value / (2.0 * PI))
        })
        .collect::<Result<Vec<_>>>()?;
    PhaseSpaceGrid::new(q_axis.to_vec(), p_axis.to_vec(), values, Convention::Plain)
}

/// Φ̃(q,p) = ½ Φ(q/√2, p/√2): axes stretched by √2, values halved.
pub fn tilde_rescale(grid: &PhaseSpaceGrid) -> Result<PhaseSpaceGrid> {
    if grid.convention() != Convention::Plain {
        return Err(Error::Convention("grid is already in the tilde convention".into()));
    }
    PhaseSpaceGrid::new(
        grid.q_axis().iter().map(|q| q * SQRT_2).collect(),
        grid.p_axis().iter().map(|p| p * SQRT_2).collect(),
        grid.values().iter().map(|v| v * 0.5).collect(),
        Convention::Tilde,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Marginals {
    /// ∫ Φ(q, p) dp at each q.
    pub q_marginal: Vec<f64>,
    /// ∫ Φ(q, p) dq at each p.
    pub p_marginal: Vec<f64>,
    pub boundary_magnitude: f64,
    pub truncation_warning: Option<String>,
}

/// Trapezoid integrals of Re Φ along each axis.
pub fn marginals(grid: &PhaseSpaceGrid) -> Result<Marginals> {
    let (dq, dp) = (uniform_step(grid.q_axis())?, uniform_step(grid.p_axis())?);
    let (nq, np) = (grid.q_axis().len(), grid.p_axis().len());
    let w = |k: usize, n: usize| if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
    let q_marginal =
        (0..nq).map(|i| dp * (0..np).map(|j| w(j, np) * grid.value(i, j).re).sum::<f64>()).collect();
    let p_marginal =
        (0..np).map(|j| dq * (0..nq).map(|i| w(i, nq) * grid.value(i, j).re).sum::<f64>()).collect();
    let mut boundary_magnitude = 0.0f64;
    for i in 0..nq {
        for j in 0..np {
            if i == 0 || j == 0 || i == nq - 1 || j == np - 1 {
                boundary_magnitude = boundary_magnitude.max(grid.value(i, j).norm());
            }
        }
    }
    let truncation_warning = (boundary_magnitude > MARGINAL_DECAY).then(|| {
        format!("|Φ| = {boundary_magnitude:.3e} on the grid boundary; marginals are truncated")
    });
    Ok(Marginals { q_marginal, p_marginal, boundary_magnitude, truncation_warning })
}

/// A(f,f)(θ,ϖ) = Σ_{m,n} ((−i)^{m+n}/2) c_m conj(c_n) Φ_{m,n}(θ/2, ϖ/2).
pub fn ambiguity_of_coefficients(
    alpha: &CoefficientSequence,
    theta_axis: &[f64],
    varpi_axis: &[f64],
) -> Result<PhaseSpaceGrid> {
    let c = alpha.values();
    let n = c.len();
    let x = DMatrix::from_fn(n, n, |m, k| minus_i_pow(m + k) * c[m] * c[k].conj() * 0.5);
    evaluate_on_grid(&x, theta_axis, varpi_axis, 0.5, Convention::Plain)
}

/// (1/2π) ∬ e^{−i(θq+ϖp)} Φ(q,p) dq dp by the trapezoid rule, done as two 1-D passes.
pub fn fourier_2d_numeric(
    grid: &PhaseSpaceGrid,
    theta_axis: &[f64],
    varpi_axis: &[f64],
) -> Result<PhaseSpaceGrid> {
    let (dq, dp) = (uniform_step(grid.q_axis())?, uniform_step(grid.p_axis())?);
    let (qs, ps) = (grid.q_axis(), grid.p_axis());
    let (nq, np) = (qs.len(), ps.len());
    let w = |k: usize, n: usize| if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
    // Pass 1: G(θ, p_j) = Σ_i w_i Φ(q_i, p_j) e^{−iθq_i}.
    let partial: Vec<Vec<Complex64>> = theta_axis
        .par_iter()
        .map(|&theta| {
            let phases: Vec<Complex64> =
                (0..nq).map(|i| Complex64::cis(-theta * qs[i]) * w(i, nq)).collect();
            (0..np)
                .map(|j| (0..nq).map(|i| grid.value(i, j) * phases[i]).sum())
                .collect()
        })
        .collect();
    let p_phases: Vec<Vec<Complex64>> = varpi_axis
        .iter()
        .map(|&v| (0..np).map(|j| Complex64::cis(-v * ps[j]) * w(j, np)).collect())
        .collect();
    let scale = dq * dp / (2.0 * PI);
    let values = partial
        .iter()
        .flat_map(|g| {
            p_phases.iter().map(move |ph| g.iter().zip(ph).map(|(a, b)| a * b).sum::<Complex64>() * scale)
        })
        .collect();
    PhaseSpaceGrid::new(theta_axis.to_vec(), varpi_axis.to_vec(), values, grid.convention())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WignerNormCase {
    pub cbar: f64,
    pub matrix_norm: NormEstimate,
    /// |Φ_ρ|_ω / ‖ρ‖_{C̄ω}; infinite unless both norms are finite on the grid.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WignerNormReport {
    pub phase_space_norm: NormEstimate,
    pub cases: Vec<WignerNormCase>,
    /// Smallest C̄ on the grid with a finite ratio.
    pub smallest_cbar: Option<f64>,
    pub in_class: bool,
}

/// Compares |Φ_ρ|_ω with ‖ρ‖_{C̄ω} for each C̄. The weight must satisfy the
/// strict Gaussian-limit axiom.
pub fn wigner_norm_comparison(
    rho: &DensityMatrix,
    w: &WeightFunction,
    cbar_grid: &[f64],
    q_axis: &[f64],
    p_axis: &[f64],
) -> Result<WignerNormReport> {
    require_strict_gaussian_limit(w)?;
    let grid = wigner_of_density(rho, q_axis, p_axis)?;
    let phase = phase_space_norm(&grid, w)?;
    let mut cases = Vec::with_capacity(cbar_grid.len());
    for &cbar in cbar_grid {
        let mn = matrix_norm(rho, &w.scaled(cbar)?)?;
        let ratio = if phase.is_finite() && mn.is_finite() && mn.value > 0.0 {
            phase.value / mn.value
        } else {
            f64::INFINITY
        };
        cases.push(WignerNormCase { cbar, matrix_norm: mn, ratio });
    }
    let smallest_cbar = cases
        .iter()
        .filter(|c| c.ratio.is_finite())
        .map(|c| c.cbar)
        .fold(None, |acc: Option<f64>, c| Some(acc.map_or(c, |a| a.min(c))));
    Ok(WignerNormReport { phase_space_norm: phase, in_class: smallest_cbar.is_some(), cases, smallest_cbar })
}
