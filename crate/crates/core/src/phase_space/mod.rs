//! Special Hermite functions, Wigner distributions and ambiguity functions.
//!
//! Conventions: the Wigner transform of f is
//! Φ(q,p) = (1/2π) ∫ e^{ipx} f(q − x/2) conj f(q + x/2) dx, the tilde form is
//! Φ̃(q,p) = ½ Φ(q/√2, p/√2), and the 2-D Fourier transform is
//! (1/2π) ∬ e^{−i(θq + ϖp)} Φ(q,p) dq dp.

mod bounds;
mod laguerre;
mod wigner;

pub use bounds::{
    krasikov_check, radial_bound_check, KrasikovPoint, KrasikovReport, RadialBoundReport,
    RadialPoint, KRASIKOV_CONSTANT,
};
pub use laguerre::{
    laguerre_values, radial_modulus, special_hermite, special_hermite_integral, LAGUERRE_CEILING,
    ORACLE_CEILING,
};
pub use wigner::{
    ambiguity_of_coefficients, fourier_2d_numeric, marginals, tilde_rescale, wigner_norm_comparison,
    wigner_of_density, wigner_pure_direct, Marginals, WignerNormCase, WignerNormReport,
};

pub(crate) use laguerre::{normalized_laguerre, parity_sign};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::grid::uniform_step;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    Plain,
    Tilde,
}

impl std::fmt::Display for Convention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Convention::Plain => "plain",
            Convention::Tilde => "tilde",
        })
    }
}

impl std::str::FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "plain" => Ok(Convention::Plain),
            "tilde" => Ok(Convention::Tilde),
            other => Err(Error::Convention(format!("unknown convention tag '{other}'"))),
        }
    }
}

/// Complex values on a rectangular (q, p) grid, stored row-major with one
/// row per q.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseSpaceGrid {
    q_axis: Vec<f64>,
    p_axis: Vec<f64>,
    values: Vec<Complex64>,
    convention: Convention,
    imag_residue: f64,
}

fn check_axis(axis: &[f64], name: &str) -> Result<()> {
    if axis.is_empty() {
        return Err(Error::Argument(format!("{name} axis is empty")));
    }
    ensure_finite(axis.iter().copied(), name)?;
    if axis.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Argument(format!("{name} axis must be strictly increasing")));
    }
    Ok(())
}

impl PhaseSpaceGrid {
    pub fn new(
        q_axis: Vec<f64>,
        p_axis: Vec<f64>,
        values: Vec<Complex64>,
        convention: Convention,
    ) -> Result<Self> {
        check_axis(&q_axis, "q")?;
        check_axis(&p_axis, "p")?;
        if values.len() != q_axis.len() * p_axis.len() {
            return Err(Error::Data(format!(
                "{} values for a {}×{} grid",
                values.len(),
                q_axis.len(),
                p_axis.len()
            )));
        }
        ensure_finite(values.iter().flat_map(|v| [v.re, v.im]), "phase-space values")?;
        let imag_residue = values.iter().fold(0.0f64, |m, v| m.max(v.im.abs()));
        Ok(Self { q_axis, p_axis, values, convention, imag_residue })
    }

    pub fn q_axis(&self) -> &[f64] {
        &self.q_axis
    }

    pub fn p_axis(&self) -> &[f64] {
        &self.p_axis
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.p_axis.len() + j]
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    /// max |Im Φ| over the grid.
    pub fn imag_residue(&self) -> f64 {
        self.imag_residue
    }

    /// Value at the grid point nearest to (q, p).
    pub fn nearest(&self, q: f64, p: f64) -> Complex64 {
        let idx = |axis: &[f64], v: f64| {
            (0..axis.len())
                .min_by(|&a, &b| (axis[a] - v).abs().total_cmp(&(axis[b] - v).abs()))
                .unwrap_or(0)
        };
        self.value(idx(&self.q_axis, q), idx(&self.p_axis, p))
    }

    /// ∬ |Φ|² dq dp by the trapezoid rule on uniform axes.
    pub fn l2_norm_sqr(&self) -> Result<f64> {
        let (dq, dp) = (uniform_step(&self.q_axis)?, uniform_step(&self.p_axis)?);
        let (nq, np) = (self.q_axis.len(), self.p_axis.len());
        let w = |k: usize, n: usize| if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
        let mut total = 0.0;
        for i in 0..nq {
            let mut row = 0.0;
            for j in 0..np {
                row += w(j, np) * self.value(i, j).norm_sqr();
            }
            total += w(i, nq) * row;
        }
        Ok(total * dq * dp)
    }
}
