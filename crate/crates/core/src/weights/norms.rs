//! Grid suprema of e^ω-weighted moduli.
//!
//! Each weighted value |v|·e^{ω} is formed as exp(ln|v| + ω), so a weight that
//! outgrows the data saturates to +∞ instead of producing inf·0 = NaN.

use num_complex::Complex64;
use serde::Serialize;

use super::WeightFunction;
use crate::error::{ensure_finite, Error, Result};
use crate::hermite::CoefficientSequence;
use crate::phase_space::PhaseSpaceGrid;
use crate::states::DensityMatrix;

/// Share of the grid (per axis, by extent or index range) treated as boundary
/// when deciding whether a supremum is genuinely attained.
pub const BOUNDARY_FRACTION: f64 = 0.05;

/// Relative slack under which an interior value counts as attaining the supremum.
const ATTAIN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Point { x: f64 },
    Frequency { xi: f64 },
    Index { n: usize },
    Entry { m: usize, n: usize },
    PhaseSpace { q: f64, p: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormEstimate {
    pub value: f64,
    /// Where the supremum is attained.
    pub witness: Option<Witness>,
    /// The supremum sits in the boundary region only, so growing the grid
    /// would increase it: the input is not in the weighted class on this grid.
    pub unbounded: bool,
}

impl NormEstimate {
    pub fn zero() -> Self {
        Self { value: 0.0, witness: None, unbounded: false }
    }

    pub fn is_finite(&self) -> bool {
        !self.unbounded && self.value.is_finite()
    }
}

/// Running maximum of ln|v| + ω split into boundary and interior parts.
struct LogSup {
    best: f64,
    witness: Option<Witness>,
    interior: f64,
}

impl LogSup {
    fn new() -> Self {
        Self { best: f64::NEG_INFINITY, witness: None, interior: f64::NEG_INFINITY }
    }

    fn push(&mut self, modulus: f64, weight: f64, boundary: bool, at: Witness) {
        if modulus == 0.0 {
            return;
        }
        let v = modulus.ln() + weight;
        if v > self.best {
            self.best = v;
            self.witness = Some(at);
        }
        if !boundary && v > self.interior {
            self.interior = v;
        }
    }

    fn finish(self) -> NormEstimate {
        if self.best == f64::NEG_INFINITY {
            return NormEstimate::zero();
        }
        let value = self.best.exp();
        let attained_inside = self.interior >= self.best + (1.0 - ATTAIN_TOL).ln();
        NormEstimate {
            value,
            witness: self.witness,
            unbounded: !attained_inside || !value.is_finite(),
        }
    }
}

fn boundary_threshold(extent: f64) -> f64 {
    (1.0 - BOUNDARY_FRACTION) * extent
}

fn axis_sup(
    xs: &[f64],
    vs: &[Complex64],
    w: &WeightFunction,
    witness: impl Fn(f64) -> Witness,
) -> Result<NormEstimate> {
    if xs.is_empty() || xs.len() != vs.len() {
        return Err(Error::Data(format!(
            "sample grid has {} abscissae and {} values",
            xs.len(),
            vs.len()
        )));
    }
    ensure_finite(xs.iter().copied(), "sample abscissae")?;
    ensure_finite(vs.iter().flat_map(|v| [v.re, v.im]), "samples")?;
    let cut = boundary_threshold(xs.iter().fold(0.0f64, |m, x| m.max(x.abs())));
    let mut sup = LogSup::new();
    for (&x, v) in xs.iter().zip(vs) {
        sup.push(v.norm(), w.eval(x.abs())?, x.abs() > cut, witness(x));
    }
    Ok(sup.finish())
}

/// ‖f‖_ω = sup|f(x)|e^{ω(|x|)} + sup|F f(ξ)|e^{ω(|ξ|)} over the sample grids.
pub fn function_norm(
    xs: &[f64],
    f: &[Complex64],
    xis: &[f64],
    ff: &[Complex64],
    w: &WeightFunction,
) -> Result<NormEstimate> {
    let a = axis_sup(xs, f, w, |x| Witness::Point { x })?;
    let b = axis_sup(xis, ff, w, |xi| Witness::Frequency { xi })?;
    Ok(NormEstimate {
        value: a.value + b.value,
        witness: if b.value > a.value { b.witness } else { a.witness },
        unbounded: a.unbounded || b.unbounded,
    })
}

/// ‖α‖_ω = sup_n |α_n|e^{ω(√n)}.
pub fn sequence_norm(alpha: &CoefficientSequence, w: &WeightFunction) -> Result<NormEstimate> {
    let values = alpha.values();
    ensure_finite(values.iter().flat_map(|v| [v.re, v.im]), "coefficients")?;
    let cut = boundary_threshold(alpha.n_max() as f64);
    let mut sup = LogSup::new();
    for (n, v) in values.iter().enumerate() {
        sup.push(v.norm(), w.eval((n as f64).sqrt())?, n as f64 > cut, Witness::Index { n });
    }
    Ok(sup.finish())
}

/// ‖ρ‖_ω = sup_{m,n} |ρ_{m,n}|e^{ω(√m)+ω(√n)}.
pub fn matrix_norm(rho: &DensityMatrix, w: &WeightFunction) -> Result<NormEstimate> {
    let big_n = rho.n_max();
    let entries = rho.entries();
    ensure_finite(entries.iter().flat_map(|v| [v.re, v.im]), "density matrix")?;
    let omegas = (0..=big_n)
        .map(|k| w.eval((k as f64).sqrt()))
        .collect::<Result<Vec<_>>>()?;
    let cut = boundary_threshold(big_n as f64);
    let mut sup = LogSup::new();
    for m in 0..=big_n {
        for n in 0..=big_n {
            let boundary = m.max(n) as f64 > cut;
            sup.push(entries[(m, n)].norm(), omegas[m] + omegas[n], boundary, Witness::Entry { m, n });
        }
    }
    Ok(sup.finish())
}

/// |Φ|_ω = sup|Φ(q,p)|e^{2(ω(|q|)+ω(|p|))}.
pub fn phase_space_norm(grid: &PhaseSpaceGrid, w: &WeightFunction) -> Result<NormEstimate> {
    let (qs, ps) = (grid.q_axis(), grid.p_axis());
    ensure_finite(grid.values().iter().flat_map(|v| [v.re, v.im]), "phase-space grid")?;
    let wq = qs.iter().map(|q| w.eval(q.abs())).collect::<Result<Vec<_>>>()?;
    let wp = ps.iter().map(|p| w.eval(p.abs())).collect::<Result<Vec<_>>>()?;
    let q_cut = boundary_threshold(qs.iter().fold(0.0f64, |m, q| m.max(q.abs())));
    let p_cut = boundary_threshold(ps.iter().fold(0.0f64, |m, p| m.max(p.abs())));
    let mut sup = LogSup::new();
    for (i, &q) in qs.iter().enumerate() {
        for (j, &p) in ps.iter().enumerate() {
            let boundary = q.abs() > q_cut || p.abs() > p_cut;
            sup.push(
                grid.value(i, j).norm(),
                2.0 * (wq[i] + wp[j]),
                boundary,
                Witness::PhaseSpace { q, p },
            );
        }
    }
    Ok(sup.finish())
}
