//! Convex conjugate Ω*(ν) = sup_u {νu − Ω(u)} of Ω(u) = ω(e^u).

use serde::Serialize;

use super::{Shape, WeightFunction};
use crate::error::{Error, Result};

/// Bracket for the numerical maximization, in u = ln t.
const BRACKET: f64 = 60.0;
const GOLDEN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(super) enum Domain {
    RealLine,
    HalfLine,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum ConjugateMethod {
    /// Stationary point of the power law. `argmax` is −∞ when the supremum is
    /// only approached (ν = 0 on the real line).
    ClosedForm { argmax: f64 },
    GoldenSection { argmax: f64, iterations: usize, at_lower_end: bool },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OmegaStar {
    pub value: f64,
    #[serde(flatten)]
    pub method: ConjugateMethod,
}

pub(super) fn omega_star(w: &WeightFunction, nu: f64, domain: Domain) -> Result<OmegaStar> {
    if nu.is_nan() || nu < 0.0 {
        return Err(Error::Domain(format!("conjugate evaluated at nu = {nu}; nu must be ≥ 0")));
    }
    match w.shape {
        Shape::Power { beta } => Ok(power_closed_form(w.lambda, beta, nu, domain)),
        Shape::Tabulated { .. } => golden_section(w, nu, domain),
    }
}

fn power_closed_form(lambda: f64, beta: f64, nu: f64, domain: Domain) -> OmegaStar {
    // Ω(u) = λ e^{βu}; stationary point λβ e^{βu} = ν.
    let threshold = lambda * beta;
    let (value, argmax) = match domain {
        Domain::RealLine if nu == 0.0 => (0.0, f64::NEG_INFINITY),
        Domain::HalfLine if nu <= threshold => (-lambda, 0.0),
        _ => {
            let log_ratio = (nu / threshold).ln();
            ((nu / beta) * (log_ratio - 1.0), log_ratio / beta)
        }
    };
    OmegaStar { value, method: ConjugateMethod::ClosedForm { argmax } }
}

fn golden_section(w: &WeightFunction, nu: f64, domain: Domain) -> Result<OmegaStar> {
    let (t_lo, t_hi) = w.domain();
    let mut lo = if t_lo > 0.0 { t_lo.ln().max(-BRACKET) } else { -BRACKET };
    let hi = t_hi.ln().min(BRACKET);
    if domain == Domain::HalfLine {
        lo = lo.max(0.0);
    }
    if !(hi > lo) {
        return Err(Error::Numeric(format!(
            "empty maximization bracket [{lo}, {hi}] for the tabulated weight"
        )));
    }
    let objective = |u: f64| -> Result<f64> {
        let t = u.exp().clamp(t_lo, t_hi);
        Ok(nu * u - w.eval(t)?)
    };

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (objective(c)?, objective(d)?);
    let mut iterations = 0;
    while (b - a) > GOLDEN_TOL {
        iterations += 1;
        if iterations > 500 {
            return Err(Error::Numeric(format!(
                "golden-section search did not converge for nu = {nu} (bracket width {})",
                b - a
            )));
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d)?;
        }
    }
    let argmax = 0.5 * (a + b);
    let mut value = objective(argmax)?;
    // The endpoints are never sampled by the interior probes.
    let f_lo = objective(lo)?;
    let at_lower_end = f_lo >= value || argmax - lo < 1e3 * GOLDEN_TOL;
    if f_lo > value {
        value = f_lo;
    }
    if hi - argmax < 1e3 * GOLDEN_TOL || objective(hi)? > value {
        return Err(Error::Numeric(format!(
            "conjugate objective still increasing at the upper end u = {hi:.3} of the bracket \
             (nu = {nu}); the table does not extend far enough to locate the supremum"
        )));
    }
    Ok(OmegaStar {
        value,
        method: ConjugateMethod::GoldenSection {
            argmax: if at_lower_end { lo } else { argmax },
            iterations,
            at_lower_end,
        },
    })
}
