//! Uniform radial bounds for l_{m,n} and the Krasikov inequality.
//!
//! Radial bound: l_{m,n}(r) ≤ K · b_{m+n}(r) with s = √(m+n+1),
//! b(r) = 1 for r ≤ s and e^{−(r−s)²} beyond.
//!
//! Krasikov: (n!/(n+α)!) x^{α+1} e^{−x} L_n^α(x)² ≤ 1444 n^{−1/6} (n+α+1)^{1/2},
//! i.e. x·ℓ_n^α(x)² ≤ 1444 n^{−1/6} (n+α+1)^{1/2} for n ≥ 1.

use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

use super::laguerre::{ln_factorial, normalized_laguerre_log, LAGUERRE_CEILING};
use crate::error::{Error, Result};

pub const KRASIKOV_CONSTANT: f64 = 1444.0;

const MAX_LISTED: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialPoint {
    pub m: usize,
    pub n: usize,
    pub r: f64,
    /// l_{m,n}(r) / b(r).
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialBoundReport {
    pub m_max: usize,
    pub grid_points: usize,
    /// Smallest K making the bound hold at every checked point.
    pub k: f64,
    /// Same, restricted to r ≤ s and to r > s.
    pub k_inner: f64,
    pub k_outer: f64,
    pub worst: Option<RadialPoint>,
    /// Constant the grid was certified against: the caller's, or `k`.
    pub certified_k: f64,
    pub violation_count: usize,
    /// Points where l_{m,n} > certified_k · b (first 1000).
    pub violations: Vec<RadialPoint>,
    pub pass: bool,
}

/// Checks all pairs m ≥ n with m ≤ m_max over `r_grid`. With `k_claim` the
/// violations are counted against that constant, otherwise against the
/// empirical K (so the verdict is pass iff K is finite).
pub fn radial_bound_check(m_max: usize, r_grid: &[f64], k_claim: Option<f64>) -> Result<RadialBoundReport> {
    if m_max > LAGUERRE_CEILING {
        return Err(Error::Capacity { requested: m_max, ceiling: LAGUERRE_CEILING });
    }
    if r_grid.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
        return Err(Error::Domain("radial grid must be finite and nonnegative".into()));
    }
    struct Partial {
        count: usize,
        k_inner: f64,
        k_outer: f64,
        worst: Option<RadialPoint>,
        violations: Vec<RadialPoint>,
        violation_count: usize,
    }
    let limit = k_claim.unwrap_or(f64::INFINITY);
    let partials: Vec<Partial> = (0..=m_max)
        .into_par_iter()
        .map(|alpha| {
            let len = m_max - alpha + 1;
            let mut acc = Partial {
                count: 0,
                k_inner: 0.0,
                k_outer: 0.0,
                worst: None,
                violations: Vec::new(),
                violation_count: 0,
            };
            for &r in r_grid {
                let logs = normalized_laguerre_log(alpha, 2.0 * r * r, len);
                for (n, &(_, log_l)) in logs.iter().enumerate() {
                    let m = n + alpha;
                    let s = ((m + n + 1) as f64).sqrt();
                    let log_b = if r <= s { 0.0 } else { -(r - s) * (r - s) };
                    let ratio = (log_l - PI.ln() - log_b).exp();
                    let ratio = if ratio.is_nan() { f64::INFINITY } else { ratio };
                    let pt = RadialPoint { m, n, r, ratio };
                    acc.count += 1;
                    if r <= s {
                        acc.k_inner = acc.k_inner.max(ratio);
                    } else {
                        acc.k_outer = acc.k_outer.max(ratio);
                    }
                    if acc.worst.is_none_or(|w| ratio > w.ratio) {
                        acc.worst = Some(pt);
                    }
                    if !(ratio <= limit) {
                        acc.violation_count += 1;
                        if acc.violations.len() < MAX_LISTED {
                            acc.violations.push(pt);
                        }
                    }
                }
            }
            acc
        })
        .collect();

    let mut report = RadialBoundReport {
        m_max,
        grid_points: 0,
        k: 0.0,
        k_inner: 0.0,
        k_outer: 0.0,
        worst: None,
        certified_k: 0.0,
        violation_count: 0,
        violations: Vec::new(),
        pass: false,
    };
    for p in partials {
        report.grid_points += p.count;
        report.k_inner = report.k_inner.max(p.k_inner);
        report.k_outer = report.k_outer.max(p.k_outer);
        if let Some(w) = p.worst {
            if report.worst.is_none_or(|b| w.ratio > b.ratio) {
                report.worst = Some(w);
            }
        }
        report.violation_count += p.violation_count;
        let room = MAX_LISTED - report.violations.len();
        report.violations.extend(p.violations.into_iter().take(room));
    }
    report.k = report.k_inner.max(report.k_outer);
    report.certified_k = k_claim.unwrap_or(report.k);
    report.pass = report.k.is_finite() && report.violation_count == 0;
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KrasikovPoint {
    pub n: usize,
    pub alpha: usize,
    pub x: f64,
    /// ln(lhs / rhs); the inequality holds where this is ≤ 0.
    pub log_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KrasikovReport {
    pub constant: f64,
    pub checked: usize,
    pub holds: bool,
    pub worst: Option<KrasikovPoint>,
    /// Same left-hand side without the n!/(n+α)! normalization.
    pub unnormalized_holds: bool,
    pub unnormalized_worst: Option<KrasikovPoint>,
}

/// Checks n ∈ [1, n_max], α ∈ [0, alpha_max] on `xs`.
pub fn krasikov_check(n_max: usize, alpha_max: usize, xs: &[f64]) -> Result<KrasikovReport> {
    if n_max > LAGUERRE_CEILING || alpha_max > LAGUERRE_CEILING {
        return Err(Error::Capacity { requested: n_max.max(alpha_max), ceiling: LAGUERRE_CEILING });
    }
    if xs.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::Domain("Krasikov grid must be finite and nonnegative".into()));
    }
    let worst: Vec<(Option<KrasikovPoint>, Option<KrasikovPoint>, usize)> = (0..=alpha_max)
        .into_par_iter()
        .map(|alpha| {
            let norm_shift: Vec<f64> =
                (0..=n_max).map(|n| ln_factorial(n + alpha) - ln_factorial(n)).collect();
            let log_rhs: Vec<f64> = (0..=n_max)
                .map(|n| {
                    let nf = n as f64;
                    KRASIKOV_CONSTANT.ln() - nf.ln() / 6.0 + 0.5 * (nf + alpha as f64 + 1.0).ln()
                })
                .collect();
            let (mut best, mut best_raw, mut count) = (None::<KrasikovPoint>, None::<KrasikovPoint>, 0);
            for &x in xs {
                if x == 0.0 {
                    continue;
                }
                let logs = normalized_laguerre_log(alpha, x, n_max + 1);
                for n in 1..=n_max {
                    let log_lhs = 2.0 * logs[n].1 + x.ln();
                    if log_lhs == f64::NEG_INFINITY {
                        continue;
                    }
                    count += 1;
                    let pt = KrasikovPoint { n, alpha, x, log_ratio: log_lhs - log_rhs[n] };
                    if best.is_none_or(|b| pt.log_ratio > b.log_ratio) {
                        best = Some(pt);
                    }
                    let raw = KrasikovPoint { log_ratio: pt.log_ratio + norm_shift[n], ..pt };
                    if best_raw.is_none_or(|b| raw.log_ratio > b.log_ratio) {
                        best_raw = Some(raw);
                    }
                }
            }
            (best, best_raw, count)
        })
        .collect();
    let pick = |sel: fn(&(Option<KrasikovPoint>, Option<KrasikovPoint>, usize)) -> Option<KrasikovPoint>| {
        worst
            .iter()
            .filter_map(sel)
            .fold(None::<KrasikovPoint>, |acc, p| match acc {
                Some(a) if a.log_ratio >= p.log_ratio => Some(a),
                _ => Some(p),
            })
    };
    let w = pick(|t| t.0);
    let w_raw = pick(|t| t.1);
    Ok(KrasikovReport {
        constant: KRASIKOV_CONSTANT,
        checked: worst.iter().map(|t| t.2).sum(),
        holds: w.is_none_or(|p| p.log_ratio <= 0.0),
        worst: w,
        unnormalized_holds: w_raw.is_none_or(|p| p.log_ratio <= 0.0),
        unnormalized_worst: w_raw,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::radial_modulus;

    fn grid(hi: f64, step: f64) -> Vec<f64> {
        (0..=(hi / step).round() as usize).map(|k| k as f64 * step).collect()
    }

    #[test]
    fn gaussian_pair_needs_k_one() {
        let r = radial_bound_check(0, &grid(7.0, 1.0 / 64.0), Some(1.0)).unwrap();
        assert!(r.pass);
        assert!((r.k - 1.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn far_tail_point() {
        let s = 16f64.sqrt();
        let r = s + 4.0;
        let l = radial_modulus(10, 5, r).unwrap();
        let rep = radial_bound_check(10, &[r], None).unwrap();
        assert!(l <= rep.k * (-16.0f64).exp() * (1.0 + 1e-12));
        assert!(rep.pass);
    }

    #[test]
    fn small_uniform_constant() {
        let r_grid = grid(12.0, 1.0 / 16.0);
        let rep = radial_bound_check(30, &r_grid, None).unwrap();
        assert!(rep.pass && rep.k.is_finite());
        assert_eq!(rep.grid_points, 31 * 32 / 2 * r_grid.len());
        assert!(!radial_bound_check(30, &r_grid, Some(rep.k * 0.5)).unwrap().pass);
    }

    #[test]
    fn krasikov_small_range() {
        let xs = grid(200.0, 0.25);
        let rep = krasikov_check(30, 10, &xs).unwrap();
        assert!(rep.holds, "{:?}", rep.worst);
        assert!(!rep.unnormalized_holds);
    }
}
