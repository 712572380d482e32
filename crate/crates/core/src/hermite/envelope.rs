//! Gaussian tail envelope |h_n(x)| ≤ e^{−(|x|−s)²/2} beyond the turning point s = √(2n+1).

use serde::Serialize;

use super::hermite_values;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailEnvelopeReport {
    pub n: usize,
    pub turning_point: f64,
    pub holds: bool,
    /// Points with |x| ≥ s that were checked.
    pub checked: usize,
    /// min over checked points of envelope − |h_n|.
    pub min_slack: f64,
    /// Point with the smallest slack.
    pub tightest_x: Option<f64>,
    pub violations: Vec<f64>,
    /// |h_n(s)|·n^{1/12}; recorded only, the sharper decay is not asserted.
    pub turning_point_scaled: f64,
}

pub fn hermite_tail_envelope_check(n: usize, xs: &[f64]) -> Result<TailEnvelopeReport> {
    let s = (2.0 * n as f64 + 1.0).sqrt();
    let mut report = TailEnvelopeReport {
        n,
        turning_point: s,
        holds: true,
        checked: 0,
        min_slack: f64::INFINITY,
        tightest_x: None,
        violations: Vec::new(),
        turning_point_scaled: hermite_values(n, s)?[n].abs() * (n.max(1) as f64).powf(1.0 / 12.0),
    };
    for &x in xs {
        if x.abs() < s {
            continue;
        }
        let h = hermite_values(n, x)?[n].abs();
        let envelope = (-(x.abs() - s).powi(2) / 2.0).exp();
        let slack = envelope - h;
        report.checked += 1;
        if slack < report.min_slack {
            report.min_slack = slack;
            report.tightest_x = Some(x);
        }
        if slack < 0.0 {
            report.holds = false;
            report.violations.push(x);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn n0_at_three() {
        let r = hermite_tail_envelope_check(0, &[3.0]).unwrap();
        assert!(r.holds);
        let lhs = PI.powf(-0.25) * (-4.5f64).exp();
        assert!((r.min_slack - ((-2.0f64).exp() - lhs)).abs() < 1e-15);
    }

    #[test]
    fn n10_on_tail_grid() {
        let s = 21f64.sqrt();
        let xs: Vec<f64> = (0..=((12.0 - s) * 64.0) as usize).map(|k| s + k as f64 / 64.0).collect();
        let r = hermite_tail_envelope_check(10, &xs).unwrap();
        assert!(r.holds && r.checked == xs.len());
    }

    #[test]
    fn turning_point_itself() {
        let s = 21f64.sqrt();
        let r = hermite_tail_envelope_check(10, &[s, -s]).unwrap();
        assert!(r.holds && r.checked == 2);
    }
}
