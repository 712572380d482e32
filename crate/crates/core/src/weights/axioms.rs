//! Grid checks of the weight-function axioms.
//!
//! (i)   Ω(u) = ω(e^u) is convex
//! (ii)  log t = o(ω(t))
//! (iii) ω(2t) = O(ω(t))
//! (iv)  limsup ω(t)/t² ≤ 1/2
//! (v)   limsup ω(t)/t² < 1/2
//!
//! Limits cannot be certified from finitely many samples. The limit axioms
//! look at the last decade of the grid: a monotone trend there is read as the
//! limiting behavior, anything else is reported as inconclusive.

use serde::Serialize;

use super::WeightFunction;
use crate::error::{Error, Result};

const SLOPE_TOL: f64 = 1e-9;
const RATIO_TOL: f64 = 1e-12;
/// Lower and upper ends of the span a grid must cover to certify limits.
const GRID_SPAN: (f64, f64) = (1e-2, 1e4);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxiomVerdict {
    pub verdict: Verdict,
    /// Grid point (t, observed quantity) certifying a failure.
    pub witness: Option<(f64, f64)>,
    /// Summary statistic of the check (max convexity defect, final ratio, sup ratio, ...).
    pub observed: f64,
}

impl AxiomVerdict {
    fn pass(observed: f64) -> Self {
        Self { verdict: Verdict::Pass, witness: None, observed }
    }
    fn inconclusive(observed: f64) -> Self {
        Self { verdict: Verdict::Inconclusive, witness: None, observed }
    }
    fn fail(t: f64, value: f64, observed: f64) -> Self {
        Self { verdict: Verdict::Fail, witness: Some((t, value)), observed }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub convexity: AxiomVerdict,
    pub log_growth: AxiomVerdict,
    pub doubling: AxiomVerdict,
    pub gaussian_limit: AxiomVerdict,
    pub strict_gaussian_limit: AxiomVerdict,
}

impl AxiomReport {
    pub fn verdicts(&self) -> [(&'static str, &AxiomVerdict); 5] {
        [
            ("(i) convexity of ω∘exp", &self.convexity),
            ("(ii) log t = o(ω(t))", &self.log_growth),
            ("(iii) ω(2t) = O(ω(t))", &self.doubling),
            ("(iv) limsup ω(t)/t² ≤ 1/2", &self.gaussian_limit),
            ("(v) limsup ω(t)/t² < 1/2", &self.strict_gaussian_limit),
        ]
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts().iter().all(|(_, v)| v.verdict == Verdict::Pass)
    }
}

/// Logarithmic grid on [10⁻², 10⁴], 100 points per decade.
pub fn default_axiom_grid() -> Vec<f64> {
    let n = 600;
    (0..=n).map(|k| 10f64.powf(-2.0 + 6.0 * k as f64 / n as f64)).collect()
}

pub fn check_weight_axioms(w: &WeightFunction, grid: &[f64]) -> Result<AxiomReport> {
    if grid.is_empty() {
        return Err(Error::Argument("axiom check needs a nonempty grid".into()));
    }
    if grid.iter().any(|&t| !(t.is_finite() && t > 0.0)) {
        return Err(Error::Argument("axiom grid must consist of positive reals".into()));
    }
    if grid.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::Argument("axiom grid must be strictly increasing".into()));
    }
    let (lo, hi) = w.domain();
    let ts: Vec<f64> = grid.iter().copied().filter(|&t| t >= lo && t <= hi).collect();
    if ts.len() < 3 {
        return Err(Error::Argument(format!(
            "fewer than three grid points fall inside the weight's domain [{lo}, {hi}]"
        )));
    }
    let ws = ts.iter().map(|&t| w.eval(t)).collect::<Result<Vec<_>>>()?;
    let spans = ts[0] <= GRID_SPAN.0 * (1.0 + 1e-9) && ts[ts.len() - 1] >= GRID_SPAN.1 * (1.0 - 1e-9);
    let t_last = ts[ts.len() - 1];
    let tail_start = ts.partition_point(|&t| t < t_last / 10.0);
    let tail = tail_start..ts.len();

    let gate = |v: AxiomVerdict| {
        if v.verdict == Verdict::Pass && !spans {
            AxiomVerdict::inconclusive(v.observed)
        } else {
            v
        }
    };

    let convexity = convexity(&ts, &ws);

    let log_growth = {
        let idx: Vec<usize> = tail.clone().filter(|&k| ts[k] > 1.0).collect();
        if idx.len() < 2 {
            AxiomVerdict::inconclusive(f64::NAN)
        } else {
            let (first, last) = (idx[0], idx[idx.len() - 1]);
            let ratio = |k: usize| ts[k].ln() / ws[k];
            let rs: Vec<f64> = idx.iter().map(|&k| ratio(k)).collect();
            let final_ratio = rs[rs.len() - 1];
            if (ws[last] - ws[first]).abs() <= RATIO_TOL * ws[last].abs().max(1.0) {
                // ω flat over a whole decade while log t keeps growing.
                AxiomVerdict::fail(ts[last], final_ratio, final_ratio)
            } else if strictly_decreasing(&rs) {
                gate(AxiomVerdict::pass(final_ratio))
            } else {
                AxiomVerdict::inconclusive(final_ratio)
            }
        }
    };

    let doubling = {
        let mut ratios = Vec::new();
        for (k, &t) in ts.iter().enumerate() {
            if 2.0 * t <= hi && ws[k] > 0.0 {
                ratios.push((t, w.eval(2.0 * t)? / ws[k]));
            }
        }
        if ratios.len() < 2 {
            AxiomVerdict::inconclusive(f64::NAN)
        } else {
            let sup = ratios.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
            let last_t = ratios[ratios.len() - 1].0;
            let split = ratios.partition_point(|r| r.0 < last_t / 10.0);
            let head_sup = ratios[..split].iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
            let tail_vals: Vec<f64> = ratios[split..].iter().map(|r| r.1).collect();
            if nonincreasing(&tail_vals) || tail_vals.iter().all(|&r| r <= head_sup * (1.0 + RATIO_TOL)) {
                gate(AxiomVerdict::pass(sup))
            } else {
                AxiomVerdict::inconclusive(sup)
            }
        }
    };

    let quad: Vec<f64> = tail.clone().map(|k| ws[k] / (ts[k] * ts[k])).collect();
    let quad_ts: Vec<f64> = tail.map(|k| ts[k]).collect();
    let gaussian_limit = gate(limsup_check(&quad_ts, &quad, |r| r <= 0.5 * (1.0 + RATIO_TOL)));
    let strict_gaussian_limit = gate(limsup_check(&quad_ts, &quad, |r| r < 0.5 * (1.0 - RATIO_TOL)));

    Ok(AxiomReport { convexity, log_growth, doubling, gaussian_limit, strict_gaussian_limit })
}

/// Precondition error unless (v) passes on the default grid.
pub(crate) fn require_strict_gaussian_limit(w: &WeightFunction) -> Result<()> {
    let v = check_weight_axioms(w, &default_axiom_grid())?.strict_gaussian_limit;
    if v.verdict != Verdict::Pass {
        return Err(Error::Precondition(format!(
            "weight does not satisfy limsup ω(t)/t² < 1/2 (verdict {:?}, observed {})",
            v.verdict, v.observed
        )));
    }
    Ok(())
}

fn convexity(ts: &[f64], ws: &[f64]) -> AxiomVerdict {
    let us: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let slopes: Vec<f64> = (1..ts.len()).map(|k| (ws[k] - ws[k - 1]) / (us[k] - us[k - 1])).collect();
    let mut worst = 0.0f64;
    let mut witness = None;
    for k in 1..slopes.len() {
        let scale = slopes[k].abs().max(slopes[k - 1].abs()).max(f64::MIN_POSITIVE);
        let defect = (slopes[k - 1] - slopes[k]) / scale;
        if defect > worst {
            worst = defect;
            witness = Some((ts[k], defect));
        }
    }
    match witness {
        Some((t, d)) if worst > SLOPE_TOL => AxiomVerdict::fail(t, d, worst),
        _ => AxiomVerdict::pass(worst),
    }
}

/// Reads the trend of `ratios` over the last grid decade as the limit.
fn limsup_check(ts: &[f64], ratios: &[f64], accept: impl Fn(f64) -> bool) -> AxiomVerdict {
    let Some(&last) = ratios.last() else {
        return AxiomVerdict::inconclusive(f64::NAN);
    };
    let t_last = ts[ts.len() - 1];
    if nonincreasing(ratios) {
        if accept(last) {
            AxiomVerdict::pass(last)
        } else {
            AxiomVerdict::fail(t_last, last, last)
        }
    } else if !accept(last) {
        // Trend not decreasing and already out of range: the limsup is at least `last`.
        AxiomVerdict::fail(t_last, last, last)
    } else {
        AxiomVerdict::inconclusive(last)
    }
}

fn nonincreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|p| p[1] <= p[0] + RATIO_TOL * p[0].abs().max(p[1].abs()))
}

fn strictly_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|p| p[1] < p[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_weight_passes_everything() {
        let w = WeightFunction::power(1.0, 1.0).unwrap();
        let r = check_weight_axioms(&w, &default_axiom_grid()).unwrap();
        for (name, v) in r.verdicts() {
            assert_eq!(v.verdict, Verdict::Pass, "{name}: {v:?}");
        }
        assert!((r.doubling.observed - 2.0).abs() < 1e-12);
    }

    #[test]
    fn quadratic_unit_weight_fails_gaussian_limit() {
        let w = WeightFunction::power(1.0, 2.0).unwrap();
        let r = check_weight_axioms(&w, &default_axiom_grid()).unwrap();
        assert_eq!(r.gaussian_limit.verdict, Verdict::Fail);
        let (_, ratio) = r.gaussian_limit.witness.unwrap();
        assert!((ratio - 1.0).abs() < 1e-12);
        assert_eq!(r.strict_gaussian_limit.verdict, Verdict::Fail);
        assert_eq!(r.convexity.verdict, Verdict::Pass);
    }

    #[test]
    fn quadratic_subcritical_weight_passes() {
        let w = WeightFunction::power(0.4, 2.0).unwrap();
        let r = check_weight_axioms(&w, &default_axiom_grid()).unwrap();
        assert_eq!(r.gaussian_limit.verdict, Verdict::Pass);
        assert_eq!(r.strict_gaussian_limit.verdict, Verdict::Pass);
        assert!((r.gaussian_limit.observed - 0.4).abs() < 1e-12);
    }

    #[test]
    fn critical_weight_passes_iv_but_not_v() {
        let w = WeightFunction::power(0.5, 2.0).unwrap();
        let r = check_weight_axioms(&w, &default_axiom_grid()).unwrap();
        assert_eq!(r.gaussian_limit.verdict, Verdict::Pass);
        assert_eq!(r.strict_gaussian_limit.verdict, Verdict::Fail);
        assert!(r.strict_gaussian_limit.witness.is_some());
    }

    #[test]
    fn failures_always_carry_witnesses() {
        // Concave in log scale: a kink that breaks convexity.
        let w = WeightFunction::tabulated(&[[0.0, 0.0], [1.0, 5.0], [1e4, 5.5]]).unwrap();
        let r = check_weight_axioms(&w, &default_axiom_grid()).unwrap();
        for (_, v) in r.verdicts() {
            if v.verdict == Verdict::Fail {
                assert!(v.witness.is_some());
            }
        }
        assert_eq!(r.convexity.verdict, Verdict::Fail);
    }

    #[test]
    fn flat_tail_fails_log_growth() {
        let w = WeightFunction::tabulated(&[[0.0, 0.0], [10.0, 3.0], [1e4, 3.0]]).unwrap();
        let r = check_weight_axioms(&w, &default_axiom_grid()).unwrap();
        assert_eq!(r.log_growth.verdict, Verdict::Fail);
    }

    #[test]
    fn short_grid_cannot_certify_limits() {
        let w = WeightFunction::power(1.0, 1.0).unwrap();
        let grid: Vec<f64> = (1..=100).map(|k| k as f64).collect();
        let r = check_weight_axioms(&w, &grid).unwrap();
        assert_eq!(r.gaussian_limit.verdict, Verdict::Inconclusive);
        assert_eq!(r.convexity.verdict, Verdict::Pass);
    }

    #[test]
    fn empty_grid_is_an_argument_error() {
        let w = WeightFunction::power(1.0, 1.0).unwrap();
        assert!(matches!(check_weight_axioms(&w, &[]), Err(Error::Argument(_))));
    }
}
