//! Empirical two-sided bounds between weighted function norms and weighted
//! coefficient norms.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{ensure_finite, Error, Result};
use crate::hermite::{
    analyze, fourier_in_coefficients, fourier_numeric, hermite_values, synthesize, CoefficientSequence,
    QuadratureRule,
};
use crate::weights::{
    function_norm, require_strict_gaussian_limit, sequence_norm, NormEstimate, WeightFunction, Witness,
};

pub const DEFAULT_CBAR_GRID: [f64; 7] = [1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0];

/// Coefficients below this multiple of ε·max|α| are quadrature noise.
const NOISE_FLOOR: f64 = 1e3 * f64::EPSILON;

type Evaluator = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// A function together with samples of itself and of its Fourier transform
/// on a common axis.
#[derive(Clone)]
pub struct TestFunction {
    eval: Evaluator,
    xs: Vec<f64>,
    samples: Vec<Complex64>,
    fourier: Vec<Complex64>,
    warning: Option<String>,
}

impl std::fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TestFunction")
            .field("points", &self.xs.len())
            .field("warning", &self.warning)
            .finish_non_exhaustive()
    }
}

fn check_axis(xs: &[f64]) -> Result<()> {
    if xs.len() < 2 {
        return Err(Error::Argument("sample axis needs at least two points".into()));
    }
    ensure_finite(xs.iter().copied(), "sample axis")
}

impl TestFunction {
    /// f = Σ α_n h_n, with F f = Σ (−i)^n α_n h_n.
    pub fn from_coefficients(alpha: &CoefficientSequence, xs: &[f64]) -> Result<Self> {
        check_axis(xs)?;
        let samples = synthesize(alpha, xs)?;
        let fourier = synthesize(&fourier_in_coefficients(alpha), xs)?;
        let coeffs = alpha.clone();
        let eval: Evaluator = Arc::new(move |x| match hermite_values(coeffs.n_max(), x) {
            Ok(h) => coeffs.values().iter().zip(&h).map(|(a, &hn)| a * hn).sum(),
            Err(_) => Complex64::new(f64::NAN, f64::NAN),
        });
        Ok(Self { eval, xs: xs.to_vec(), samples, fourier, warning: None })
    }

    /// A function whose Fourier transform is known in closed form.
    pub fn with_fourier(
        f: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
        fourier: impl Fn(f64) -> Complex64,
        xs: &[f64],
    ) -> Result<Self> {
        check_axis(xs)?;
        let samples: Vec<Complex64> = xs.iter().map(|&x| f(x)).collect();
        let fourier: Vec<Complex64> = xs.iter().map(|&x| fourier(x)).collect();
        ensure_finite(samples.iter().chain(&fourier).flat_map(|v| [v.re, v.im]), "test function samples")?;
        Ok(Self { eval: Arc::new(f), xs: xs.to_vec(), samples, fourier, warning: None })
    }

    /// Fourier samples by the trapezoid rule; `xs` must be uniform and symmetric.
    pub fn numeric(f: impl Fn(f64) -> Complex64 + Send + Sync + 'static, xs: &[f64]) -> Result<Self> {
        check_axis(xs)?;
        let samples: Vec<Complex64> = xs.iter().map(|&x| f(x)).collect();
        let t = fourier_numeric(xs, &samples, xs)?;
        Ok(Self { eval: Arc::new(f), xs: xs.to_vec(), samples, fourier: t.values, warning: t.truncation_warning })
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        (self.eval)(x)
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn fourier_samples(&self) -> &[Complex64] {
        &self.fourier
    }

    pub fn warning(&self) -> Option<&str> {
        self.warning.as_deref()
    }

    /// ‖f‖_ω on the sample axis.
    pub fn norm(&self, w: &WeightFunction) -> Result<NormEstimate> {
        function_norm(&self.xs, &self.samples, &self.xs, &self.fourier, w)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// ‖H(f)‖_ω against ‖f‖_{C̄ω}.
    Forward,
    /// ‖H⁻¹(α)‖_ω against ‖α‖_{C̄ω}.
    Backward,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TameCase {
    pub cbar: f64,
    pub rhs: NormEstimate,
    /// lhs / rhs; infinite unless both norms are finite on the grid.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TameBoundReport {
    pub direction: Direction,
    /// The ω-norm on the left of the bound.
    pub lhs: NormEstimate,
    pub cases: Vec<TameCase>,
    /// Smallest C̄ on the grid with a finite ratio.
    pub smallest_cbar: Option<f64>,
    /// The ratio at `smallest_cbar`.
    pub constant: Option<f64>,
    /// Every grid C̄ with a finite ratio.
    pub passing_scales: Vec<f64>,
    /// Set when no grid scale gives a finite ratio.
    pub finding: Option<String>,
    /// The left-hand supremum sits on a coefficient at the quadrature noise
    /// floor: e^{ω(√n_max)} amplifies rounding, not decay.
    pub noise_limited: bool,
}

impl TameBoundReport {
    pub fn in_class(&self) -> bool {
        self.smallest_cbar.is_some()
    }
}

fn check_cbar_grid(cbar_grid: &[f64]) -> Result<()> {
    if cbar_grid.is_empty() {
        return Err(Error::Argument("C̄ grid is empty".into()));
    }
    if let Some(c) = cbar_grid.iter().find(|c| !(c.is_finite() && **c > 0.0)) {
        return Err(Error::Argument(format!("C̄ grid values must be positive, got {c}")));
    }
    Ok(())
}

fn assemble(
    direction: Direction,
    lhs: NormEstimate,
    noise_limited: bool,
    cbar_grid: &[f64],
    rhs: impl Fn(&WeightFunction) -> Result<NormEstimate>,
    w: &WeightFunction,
) -> Result<TameBoundReport> {
    let mut cases = Vec::with_capacity(cbar_grid.len());
    for &cbar in cbar_grid {
        let r = rhs(&w.scaled(cbar)?)?;
        let ratio =
            if lhs.is_finite() && r.is_finite() && r.value > 0.0 { lhs.value / r.value } else { f64::INFINITY };
        cases.push(TameCase { cbar, rhs: r, ratio });
    }
    let best = cases.iter().filter(|c| c.ratio.is_finite()).min_by(|a, b| a.cbar.total_cmp(&b.cbar));
    let (smallest_cbar, constant) = (best.map(|c| c.cbar), best.map(|c| c.ratio));
    let passing_scales = cases.iter().filter(|c| c.ratio.is_finite()).map(|c| c.cbar).collect();
    let finding = smallest_cbar.is_none().then(|| {
        if lhs.is_finite() {
            "no grid scale C̄ gives a finite right-hand norm".to_string()
        } else if noise_limited {
            format!(
                "inconclusive: the left-hand ω-norm is dominated by coefficients at the quadrature noise floor \
                 (witness {:?}); use a smaller scale of the same weight class or a lower n_max",
                lhs.witness
            )
        } else {
            format!("not in class: the left-hand ω-norm is unbounded on the grid (witness {:?})", lhs.witness)
        }
    });
    Ok(TameBoundReport { direction, lhs, cases, smallest_cbar, constant, passing_scales, finding, noise_limited })
}

/// ‖H(f)‖_ω against ‖f‖_{C̄ω}, with H(f) computed by `rule` up to `n_max`.
pub fn verify_forward_bound(
    f: &TestFunction,
    w: &WeightFunction,
    cbar_grid: &[f64],
    n_max: usize,
    rule: &QuadratureRule,
) -> Result<TameBoundReport> {
    check_cbar_grid(cbar_grid)?;
    let alpha = analyze(|x| f.eval(x), n_max, rule)?;
    let lhs = sequence_norm(&alpha, w)?;
    let peak = alpha.values().iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let noise_limited = lhs.unbounded
        && matches!(lhs.witness, Some(Witness::Index { n }) if alpha.get(n).norm() <= NOISE_FLOOR * peak);
    assemble(Direction::Forward, lhs, noise_limited, cbar_grid, |wc| f.norm(wc), w)
}

/// ‖Σ α_n h_n‖_ω, sampled on `xs`, against ‖α‖_{C̄ω}. The weight must satisfy
/// the strict Gaussian-limit axiom.
pub fn verify_backward_bound(
    alpha: &CoefficientSequence,
    w: &WeightFunction,
    cbar_grid: &[f64],
    xs: &[f64],
) -> Result<TameBoundReport> {
    check_cbar_grid(cbar_grid)?;
    require_strict_gaussian_limit(w)?;
    let f = TestFunction::from_coefficients(alpha, xs)?;
    let lhs = f.norm(w)?;
    assemble(Direction::Backward, lhs, false, cbar_grid, |wc| sequence_norm(alpha, wc), w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::AxisSpec;
    use crate::hermite::gauss_hermite_rule;
    use std::f64::consts::PI;

    fn axis(half: f64, step: f64) -> Vec<f64> {
        AxisSpec::symmetric(half, step).unwrap().points()
    }

    fn h0() -> impl Fn(f64) -> Complex64 + Send + Sync + Clone {
        |x: f64| Complex64::new(PI.powf(-0.25) * (-x * x / 2.0).exp(), 0.0)
    }

    #[test]
    fn ground_state_forward() {
        let f = TestFunction::with_fourier(h0(), h0(), &axis(12.0, 1.0 / 16.0)).unwrap();
        let w = WeightFunction::power(0.2, 2.0).unwrap();
        let rule = gauss_hermite_rule(21).unwrap();
        let r = verify_forward_bound(&f, &w, &DEFAULT_CBAR_GRID, 20, &rule).unwrap();
        assert!((r.lhs.value - 1.0).abs() < 1e-12);
        assert_eq!(r.smallest_cbar, Some(1.0));
        // ‖h₀‖_{C̄ω} = 2π^{−1/4}, attained at the origin for 0.2 C̄ < 1/2.
        assert!((r.constant.unwrap() - PI.powf(0.25) / 2.0).abs() < 1e-12);
        assert_eq!(r.passing_scales, vec![1.0, 1.5, 2.0]);
        assert!(r.finding.is_none());
    }

    #[test]
    fn numeric_and_exact_transforms_agree() {
        let xs = axis(12.0, 1.0 / 16.0);
        let exact = TestFunction::with_fourier(h0(), h0(), &xs).unwrap();
        let numeric = TestFunction::numeric(h0(), &xs).unwrap();
        assert!(numeric.warning().is_none());
        for (a, b) in exact.fourier_samples().iter().zip(numeric.fourier_samples()) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn finite_combination_forward() {
        let alpha = CoefficientSequence::from_fn(10, |n| Complex64::new((-(n as f64)).exp(), 0.0)).unwrap();
        let f = TestFunction::from_coefficients(&alpha, &axis(14.0, 1.0 / 16.0)).unwrap();
        let w = WeightFunction::power(0.1, 1.0).unwrap();
        let rule = gauss_hermite_rule(41).unwrap();
        let r = verify_forward_bound(&f, &w, &DEFAULT_CBAR_GRID, 40, &rule).unwrap();
        assert!(r.in_class());
        assert!(r.constant.unwrap().is_finite());
    }

    #[test]
    fn polynomial_decay_is_not_in_class() {
        let alpha =
            CoefficientSequence::from_fn(400, |n| Complex64::new(1.0 / ((n + 1) as f64).powi(2), 0.0)).unwrap();
        let f = TestFunction::from_coefficients(&alpha, &axis(35.0, 1.0 / 8.0)).unwrap();
        let w = WeightFunction::power(1.0, 1.0).unwrap();
        let rule = gauss_hermite_rule(401).unwrap();
        let r = verify_forward_bound(&f, &w, &DEFAULT_CBAR_GRID, 400, &rule).unwrap();
        assert!(r.lhs.unbounded);
        assert!(!r.in_class());
        assert!(r.finding.as_deref().unwrap().starts_with("not in class"));
        assert!(!r.noise_limited);
        assert!(r.cases.iter().all(|c| c.ratio.is_infinite()));
    }

    #[test]
    fn noise_floor_is_flagged() {
        // e^{ω(√200)} ≈ e^{66} lifts quadrature rounding above the true coefficients.
        let alpha = CoefficientSequence::from_fn(200, |n| Complex64::new((-2.0 * (n as f64).powf(0.75)).exp(), 0.0))
            .unwrap();
        let f = TestFunction::from_coefficients(&alpha, &axis(30.0, 1.0 / 16.0)).unwrap();
        let w = WeightFunction::power(1.0, 1.5).unwrap();
        let rule = gauss_hermite_rule(201).unwrap();
        let r = verify_forward_bound(&f, &w, &DEFAULT_CBAR_GRID, 200, &rule).unwrap();
        assert!(r.noise_limited && !r.in_class());
        assert!(r.finding.as_deref().unwrap().starts_with("inconclusive"));
    }

    #[test]
    fn ground_state_backward() {
        let w = WeightFunction::power(0.2, 2.0).unwrap();
        let e0 = CoefficientSequence::unit(0, 0).unwrap();
        let r = verify_backward_bound(&e0, &w, &DEFAULT_CBAR_GRID, &axis(12.0, 1.0 / 16.0)).unwrap();
        assert!((r.lhs.value - 2.0 * PI.powf(-0.25)).abs() < 1e-12);
        assert_eq!(r.smallest_cbar, Some(1.0));
        assert_eq!(r.passing_scales.len(), DEFAULT_CBAR_GRID.len());
    }

    #[test]
    fn stretched_exponential_backward() {
        let alpha = CoefficientSequence::from_fn(300, |n| Complex64::new((-2.0 * (n as f64).sqrt()).exp(), 0.0))
            .unwrap();
        let w = WeightFunction::power(1.0, 1.0).unwrap();
        let r = verify_backward_bound(&alpha, &w, &DEFAULT_CBAR_GRID, &axis(35.0, 1.0 / 16.0)).unwrap();
        assert!(r.smallest_cbar.unwrap() <= 4.0);
        // ‖α‖_{C̄ω} grows at the truncation edge once C̄ > 2.
        assert!(r.cases.iter().filter(|c| c.cbar > 2.0).all(|c| c.rhs.unbounded));
    }

    #[test]
    fn backward_requires_strict_gaussian_limit() {
        let w = WeightFunction::power(1.0, 2.0).unwrap();
        let e0 = CoefficientSequence::unit(0, 0).unwrap();
        let r = verify_backward_bound(&e0, &w, &DEFAULT_CBAR_GRID, &axis(4.0, 0.5));
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn rejects_bad_cbar_grid() {
        let w = WeightFunction::power(0.2, 2.0).unwrap();
        let e0 = CoefficientSequence::unit(0, 0).unwrap();
        for grid in [&[][..], &[0.0][..], &[-1.0][..]] {
            let r = verify_backward_bound(&e0, &w, grid, &axis(4.0, 0.5));
            assert!(matches!(r, Err(Error::Argument(_))));
        }
    }
}
