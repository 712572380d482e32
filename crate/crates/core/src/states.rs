//! Fock-basis density matrices.
//!
//! Also houses the alternating-sign diagonal matrix ρ_{m,m} = (−1)^m/((m+1)(m+2))
//! whose Wigner function has the closed form
//! Φ_ρ = (e^{x/2}/π) ∫₀¹ e^{x/(z−1)} dz, x = 2(q² + p²), bounded by e^{−x/2}/π,
//! although its diagonal only decays algebraically.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::decay::{fit_envelope, DecayEnvelope};
use crate::error::{ensure_finite, Error, Result};
use crate::hermite::CoefficientSequence;
use crate::integrate::{gauss_kronrod, Tolerance};
use crate::phase_space::{normalized_laguerre, parity_sign, LAGUERRE_CEILING};

const HERMITIAN_TOL: f64 = 1e-12;
const PSD_TOL: f64 = -1e-10;
const TRACE_TOL: f64 = 1e-8;
/// Radii over which ln Φ_ρ is fitted against r².
pub const GAUSSIAN_FIT_RANGE: (f64, f64) = (1.0, 3.0);
/// Largest radius at which the truncated series is compared with the closed form.
pub const SERIES_RADIUS: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Pure,
    Explicit,
    Counterexample,
}

/// Truncated matrix ρ_{m,n}, 0 ≤ m, n ≤ N.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<Complex64>,
    provenance: Provenance,
}

fn max_asymmetry(a: &DMatrix<Complex64>) -> (f64, Option<(usize, usize)>) {
    let mut worst = (0.0, None);
    for m in 0..a.nrows() {
        for n in 0..=m {
            let d = (a[(m, n)] - a[(n, m)].conj()).norm();
            if d > worst.0 {
                worst = (d, Some((m, n)));
            }
        }
    }
    worst
}

impl DensityMatrix {
    /// Rank-one ρ_{m,n} = α_m conj(α_n).
    pub fn pure(alpha: &CoefficientSequence) -> Result<Self> {
        let a = alpha.values();
        let n = a.len();
        Ok(Self { entries: DMatrix::from_fn(n, n, |m, k| a[m] * a[k].conj()), provenance: Provenance::Pure })
    }

    /// Square, finite and Hermitian within 10⁻¹².
    pub fn explicit(entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.nrows() == 0 {
            return Err(Error::Argument(format!(
                "density matrix must be square and nonempty, got {}×{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        ensure_finite(entries.iter().flat_map(|v| [v.re, v.im]), "density matrix")?;
        let (asym, at) = max_asymmetry(&entries);
        if asym > HERMITIAN_TOL {
            let (m, n) = at.unwrap_or_default();
            return Err(Error::Argument(format!(
                "density matrix is not Hermitian: |ρ[{m},{n}] − conj ρ[{n},{m}]| = {asym:.3e}"
            )));
        }
        Ok(Self { entries, provenance: Provenance::Explicit })
    }

    pub fn explicit_from_fn(n_max: usize, f: impl Fn(usize, usize) -> Complex64) -> Result<Self> {
        Self::explicit(DMatrix::from_fn(n_max + 1, n_max + 1, f))
    }

    /// No Hermitian check; for tests of norm properties on arbitrary matrices.
    #[cfg(test)]
    pub(crate) fn from_fn_unchecked(n_max: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        Self { entries: DMatrix::from_fn(n_max + 1, n_max + 1, f), provenance: Provenance::Explicit }
    }

    pub fn n_max(&self) -> usize {
        self.entries.nrows() - 1
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn entry(&self, m: usize, n: usize) -> Complex64 {
        if m.max(n) > self.n_max() {
            Complex64::new(0.0, 0.0)
        } else {
            self.entries[(m, n)]
        }
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.entries.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

pub fn pure_state_density(alpha: &CoefficientSequence) -> DensityMatrix {
    DensityMatrix::pure(alpha).expect("coefficient sequences are finite")
}

/// Σ_i p_i |ψ_i⟩⟨ψ_i| for orthonormal ψ_i.
pub fn mixture_density(weights: &[f64], states: &[CoefficientSequence]) -> Result<DensityMatrix> {
    if weights.len() != states.len() || weights.is_empty() {
        return Err(Error::Argument(format!(
            "{} weights for {} states",
            weights.len(),
            states.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
        return Err(Error::Argument(format!("mixture weight {w} is negative or not finite")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::Argument(format!("mixture weights sum to {total}, not 1")));
    }
    for i in 0..states.len() {
        for j in 0..=i {
            let g = states[i].dot(&states[j]);
            let target = if i == j { 1.0 } else { 0.0 };
            if (g - target).norm() > 1e-8 {
                return Err(Error::Argument(format!(
                    "states {i} and {j} are not orthonormal: ⟨ψ_{i}, ψ_{j}⟩ = {g}"
                )));
            }
        }
    }
    let n = states.iter().map(|s| s.values().len()).max().unwrap_or(1);
    let mut entries = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for (&p, s) in weights.iter().zip(states) {
        for m in 0..n {
            for k in 0..n {
                entries[(m, k)] += s.get(m) * s.get(k).conj() * p;
            }
        }
    }
    Ok(DensityMatrix { entries, provenance: Provenance::Explicit })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Finding {
    Pass,
    Fail,
    /// Trace of an infinite matrix cut at N; not expected to be 1.
    Truncated,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub verdict: Finding,
    pub value: f64,
    pub witness: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    /// Largest |ρ_{m,n} − conj ρ_{n,m}|.
    pub hermitian: Check,
    /// Smallest eigenvalue; witness is the (index, index) of the most negative diagonal entry.
    pub psd: Check,
    /// Re trace.
    pub trace: Check,
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        [&self.hermitian, &self.psd, &self.trace].iter().all(|c| c.verdict == Finding::Pass)
    }
}

/// Hermitian symmetry, positive semidefiniteness and unit trace, reported, never raised.
pub fn validate_density(rho: &DensityMatrix) -> ValidationReport {
    let (asym, at) = max_asymmetry(rho.entries());
    let hermitian = Check {
        verdict: if asym <= HERMITIAN_TOL { Finding::Pass } else { Finding::Fail },
        value: asym,
        witness: at,
    };
    let mut notes = Vec::new();
    let min_ev = rho.eigenvalues().first().copied().unwrap_or(0.0);
    let diag_witness = (0..=rho.n_max())
        .min_by(|&a, &b| rho.entries[(a, a)].re.total_cmp(&rho.entries[(b, b)].re))
        .filter(|&k| rho.entries[(k, k)].re < 0.0)
        .map(|k| (k, k));
    let psd = Check {
        verdict: if min_ev >= PSD_TOL { Finding::Pass } else { Finding::Fail },
        value: min_ev,
        witness: diag_witness,
    };
    let tr = rho.trace();
    let trace_verdict = if rho.provenance == Provenance::Counterexample {
        notes.push(format!(
            "matrix is an infinite sequence cut at N = {}; its trace is not compared with 1",
            rho.n_max()
        ));
        Finding::Truncated
    } else if (tr.re - 1.0).abs() <= TRACE_TOL && tr.im.abs() <= TRACE_TOL {
        Finding::Pass
    } else {
        Finding::Fail
    };
    if psd.verdict == Finding::Pass && rho.provenance != Provenance::Counterexample {
        notes.push("principal truncations of a positive matrix stay positive; trace may drop below 1".into());
    }
    ValidationReport { hermitian, psd, trace: Check { verdict: trace_verdict, value: tr.re, witness: None }, notes }
}

/// ρ_{m,n} = (−1)^m δ_{m,n} / ((m+1)(m+2)), 0 ≤ m, n ≤ n_max.
pub fn counterexample_density(n_max: usize) -> DensityMatrix {
    let entries = DMatrix::from_fn(n_max + 1, n_max + 1, |m, n| {
        if m == n {
            Complex64::new(parity_sign(m) / ((m + 1) * (m + 2)) as f64, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    DensityMatrix { entries, provenance: Provenance::Counterexample }
}

/// Φ_ρ(q,p) of the full (untruncated) alternating-sign matrix.
///
/// With u = x/(1−z) and v = u − x the z-integral becomes
/// e^{−x/2}/π · ∫₀^∞ e^{−v} x/(x+v)² dv, which has no endpoint singularity.
pub fn counterexample_wigner_closed_form(q: f64, p: f64) -> Result<f64> {
    if !(q.is_finite() && p.is_finite()) {
        return Err(Error::Domain(format!("closed form evaluated at ({q}, {p})")));
    }
    let x = 2.0 * (q * q + p * p);
    if x == 0.0 {
        return Ok(1.0 / PI);
    }
    let tol = Tolerance { abs: 0.0, rel: 1e-10, max_intervals: 4000 };
    // e^{−v} < 1e−43 beyond v = 100.
    let integral = gauss_kronrod(|v| Complex64::new((-v).exp() * x / ((x + v) * (x + v)), 0.0), 0.0, 100.0, tol)?;
    Ok((-x / 2.0).exp() * integral.value.re / PI)
}

/// Σ_{m ≤ M} ρ_{m,m} Φ_{m,m}(q,p) for the truncated alternating-sign matrix.
pub fn counterexample_series(m_max: usize, q: f64, p: f64) -> Result<f64> {
    if m_max > LAGUERRE_CEILING {
        return Err(Error::Capacity { requested: m_max, ceiling: LAGUERRE_CEILING });
    }
    // ρ_{m,m} Φ_{m,m} = ℓ_m^0(x) / (π (m+1)(m+2)): the two (−1)^m cancel.
    let ell = normalized_laguerre(0, 2.0 * (q * q + p * p), m_max + 1);
    Ok(ell.iter().enumerate().map(|(m, l)| l / (PI * ((m + 1) * (m + 2)) as f64)).sum())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum DiagonalFit {
    /// An exponential-type envelope fitted; the diagonal is not algebraic.
    Fitted { envelope: DecayEnvelope },
    Degenerate { reason: String },
    InsufficientSupport { usable: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussianFit {
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
    /// OLS slope of ln Φ_ρ against r².
    pub slope: f64,
    pub intercept: f64,
    /// Largest |residual| of the linear fit.
    pub max_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub n_max: usize,
    pub validation: ValidationReport,
    pub diagonal_fit: DiagonalFit,
    pub gaussian_fit: GaussianFit,
    pub all_positive: bool,
    /// max over the grid of Φ_ρ(r) − e^{−r²}/π; ≤ 0 when the bound holds.
    pub bound_max_excess: f64,
    pub bound_holds: bool,
    /// Points (r, truncated series − closed form).
    pub series_deviation: Vec<(f64, f64)>,
    pub series_max_deviation: f64,
}

/// Fits the diagonal decay of the alternating-sign matrix and the Gaussian
/// decay of its Wigner function along the radii in `r_grid`.
pub fn decay_vs_wigner_experiment(n_max: usize, r_grid: &[f64]) -> Result<CounterexampleReport> {
    if n_max < 64 {
        return Err(Error::Argument(format!("experiment needs n_max ≥ 64, got {n_max}")));
    }
    ensure_finite(r_grid.iter().copied(), "radial grid")?;
    let radii: Vec<f64> = r_grid.iter().copied().filter(|r| *r >= 0.0).collect();
    let (lo, hi) = GAUSSIAN_FIT_RANGE;
    let in_fit = |r: f64| (lo..=hi).contains(&r);
    if radii.iter().filter(|&&r| in_fit(r)).count() < 2 {
        return Err(Error::Argument(format!("experiment needs at least two radii in [{lo}, {hi}]")));
    }
    let rho = counterexample_density(n_max);
    let diag = CoefficientSequence::from_real(
        &(0..=n_max).map(|m| rho.entries[(m, m)].re.abs()).collect::<Vec<_>>(),
    )?;
    let diagonal_fit = match fit_envelope(&diag) {
        Ok(envelope) => DiagonalFit::Fitted { envelope },
        Err(Error::FitDegenerate(reason)) => DiagonalFit::Degenerate { reason },
        Err(Error::InsufficientSupport { usable, .. }) => DiagonalFit::InsufficientSupport { usable },
        Err(e) => return Err(e),
    };

    let values = radii.iter().map(|&r| counterexample_wigner_closed_form(r, 0.0)).collect::<Result<Vec<_>>>()?;
    let all_positive = values.iter().all(|&v| v > 0.0);
    let bound_max_excess = radii
        .iter()
        .zip(&values)
        .map(|(&r, &v)| v - (-r * r).exp() / PI)
        .fold(f64::NEG_INFINITY, f64::max);

    let fit: Vec<(f64, f64)> = radii.iter().zip(&values).filter(|(&r, _)| in_fit(r)).map(|(&r, &v)| (r, v)).collect();
    let xs: Vec<f64> = fit.iter().map(|(r, _)| r * r).collect();
    let ys: Vec<f64> = fit.iter().map(|(_, v)| v.ln()).collect();
    let (slope, intercept) = crate::decay::ols(&xs, &ys);
    let max_residual =
        xs.iter().zip(&ys).map(|(x, y)| (y - (intercept + slope * x)).abs()).fold(0.0, f64::max);

    let series_deviation = radii
        .iter()
        .zip(&values)
        .filter(|(&r, _)| r <= SERIES_RADIUS)
        .map(|(&r, &v)| Ok((r, counterexample_series(n_max, r, 0.0)? - v)))
        .collect::<Result<Vec<_>>>()?;
    let series_max_deviation = series_deviation.iter().map(|d| d.1.abs()).fold(0.0, f64::max);

    Ok(CounterexampleReport {
        n_max,
        validation: validate_density(&rho),
        diagonal_fit,
        gaussian_fit: GaussianFit {
            r_min: fit[0].0,
            r_max: fit[fit.len() - 1].0,
            points: fit.len(),
            slope,
            intercept,
            max_residual,
        },
        all_positive,
        bound_holds: bound_max_excess <= 0.0,
        bound_max_excess,
        series_deviation,
        series_max_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seq(v: &[f64]) -> CoefficientSequence {
        CoefficientSequence::from_real(v).unwrap()
    }

    #[test]
    fn pure_states() {
        let e0 = pure_state_density(&seq(&[1.0]));
        assert_eq!(e0.entry(0, 0), Complex64::new(1.0, 0.0));
        let s = 0.5f64.sqrt();
        let r = pure_state_density(&seq(&[s, s]));
        for m in 0..2 {
            for n in 0..2 {
                assert!((r.entry(m, n).re - 0.5).abs() < 1e-15);
            }
        }
        assert!(validate_density(&r).all_pass());
    }

    #[test]
    fn mixtures() {
        let h0 = CoefficientSequence::unit(0, 1).unwrap();
        let h1 = CoefficientSequence::unit(1, 1).unwrap();
        let m = mixture_density(&[0.5, 0.5], &[h0.clone(), h1.clone()]).unwrap();
        assert_eq!(m.entry(0, 0).re, 0.5);
        assert_eq!(m.entry(1, 1).re, 0.5);
        assert_eq!(m.entry(0, 1).norm(), 0.0);
        assert!(validate_density(&m).all_pass());
        assert_eq!(mixture_density(&[1.0], &[h0.clone()]).unwrap().entries(), pure_state_density(&h0).entries());
        assert!(mixture_density(&[1.5, -0.5], &[h0.clone(), h1.clone()]).is_err());
        assert!(mixture_density(&[0.5, 0.5], &[h0.clone(), h0.clone()]).is_err());
    }

    #[test]
    fn mixture_spectrum_recovers_weights() {
        let s = 0.5f64.sqrt();
        let a = seq(&[s, s, 0.0]);
        let b = seq(&[s, -s, 0.0]);
        let c = seq(&[0.0, 0.0, 1.0]);
        let p = [0.2, 0.3, 0.5];
        let m = mixture_density(&p, &[a, b, c]).unwrap();
        let ev = m.eigenvalues();
        for (x, y) in ev.iter().zip(&p) {
            assert!((x - y).abs() < 1e-8);
        }
    }

    #[test]
    fn explicit_requires_hermitian() {
        assert!(DensityMatrix::explicit_from_fn(2, |m, n| Complex64::new(m as f64, n as f64)).is_err());
        let d = DensityMatrix::explicit_from_fn(1, |m, n| Complex64::new((m == n) as u8 as f64 * 0.5, 0.0))
            .unwrap();
        assert!(validate_density(&d).all_pass());
    }

    #[test]
    fn counterexample_entries_and_validation() {
        let c = counterexample_density(400);
        assert_eq!(c.entry(0, 0).re, 0.5);
        assert!((c.entry(1, 1).re + 1.0 / 6.0).abs() < 1e-16);
        assert!((c.entry(2, 2).re - 1.0 / 12.0).abs() < 1e-16);
        assert_eq!(c.entry(1, 2).norm(), 0.0);
        let v = validate_density(&c);
        assert_eq!(v.hermitian.verdict, Finding::Pass);
        assert_eq!(v.psd.verdict, Finding::Fail);
        assert_eq!(v.psd.witness, Some((1, 1)));
        assert_eq!(v.trace.verdict, Finding::Truncated);
        // Σ_{m≤400} (−1)^m/((m+1)(m+2)) → 2 ln 2 − 1.
        assert!((v.trace.value - (2.0 * 2f64.ln() - 1.0)).abs() < 1e-5);
        assert!((v.trace.value - 0.3863).abs() < 1e-4);
    }

    /// 1 − x e^x E₁(x), E₁ by its power series.
    fn closed_form_oracle(x: f64) -> f64 {
        let gamma = 0.577_215_664_901_532_9;
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..200 {
            term *= -x / k as f64;
            sum += term / k as f64;
        }
        let e1 = -gamma - x.ln() - sum;
        ((-x / 2.0).exp() * (1.0 - x * x.exp() * e1)) / PI
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(counterexample_wigner_closed_form(0.0, 0.0).unwrap(), 1.0 / PI);
        for &(q, p) in &[(0.5, 0.0), (0.3, -0.6), (1.0, 0.0), (1.2, 0.9)] {
            let x = 2.0 * (q * q + p * p);
            let v = counterexample_wigner_closed_form(q, p).unwrap();
            assert!((v - closed_form_oracle(x)).abs() < 1e-12 * closed_form_oracle(x), "x={x}");
        }
    }

    #[test]
    fn truncated_series_approaches_closed_form() {
        // Tail of the series at the origin is 1/(π(M+2)).
        assert!((counterexample_series(400, 0.0, 0.0).unwrap() - (1.0 / PI - 1.0 / (402.0 * PI))).abs() < 1e-14);
        // |ℓ_m^0| ≤ 1, so the tail never exceeds 1/(π(M+2)).
        for r in [0.25, 1.0, 2.0] {
            let exact = counterexample_wigner_closed_form(r, 0.0).unwrap();
            for m in [50, 100, 200, 400, 800] {
                let d = (counterexample_series(m, r, 0.0).unwrap() - exact).abs();
                assert!(d <= 1.0 / (PI * (m + 2) as f64), "r={r} M={m}: {d}");
            }
        }
    }

    #[test]
    fn experiment_shape() {
        let r: Vec<f64> = (0..=60).map(|k| k as f64 * 0.05).collect();
        let rep = decay_vs_wigner_experiment(400, &r).unwrap();
        assert!(matches!(rep.diagonal_fit, DiagonalFit::Degenerate { .. }));
        assert!(rep.all_positive && rep.bound_holds);
        assert_eq!((rep.gaussian_fit.r_min, rep.gaussian_fit.r_max, rep.gaussian_fit.points), (1.0, 3.0, 41));
        // The closed form decays faster than e^{−r²} on [1, 3].
        assert!(rep.gaussian_fit.slope < -1.0);
        assert_eq!(rep.series_deviation.len(), 41);
        assert!(rep.series_deviation.iter().all(|&(r, d)| d.abs() <= (1.0 + 1e-9) / (PI * 402.0) && r <= 2.0));
        assert!(decay_vs_wigner_experiment(10, &r).is_err());
    }

    proptest! {
        #[test]
        fn closed_form_is_below_gaussian(q in -6.0f64..6.0, p in -6.0f64..6.0) {
            let v = counterexample_wigner_closed_form(q, p).unwrap();
            prop_assert!(v > 0.0 || q.hypot(p) > 5.0);
            prop_assert!(v <= (-(q * q + p * p)).exp() / PI * (1.0 + 1e-12));
        }

        #[test]
        fn pure_density_is_rank_one(v in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..12)) {
            let a = CoefficientSequence::new(v.iter().map(|&(r, i)| Complex64::new(r, i)).collect()).unwrap();
            let ev = pure_state_density(&a).eigenvalues();
            let top = ev[ev.len() - 1];
            prop_assert!((top - a.norm_sqr()).abs() <= 1e-10 * (1.0 + top));
            prop_assert!(ev[..ev.len() - 1].iter().all(|e| e.abs() < 1e-12 * (1.0 + top)));
        }

        #[test]
        fn mixture_trace_is_weight_sum(a in 0.0f64..1.0) {
            let s = [CoefficientSequence::unit(0, 2).unwrap(), CoefficientSequence::unit(2, 2).unwrap()];
            let m = mixture_density(&[a, 1.0 - a], &s).unwrap();
            prop_assert!((m.trace().re - 1.0).abs() < 1e-15);
        }
    }
}
