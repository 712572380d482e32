//! Normalized Hermite functions h_n(x) = (2^n n! √π)^{−1/2} H_n(x) e^{−x²/2}
//! and the coefficient maps of the Fock basis.

mod envelope;
mod fourier;
mod quadrature;

pub use envelope::{hermite_tail_envelope_check, TailEnvelopeReport};
pub use fourier::{fourier_numeric, SampledTransform, DECAY_THRESHOLD};
pub use quadrature::{analyze, gauss_hermite_rule, QuadratureRule};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{ensure_finite, Error, Result};

/// Largest order accepted by [`hermite_values`].
pub const HERMITE_CEILING: usize = 4096;

const RESCALE_ABOVE: f64 = 1e150;
const RESCALE_BY: f64 = 1e-150;

/// Hermite coefficients α_0..α_{n_max}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientSequence {
    values: Vec<Complex64>,
}

impl CoefficientSequence {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Argument("coefficient sequence must hold at least α_0".into()));
        }
        ensure_finite(values.iter().flat_map(|v| [v.re, v.im]), "coefficients")?;
        Ok(Self { values })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// e_k padded with zeros to n_max.
    pub fn unit(k: usize, n_max: usize) -> Result<Self> {
        if k > n_max {
            return Err(Error::Argument(format!("unit index {k} exceeds n_max = {n_max}")));
        }
        let mut values = vec![Complex64::new(0.0, 0.0); n_max + 1];
        values[k] = Complex64::new(1.0, 0.0);
        Ok(Self { values })
    }

    /// α_n = g(n) for n = 0..=n_max.
    pub fn from_fn(n_max: usize, g: impl Fn(usize) -> Complex64) -> Result<Self> {
        Self::new((0..=n_max).map(g).collect())
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn get(&self, n: usize) -> Complex64 {
        self.values.get(n).copied().unwrap_or_default()
    }

    /// Σ|α_n|².
    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn map(&self, g: impl Fn(Complex64) -> Complex64) -> Self {
        Self { values: self.values.iter().map(|&v| g(v)).collect() }
    }

    /// Entrywise sum, padding the shorter sequence with zeros.
    pub fn add(&self, other: &Self) -> Self {
        let n = self.values.len().max(other.values.len());
        Self { values: (0..n).map(|k| self.get(k) + other.get(k)).collect() }
    }

    /// Inner product Σ α_n conj(β_n).
    pub fn dot(&self, other: &Self) -> Complex64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum()
    }
}

/// h_0(x), ..., h_{n_max}(x).
///
/// The recurrence runs on a mantissa with a separate log scale, so the
/// values stay accurate where e^{−x²/2} alone would underflow.
pub fn hermite_values(n_max: usize, x: f64) -> Result<Vec<f64>> {
    let mut out = vec![0.0; n_max + 1];
    hermite_values_into(x, &mut out)?;
    Ok(out)
}

/// Writes h_0(x), ..., h_{out.len()−1}(x) into `out`.
pub fn hermite_values_into(x: f64, out: &mut [f64]) -> Result<()> {
    if out.len() > HERMITE_CEILING + 1 {
        return Err(Error::Capacity { requested: out.len() - 1, ceiling: HERMITE_CEILING });
    }
    if !x.is_finite() {
        return Err(Error::Domain(format!("Hermite function evaluated at x = {x}")));
    }
    if out.is_empty() {
        return Ok(());
    }
    let mut log_scale = -0.5 * x * x - 0.25 * std::f64::consts::PI.ln();
    let (mut prev, mut cur) = (0.0f64, 1.0f64);
    out[0] = log_scale.exp();
    for n in 0..out.len() - 1 {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * x * cur - (nf / (nf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_ABOVE {
            prev *= RESCALE_BY;
            cur *= RESCALE_BY;
            log_scale -= RESCALE_BY.ln();
        }
        out[n + 1] = if cur == 0.0 { 0.0 } else { cur.signum() * (cur.abs().ln() + log_scale).exp() };
    }
    Ok(())
}

/// Σ_n α_n h_n(x) at each x.
pub fn synthesize(alpha: &CoefficientSequence, xs: &[f64]) -> Result<Vec<Complex64>> {
    use rayon::prelude::*;
    if alpha.n_max() > HERMITE_CEILING {
        return Err(Error::Capacity { requested: alpha.n_max(), ceiling: HERMITE_CEILING });
    }
    xs.par_iter()
        .map(|&x| {
            let mut h = vec![0.0; alpha.n_max() + 1];
            hermite_values_into(x, &mut h)?;
            Ok(alpha.values().iter().zip(&h).map(|(a, &hn)| a * hn).sum())
        })
        .collect()
}

/// (−i)^n as an exact unit complex number.
pub fn minus_i_pow(n: usize) -> Complex64 {
    match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// F h_n = (−i)^n h_n applied coefficientwise.
pub fn fourier_in_coefficients(alpha: &CoefficientSequence) -> CoefficientSequence {
    CoefficientSequence {
        values: alpha.values().iter().enumerate().map(|(n, &a)| minus_i_pow(n) * a).collect(),
    }
}

/// (x² − d²/dx²)^M in the Hermite basis: α_n ↦ (2n+1)^M α_n.
pub fn hermite_operator_in_coefficients(alpha: &CoefficientSequence, power: u32) -> Result<CoefficientSequence> {
    let mut values = Vec::with_capacity(alpha.values().len());
    for (n, &a) in alpha.values().iter().enumerate() {
        if a == Complex64::new(0.0, 0.0) {
            values.push(a);
            continue;
        }
        let log_factor = power as f64 * ((2 * n + 1) as f64).ln();
        let log_mag = a.norm().ln() + log_factor;
        if log_mag >= f64::MAX.ln() {
            return Err(Error::Overflow(format!(
                "(2n+1)^M α_n at n = {n}, M = {power} has magnitude e^{log_mag:.1}, beyond double range"
            )));
        }
        let scaled = Complex64::from_polar(log_mag.exp(), a.arg());
        // Exact integer powers stay exact while they are representable.
        let exact = ((2 * n + 1) as f64).powi(power as i32);
        values.push(if exact.is_finite() && (a * exact).is_finite() { a * exact } else { scaled });
    }
    Ok(CoefficientSequence { values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn low_order_values() {
        let h = hermite_values(1, 0.0).unwrap();
        assert!((h[0] - PI.powf(-0.25)).abs() < 1e-15);
        assert!((h[0] - 0.7511255).abs() < 1e-7);
        let h = hermite_values(1, 1.0).unwrap();
        let expected = 2f64.sqrt() * PI.powf(-0.25) * (-0.5f64).exp();
        assert!((h[1] - expected).abs() < 1e-15);
        assert!((h[1] - 0.6442).abs() < 1e-4);
    }

    #[test]
    fn matches_physicists_polynomials() {
        // h_n = H_n e^{−x²/2} / sqrt(2^n n! √π), H_n from its own recurrence.
        for &x in &[-2.3, -0.4, 0.0, 0.7, 3.1] {
            let h = hermite_values(12, x).unwrap();
            let (mut hm, mut hc) = (0.0f64, 1.0f64);
            let mut fact = 1.0;
            for n in 0..=12usize {
                if n > 0 {
                    let hn = 2.0 * x * hc - 2.0 * (n as f64 - 1.0) * hm;
                    hm = hc;
                    hc = hn;
                    fact *= n as f64;
                }
                let norm = (2f64.powi(n as i32) * fact * PI.sqrt()).sqrt();
                let expected = hc * (-x * x / 2.0).exp() / norm;
                assert!((h[n] - expected).abs() < 1e-13 * (1.0 + expected.abs()), "n={n} x={x}");
            }
        }
    }

    #[test]
    fn deep_tail_does_not_underflow_to_zero() {
        // h_0(40) = π^{−1/4} e^{−800} is below the double range, but h_n(40)
        // for n near 800 is not.
        let h = hermite_values(800, 40.0).unwrap();
        assert!(h[800].abs() > 1e-10);
        assert!(h.iter().all(|v| v.abs() <= 1.0));
    }

    #[test]
    fn capacity_ceiling() {
        assert!(hermite_values(HERMITE_CEILING, 1.0).is_ok());
        assert!(matches!(
            hermite_values(HERMITE_CEILING + 1, 1.0),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn synthesize_basics() {
        let e0 = CoefficientSequence::unit(0, 5).unwrap();
        let v = synthesize(&e0, &[0.0]).unwrap();
        assert!((v[0].re - PI.powf(-0.25)).abs() < 1e-15);
        let geo = CoefficientSequence::from_fn(60, |n| Complex64::new((-2.0 * n as f64).exp(), 0.0))
            .unwrap();
        let bound = 1.0 / (1.0 - (-2.0f64).exp());
        let xs: Vec<f64> = (-200..=200).map(|k| k as f64 * 0.05).collect();
        assert!(synthesize(&geo, &xs).unwrap().iter().all(|v| v.norm() <= bound));
    }

    #[test]
    fn fourier_coefficient_action() {
        let e0 = CoefficientSequence::unit(0, 3).unwrap();
        assert_eq!(fourier_in_coefficients(&e0), e0);
        let e1 = CoefficientSequence::unit(1, 3).unwrap();
        assert_eq!(fourier_in_coefficients(&e1).get(1), Complex64::new(0.0, -1.0));
        let four = CoefficientSequence::from_fn(12, |n| {
            Complex64::new(if n % 4 == 0 { 1.0 / (n + 1) as f64 } else { 0.0 }, 0.0)
        })
        .unwrap();
        assert_eq!(fourier_in_coefficients(&four), four);
    }

    #[test]
    fn hermite_operator() {
        let e0 = CoefficientSequence::unit(0, 3).unwrap();
        assert_eq!(hermite_operator_in_coefficients(&e0, 1).unwrap(), e0);
        let e3 = CoefficientSequence::unit(3, 3).unwrap();
        assert_eq!(hermite_operator_in_coefficients(&e3, 2).unwrap().get(3).re, 49.0);
        let any = CoefficientSequence::from_fn(5, |n| Complex64::new(n as f64, -1.0)).unwrap();
        assert_eq!(hermite_operator_in_coefficients(&any, 0).unwrap(), any);
        let big = CoefficientSequence::unit(4000, 4000).unwrap();
        assert!(matches!(hermite_operator_in_coefficients(&big, 100), Err(Error::Overflow(_))));
        // (8001)^{90} ≈ e^{809} overflows on its own, the product with 1e-200 does not.
        let v = hermite_operator_in_coefficients(&big.map(|z| z * 1e-200), 90).unwrap();
        let expected = 90.0 * 8001f64.ln() - 200.0 * 10f64.ln();
        assert!((v.get(4000).re.ln() - expected).abs() < 1e-10);
    }

    proptest! {
        #[test]
        fn bounded_by_one(n_max in 0usize..512, x in -50.0f64..50.0) {
            let h = hermite_values(n_max, x).unwrap();
            prop_assert!(h.iter().all(|v| v.abs() <= 1.0));
        }

        #[test]
        fn fourier_fourth_power_is_identity(v in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 1..40)) {
            let a = CoefficientSequence::new(v.iter().map(|&(r, i)| Complex64::new(r, i)).collect()).unwrap();
            let mut b = a.clone();
            for _ in 0..4 {
                b = fourier_in_coefficients(&b);
            }
            prop_assert_eq!(a, b);
        }
    }
}
