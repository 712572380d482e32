//! Laguerre polynomials and the special Hermite functions Φ_{m,n}.
//!
//! For m ≥ n, with α = m − n, r² = q² + p², x = 2r² and u = (ip − q)/r,
//!
//!   Φ_{m,n}(q,p) = ((−1)^m/π) · u^α · ℓ_n^α(x),
//!   ℓ_n^α(x) = √(n!/(n+α)!) · x^{α/2} e^{−x/2} L_n^α(x).
//!
//! ℓ_n^α obeys a three-term recurrence in n with no factorials, run here on
//! a rescaled mantissa so neither e^{−x/2} nor x^{α/2} over- or underflows.
//! Φ_{m,n} for m < n is Φ_{n,m}(q, −p) = conj Φ_{n,m}(q, p).

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::hermite::hermite_values;
use crate::integrate::{gauss_kronrod, Tolerance};

/// Largest degree accepted by the Laguerre routines.
pub const LAGUERRE_CEILING: usize = 2048;

/// Largest index accepted by the integral oracle.
pub const ORACLE_CEILING: usize = 64;

const RESCALE_ABOVE: f64 = 1e150;

/// L_0^α(x), ..., L_n^α(x) by the standard recurrence
/// (k+1) L_{k+1} = (2k+1+α−x) L_k − (k+α) L_{k−1}.
pub fn laguerre_values(n: usize, alpha: usize, x: f64) -> Result<Vec<f64>> {
    if n > LAGUERRE_CEILING {
        return Err(Error::Capacity { requested: n, ceiling: LAGUERRE_CEILING });
    }
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!("Laguerre polynomial evaluated at x = {x}; x must be ≥ 0")));
    }
    let a = alpha as f64;
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n >= 1 {
        out.push(1.0 + a - x);
    }
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + a - x) * out[k] - (kf + a) * out[k - 1]) / (kf + 1.0);
        if !next.is_finite() {
            return Err(Error::Overflow(format!(
                "L_{}^{alpha}({x}) exceeds the double range; use the normalized form",
                k + 1
            )));
        }
        out.push(next);
    }
    Ok(out)
}

pub(crate) fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Sign and natural log of |ℓ_k^α(x)| for k = 0..len.
pub(crate) fn normalized_laguerre_log(alpha: usize, x: f64, len: usize) -> Vec<(f64, f64)> {
    let a = alpha as f64;
    let mut out = Vec::with_capacity(len);
    if len == 0 {
        return out;
    }
    let seed = if x == 0.0 {
        if alpha == 0 {
            0.0
        } else {
            f64::NEG_INFINITY
        }
    } else {
        0.5 * a * x.ln() - 0.5 * x - 0.5 * ln_factorial(alpha)
    };
    if seed == f64::NEG_INFINITY {
        // x = 0 and α > 0: every ℓ_k^α vanishes.
        out.resize(len, (0.0, f64::NEG_INFINITY));
        return out;
    }
    let mut log_scale = seed;
    let (mut prev, mut cur) = (0.0f64, 1.0f64);
    out.push((1.0, seed));
    for k in 0..len - 1 {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + a - x) * cur - (kf * (kf + a)).sqrt() * prev)
            / ((kf + 1.0) * (kf + 1.0 + a)).sqrt();
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_ABOVE {
            prev /= RESCALE_ABOVE;
            cur /= RESCALE_ABOVE;
            log_scale += RESCALE_ABOVE.ln();
        }
        out.push(if cur == 0.0 {
            (0.0, f64::NEG_INFINITY)
        } else {
            (cur.signum(), cur.abs().ln() + log_scale)
        });
    }
    out
}

/// ℓ_0^α(x), ..., ℓ_{len−1}^α(x).
pub(crate) fn normalized_laguerre(alpha: usize, x: f64, len: usize) -> Vec<f64> {
    normalized_laguerre_log(alpha, x, len).into_iter().map(|(s, l)| s * l.exp()).collect()
}

fn check_capacity(m: usize, n: usize) -> Result<()> {
    if m.min(n) > LAGUERRE_CEILING {
        return Err(Error::Capacity { requested: m.min(n), ceiling: LAGUERRE_CEILING });
    }
    Ok(())
}

/// Unit phase u = (ip − q)/r; 1 at the origin, where it multiplies u^0 only.
pub(crate) fn phase(q: f64, p: f64) -> Complex64 {
    let r = q.hypot(p);
    if r == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(-q / r, p / r)
    }
}

pub(crate) fn parity_sign(m: usize) -> f64 {
    if m % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Φ_{m,n}(q, p) from the Laguerre closed form.
pub fn special_hermite(m: usize, n: usize, q: f64, p: f64) -> Result<Complex64> {
    check_capacity(m, n)?;
    if !(q.is_finite() && p.is_finite()) {
        return Err(Error::Domain(format!("special Hermite function at ({q}, {p})")));
    }
    if m < n {
        return Ok(special_hermite(n, m, q, p)?.conj());
    }
    let alpha = m - n;
    let x = 2.0 * (q * q + p * p);
    let (sign, log_abs) = normalized_laguerre_log(alpha, x, n + 1)[n];
    if log_abs == f64::NEG_INFINITY {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let magnitude = sign * parity_sign(m) * (log_abs - PI.ln()).exp();
    Ok(phase(q, p).powu(alpha as u32) * magnitude)
}

/// Φ_{m,n}(q, p) = (1/2π) ∫ e^{ipx} h_m(q − x/2) h_n(q + x/2) dx by adaptive quadrature.
pub fn special_hermite_integral(m: usize, n: usize, q: f64, p: f64) -> Result<Complex64> {
    if m.max(n) > ORACLE_CEILING {
        return Err(Error::Capacity { requested: m.max(n), ceiling: ORACLE_CEILING });
    }
    // h_k is below e^{−40} beyond √(2k+1) + 9.
    let reach = |k: usize| (2.0 * k as f64 + 1.0).sqrt() + 9.0;
    let lo = (q - reach(m)).max(-q - reach(n));
    let hi = (q + reach(m)).min(-q + reach(n));
    if lo >= hi {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let integrand = |x: f64| {
        let a = hermite_values(m, q - x / 2.0).map(|h| h[m]).unwrap_or(0.0);
        let b = hermite_values(n, q + x / 2.0).map(|h| h[n]).unwrap_or(0.0);
        Complex64::cis(p * x) * (a * b)
    };
    let tol = Tolerance { abs: 1e-12, rel: 1e-10, max_intervals: 20_000 };
    let r = gauss_kronrod(integrand, 2.0 * lo, 2.0 * hi, tol)?;
    Ok(r.value / (2.0 * PI))
}

/// l_{m,n}(r) = |Φ_{m,n}| on the circle of radius r.
pub fn radial_modulus(m: usize, n: usize, r: f64) -> Result<f64> {
    check_capacity(m, n)?;
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("radial modulus at r = {r}")));
    }
    let (m, n) = (m.max(n), m.min(n));
    let (_, log_abs) = normalized_laguerre_log(m - n, 2.0 * r * r, n + 1)[n];
    Ok((log_abs - PI.ln()).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn laguerre_examples() {
        for alpha in [0, 1, 5] {
            assert_eq!(laguerre_values(0, alpha, 3.7).unwrap(), vec![1.0]);
        }
        assert_eq!(laguerre_values(1, 0, 2.0).unwrap()[1], -1.0);
        assert!((laguerre_values(2, 0, 2.0).unwrap()[2] + 1.0).abs() < 1e-15);
        // L_3^2(x) = 10 − 10x + 5x²/2 − x³/6.
        let x: f64 = 1.3;
        let l = laguerre_values(3, 2, x).unwrap()[3];
        assert!((l - (10.0 - 10.0 * x + 2.5 * x * x - x.powi(3) / 6.0)).abs() < 1e-13);
        assert!(matches!(laguerre_values(LAGUERRE_CEILING + 1, 0, 1.0), Err(Error::Capacity { .. })));
        assert!(matches!(laguerre_values(2, 0, -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn normalized_form_matches_plain_polynomials() {
        for alpha in [0usize, 1, 3, 7] {
            for &x in &[0.2, 1.0, 4.5, 11.0] {
                let plain = laguerre_values(20, alpha, x).unwrap();
                let norm = normalized_laguerre(alpha, x, 21);
                for k in 0..=20 {
                    let c = (0.5 * (ln_factorial(k) - ln_factorial(k + alpha))).exp();
                    let expected = c * x.powf(alpha as f64 / 2.0) * (-x / 2.0).exp() * plain[k];
                    assert!((norm[k] - expected).abs() < 1e-12, "k={k} α={alpha} x={x}");
                }
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        assert!((special_hermite(0, 0, 0.0, 0.0).unwrap().re - 1.0 / PI).abs() < 1e-15);
        let v = special_hermite(1, 0, 1.0, 0.0).unwrap();
        let expected = 2f64.sqrt() * (-1.0f64).exp() / PI;
        assert!((v.re - expected).abs() < 1e-15 && v.im == 0.0);
        // Φ_{1,0} = (√2/π)(q − ip)e^{−r²}.
        let (q, p) = (0.3, -1.1);
        let v = special_hermite(1, 0, q, p).unwrap();
        let e = Complex64::new(q, -p) * (2f64.sqrt() / PI * (-(q * q + p * p)).exp());
        assert!((v - e).norm() < 1e-15);
        // Φ_{1,1}(0) = −1/π.
        assert!((special_hermite(1, 1, 0.0, 0.0).unwrap().re + 1.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn integral_oracle_examples() {
        let v = special_hermite_integral(0, 0, 0.0, 0.0).unwrap();
        assert!((v.re - 1.0 / PI).abs() < 1e-10 && v.im.abs() < 1e-12);
        let a = special_hermite_integral(1, 0, 1.0, 0.0).unwrap();
        let b = special_hermite(1, 0, 1.0, 0.0).unwrap();
        assert!((a - b).norm() < 1e-8);
        assert!(special_hermite_integral(65, 0, 0.0, 0.0).is_err());
    }

    #[test]
    fn oracle_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..30 {
            let (m, n) = (rng.random_range(0..=20), rng.random_range(0..=20));
            let (q, p) = (rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0));
            let a = special_hermite(m, n, q, p).unwrap();
            let b = special_hermite_integral(m, n, q, p).unwrap();
            assert!((a - b).norm() < 1e-8, "({m},{n}) at ({q},{p}): {a} vs {b}");
        }
    }

    #[test]
    fn radial_examples() {
        assert!((radial_modulus(0, 0, 1.0).unwrap() - (-1.0f64).exp() / PI).abs() < 1e-15);
        assert!((radial_modulus(0, 0, 1.0).unwrap() - 0.11709).abs() < 1e-5);
        assert!((radial_modulus(1, 0, 1.0).unwrap() - 2f64.sqrt() * (-1.0f64).exp() / PI).abs() < 1e-15);
        assert_eq!(radial_modulus(3, 7, 1.4).unwrap(), radial_modulus(7, 3, 1.4).unwrap());
        assert_eq!(radial_modulus(4, 0, 0.0).unwrap(), 0.0);
    }

    proptest! {
        #[test]
        fn radial_and_symmetric(m in 0usize..40, n in 0usize..40, r in 0.0f64..7.0, t in 0.0f64..6.3) {
            let (q, p) = (r * t.cos(), r * t.sin());
            let v = special_hermite(m, n, q, p).unwrap();
            let l = radial_modulus(m, n, r).unwrap();
            prop_assert!((v.norm() - l).abs() <= 1e-10);
            let w = special_hermite(n, m, q, -p).unwrap();
            prop_assert!((v - w).norm() <= 1e-14);
            prop_assert_eq!(special_hermite(n, m, q, p).unwrap(), v.conj());
        }
    }
}
