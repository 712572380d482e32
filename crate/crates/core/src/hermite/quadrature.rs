//! Gauss–Hermite rules for the weight e^{−x²}.
//!
//! Nodes are the eigenvalues of the Jacobi matrix of the normalized Hermite
//! recurrence (zero diagonal, off-diagonal √(k/2)), polished by Newton steps
//! on h_N. Weights come from the Christoffel function,
//! w_k e^{x_k²} = 1 / Σ_{j<N} h_j(x_k)², which equals the squared first
//! eigenvector component times √π but stays accurate at large orders.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{hermite_values_into, CoefficientSequence, HERMITE_CEILING};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// w_k e^{x_k²}: the weights for integrands that already carry e^{−x²/2}
    /// factors, such as products of Hermite functions.
    function_weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Weights against e^{−x²}. Outermost weights of high-order rules fall
    /// below the double range and read as 0; use [`Self::function_weights`].
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn function_weights(&self) -> &[f64] {
        &self.function_weights
    }

    /// ∫ g(x) dx ≈ Σ_k λ_k g(x_k), exact when g e^{x²} is a polynomial of degree < 2N.
    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.function_weights).map(|(&x, &l)| l * g(x)).sum()
    }
}

pub fn gauss_hermite_rule(order: usize) -> Result<QuadratureRule> {
    if order == 0 {
        return Err(Error::Argument("quadrature order must be at least 1".into()));
    }
    if order > HERMITE_CEILING {
        return Err(Error::Capacity { requested: order, ceiling: HERMITE_CEILING });
    }
    let n = order;
    let mut diag = vec![0.0; n];
    let mut off: Vec<f64> = (1..n).map(|k| (k as f64 / 2.0).sqrt()).collect();
    off.push(0.0);
    tridiagonal_ql(&mut diag, &mut off)?;
    diag.sort_by(f64::total_cmp);

    let polished: Vec<(f64, f64)> = diag
        .par_iter()
        .map(|&x0| polish(x0, n))
        .collect::<Result<Vec<_>>>()?;

    // Enforce exact symmetry: average mirrored pairs.
    let mut nodes = vec![0.0; n];
    let mut function_weights = vec![0.0; n];
    for k in 0..n {
        let j = n - 1 - k;
        nodes[k] = 0.5 * (polished[k].0 - polished[j].0);
        function_weights[k] = 0.5 * (polished[k].1 + polished[j].1);
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    if nodes.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::Numeric(format!("Gauss–Hermite nodes of order {n} failed to separate")));
    }
    let weights = nodes.iter().zip(&function_weights).map(|(&x, &l)| l * (-x * x).exp()).collect();
    Ok(QuadratureRule { nodes, weights, function_weights })
}

/// Newton refinement of a root of h_N; returns the node and 1/Σ_{j<N} h_j².
fn polish(mut x: f64, n: usize) -> Result<(f64, f64)> {
    let mut h = vec![0.0; n + 1];
    for _ in 0..8 {
        hermite_values_into(x, &mut h)?;
        // h_N' = √(2N) h_{N−1} − x h_N.
        let deriv = (2.0 * n as f64).sqrt() * h[n - 1] - x * h[n];
        if deriv == 0.0 {
            break;
        }
        let step = h[n] / deriv;
        x -= step;
        if step.abs() <= 1e-15 * x.abs().max(1.0) {
            break;
        }
    }
    let christoffel = scaled_christoffel(x, n)?;
    Ok((x, christoffel))
}

/// 1/Σ_{j<N} h_j(x)² with the recurrence carried in scaled form, so the sum
/// is not lost to underflow at the outer nodes of high-order rules.
fn scaled_christoffel(x: f64, n: usize) -> Result<f64> {
    // Σ h_j² = e^{−x²}/√π · Σ m_j², with m_j the unscaled recurrence mantissas.
    let mut log_scale = 0.0f64;
    let (mut prev, mut cur) = (0.0f64, 1.0f64);
    let mut sum = 1.0f64;
    for j in 0..n - 1 {
        let jf = j as f64;
        let next = (2.0 / (jf + 1.0)).sqrt() * x * cur - (jf / (jf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > 1e150 {
            prev *= 1e-150;
            cur *= 1e-150;
            sum *= 1e-300;
            log_scale += 2.0 * 1e150f64.ln();
        }
        sum += cur * cur;
    }
    if !(sum.is_finite() && sum > 0.0) {
        return Err(Error::Numeric(format!("Christoffel sum degenerate at x = {x}")));
    }
    // λ = √π e^{x²} / (Σ m_j² · e^{log_scale})
    let log_lambda = 0.5 * std::f64::consts::PI.ln() + x * x - sum.ln() - log_scale;
    Ok(log_lambda.exp())
}

/// Eigenvalues of a symmetric tridiagonal matrix by implicit QL with Wilkinson
/// shifts. `d` holds the diagonal, `e[0..n−1]` the subdiagonal; eigenvalues
/// are returned in `d`.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::Numeric(format!(
                    "tridiagonal eigen-solver did not converge for eigenvalue {l} of {n}"
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// α_n ≈ ⟨f, h_n⟩ = Σ_k λ_k f(x_k) h_n(x_k), λ_k = w_k e^{x_k²}.
pub fn analyze(
    f: impl Fn(f64) -> Complex64 + Sync,
    n_max: usize,
    rule: &QuadratureRule,
) -> Result<CoefficientSequence> {
    if rule.order() < n_max + 1 {
        return Err(Error::Argument(format!(
            "rule order {} is below n_max + 1 = {}",
            rule.order(),
            n_max + 1
        )));
    }
    if n_max > HERMITE_CEILING {
        return Err(Error::Capacity { requested: n_max, ceiling: HERMITE_CEILING });
    }
    let contributions: Vec<Vec<Complex64>> = rule
        .nodes
        .par_iter()
        .zip(&rule.function_weights)
        .map(|(&x, &l)| {
            let fx = f(x);
            if !(fx.re.is_finite() && fx.im.is_finite()) {
                return Err(Error::Data(format!("function value {fx} at node x = {x}")));
            }
            let mut h = vec![0.0; n_max + 1];
            hermite_values_into(x, &mut h)?;
            Ok(h.iter().map(|&hn| fx * (l * hn)).collect())
        })
        .collect::<Result<_>>()?;
    // Sequential reduction in node order keeps the result bit-reproducible.
    let mut alpha = vec![Complex64::new(0.0, 0.0); n_max + 1];
    for c in &contributions {
        for (a, v) in alpha.iter_mut().zip(c) {
            *a += v;
        }
    }
    CoefficientSequence::new(alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::hermite_values;
    use std::f64::consts::PI;

    #[test]
    fn first_orders() {
        let r = gauss_hermite_rule(1).unwrap();
        assert_eq!(r.nodes(), &[0.0]);
        assert!((r.weights()[0] - PI.sqrt()).abs() < 1e-15);
        let r = gauss_hermite_rule(2).unwrap();
        let s = 0.5f64.sqrt();
        assert!((r.nodes()[0] + s).abs() < 1e-15 && (r.nodes()[1] - s).abs() < 1e-15);
        for w in r.weights() {
            assert!((w - PI.sqrt() / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn weights_sum_and_symmetry() {
        for order in [3, 7, 20, 61, 100, 150] {
            let r = gauss_hermite_rule(order).unwrap();
            let sum: f64 = r.weights().iter().sum();
            assert!((sum - PI.sqrt()).abs() < 1e-12, "order {order}: {sum}");
            assert!(r.weights().iter().all(|&w| w > 0.0));
            let n = r.nodes();
            assert!(n.windows(2).all(|p| p[1] > p[0]));
            assert!(n.iter().zip(n.iter().rev()).all(|(a, b)| *a == -*b));
        }
    }

    #[test]
    fn polynomial_exactness() {
        // ∫ x^{2k} e^{−x²} = Γ(k + 1/2).
        let r = gauss_hermite_rule(10).unwrap();
        let mut gamma = PI.sqrt();
        for k in 0..10 {
            let q: f64 = r.nodes().iter().zip(r.weights()).map(|(x, w)| w * x.powi(2 * k)).sum();
            assert!((q - gamma).abs() < 1e-12 * gamma, "degree {}", 2 * k);
            let odd: f64 = r.nodes().iter().zip(r.weights()).map(|(x, w)| w * x.powi(2 * k + 1)).sum();
            assert!(odd.abs() < 1e-12 * gamma);
            gamma *= k as f64 + 0.5;
        }
    }

    #[test]
    fn nodes_are_roots_of_h_n() {
        let order = 300;
        let r = gauss_hermite_rule(order).unwrap();
        for &x in r.nodes() {
            let h = hermite_values(order, x).unwrap();
            assert!(h[order].abs() < 1e-13, "h_N({x}) = {}", h[order]);
        }
    }

    #[test]
    fn analyze_unit_vectors_and_parity() {
        let r = gauss_hermite_rule(40).unwrap();
        let a = analyze(|x| Complex64::new(hermite_values(3, x).unwrap()[3], 0.0), 30, &r).unwrap();
        for (n, v) in a.values().iter().enumerate() {
            let target = if n == 3 { 1.0 } else { 0.0 };
            assert!((v - target).norm() < 1e-10);
        }
        let g = analyze(|x| Complex64::new(PI.powf(-0.25) * (-x * x / 2.0).exp(), 0.0), 30, &r).unwrap();
        assert!((g.get(0).re - 1.0).abs() < 1e-12);
        let odd = analyze(|x| Complex64::new(x.powi(3) * (-x * x / 2.0).exp(), x.sin() * (-x * x).exp()), 30, &r)
            .unwrap();
        for n in (0..=30).step_by(2) {
            assert!(odd.get(n).norm() < 1e-12);
        }
    }

    #[test]
    fn nan_is_a_data_error() {
        let r = gauss_hermite_rule(5).unwrap();
        assert!(matches!(analyze(|_| Complex64::new(f64::NAN, 0.0), 2, &r), Err(Error::Data(_))));
        assert!(analyze(|_| Complex64::new(1.0, 0.0), 5, &r).is_err());
    }

    #[test]
    fn high_order_rule_is_usable() {
        let r = gauss_hermite_rule(1100).unwrap();
        let h = |x: f64| hermite_values(1024, x).unwrap()[1024];
        let norm = r.integrate(|x| h(x) * h(x));
        assert!((norm - 1.0).abs() < 1e-10, "{norm}");
    }
}
