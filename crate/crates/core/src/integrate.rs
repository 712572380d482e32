//! Adaptive Gauss–Kronrod (7/15) quadrature for complex integrands and the
//! trapezoid rule on uniform samples.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Kronrod abscissae on [0, 1]; odd indices are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// Gauss weights at XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs: 1e-13, rel: 1e-11, max_intervals: 4000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: Complex64,
    pub error: f64,
    pub intervals: usize,
}

struct Piece {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Result<Piece> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    let (k, g) = (k * h, g * h);
    if !(k.re.is_finite() && k.im.is_finite()) {
        return Err(Error::Numeric(format!("non-finite integrand on [{a}, {b}]")));
    }
    Ok(Piece { a, b, value: k, error: (k - g).norm() })
}

/// Globally adaptive G7/K15 on [a, b]: bisects the piece with the largest
/// error estimate until the total estimate meets `tol`.
pub fn gauss_kronrod<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Integral> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Argument(format!("integration limits must be finite, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(Integral { value: Complex64::new(0.0, 0.0), error: 0.0, intervals: 0 });
    }
    let mut heap = BinaryHeap::new();
    let first = kronrod(&f, a, b)?;
    let mut total = first.value;
    let mut error = first.error;
    heap.push(first);
    loop {
        if error <= tol.abs.max(tol.rel * total.norm()) {
            break;
        }
        if heap.len() >= tol.max_intervals {
            return Err(Error::Numeric(format!(
                "adaptive quadrature on [{a}, {b}] stopped at {} intervals with error estimate \
                 {error:.3e} (target {:.3e})",
                heap.len(),
                tol.abs.max(tol.rel * total.norm())
            )));
        }
        let worst = heap.pop().expect("heap is nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        let left = kronrod(&f, worst.a, mid)?;
        let right = kronrod(&f, mid, worst.b)?;
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // Re-sum periodically so that cancellation in the running totals cannot drift.
        if heap.len() % 64 == 0 {
            total = heap.iter().map(|p| p.value).sum();
            error = heap.iter().map(|p| p.error).sum();
        }
    }
    let value = heap.iter().map(|p| p.value).sum();
    let error = heap.iter().map(|p| p.error).sum();
    Ok(Integral { value, error, intervals: heap.len() })
}

/// Trapezoid rule for samples on a uniform grid with spacing `step`.
pub fn trapezoid(step: f64, values: &[f64]) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => step * (values[1..n - 1].iter().sum::<f64>() + 0.5 * (values[0] + values[n - 1])),
    }
}

/// Complex trapezoid rule.
pub fn trapezoid_complex(step: f64, values: &[Complex64]) -> Complex64 {
    match values.len() {
        0 | 1 => Complex64::new(0.0, 0.0),
        n => {
            let inner: Complex64 = values[1..n - 1].iter().sum();
            (inner + (values[0] + values[n - 1]) * 0.5) * step
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(f: impl Fn(f64) -> f64) -> impl Fn(f64) -> Complex64 {
        move |x| Complex64::new(f(x), 0.0)
    }

    #[test]
    fn kronrod_is_exact_for_degree_22() {
        // K15 integrates degree 3·7+1 = 22 exactly, G7 degree 13.
        for deg in 0..=22 {
            let p = kronrod(&real(|x: f64| x.powi(deg)), -1.0, 1.0).unwrap();
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((p.value.re - exact).abs() < 1e-15, "degree {deg}");
            if deg <= 13 {
                assert!(p.error < 1e-15, "gauss degree {deg}");
            }
        }
        let sum_g: f64 = 2.0 * WG[..3].iter().sum::<f64>() + WG[3];
        assert!((sum_g - 2.0).abs() < 4.0 * f64::EPSILON);
    }

    #[test]
    fn adaptive_oscillatory_and_peaked() {
        let r = gauss_kronrod(real(|x| (10.0 * x).cos()), 0.0, 3.0, Tolerance::default()).unwrap();
        assert!((r.value.re - (30f64).sin() / 10.0).abs() < 1e-12);
        let r = gauss_kronrod(real(|x| (-x * x).exp()), -12.0, 12.0, Tolerance::default()).unwrap();
        assert!((r.value.re - std::f64::consts::PI.sqrt()).abs() < 1e-12);
        let r = gauss_kronrod(|x| Complex64::new(0.0, x).exp(), 0.0, std::f64::consts::PI, Tolerance::default())
            .unwrap();
        assert!((r.value - Complex64::new(0.0, 2.0)).norm() < 1e-13);
    }

    #[test]
    fn exhausted_budget_is_a_numeric_error() {
        let tol = Tolerance { abs: 1e-15, rel: 1e-15, max_intervals: 4 };
        let r = gauss_kronrod(real(|x: f64| x.abs().sqrt()), -1.0, 1.0, tol);
        assert!(matches!(r, Err(Error::Numeric(_))));
    }

    #[test]
    fn trapezoid_basics() {
        assert_eq!(trapezoid(0.5, &[1.0, 1.0, 1.0]), 1.0);
        assert_eq!(trapezoid(1.0, &[2.0]), 0.0);
    }
}
