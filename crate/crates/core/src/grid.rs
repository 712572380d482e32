//! Uniform axes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A uniform axis `lo, lo + step, ..., hi`, written `lo:hi:step`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisSpec {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl AxisSpec {
    pub fn new(lo: f64, hi: f64, step: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && step.is_finite()) {
            return Err(Error::Argument(format!("non-finite axis {lo}:{hi}:{step}")));
        }
        if !(step > 0.0) || hi < lo {
            return Err(Error::Argument(format!(
                "axis {lo}:{hi}:{step} needs step > 0 and hi ≥ lo"
            )));
        }
        let count = ((hi - lo) / step).round();
        if count > 50_000_000.0 {
            return Err(Error::Argument(format!("axis {lo}:{hi}:{step} has too many points")));
        }
        Ok(Self { lo, hi, step })
    }

    /// Symmetric axis [−half, half].
    pub fn symmetric(half: f64, step: f64) -> Result<Self> {
        Self::new(-half, half, step)
    }

    pub fn len(&self) -> usize {
        // Endpoint included when hi is a multiple of step away from lo.
        (((self.hi - self.lo) / self.step) * (1.0 + 1e-12)).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Points as lo + k·step, so symmetric axes stay exactly symmetric.
    pub fn points(&self) -> Vec<f64> {
        let n = self.len();
        if self.lo == -self.hi {
            let half = (n - 1) as i64 / 2;
            if (n - 1) % 2 == 0 && (half as f64 * self.step - self.hi).abs() <= 1e-9 * self.step {
                return (-half..=half).map(|k| k as f64 * self.step).collect();
            }
        }
        (0..n).map(|k| self.lo + k as f64 * self.step).collect()
    }
}

/// Spacing of a uniform axis; argument error if the points are not equally spaced.
pub fn uniform_step(xs: &[f64]) -> Result<f64> {
    if xs.len() < 2 {
        return Err(Error::Argument("axis needs at least two points".into()));
    }
    let step = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
    if !(step > 0.0) {
        return Err(Error::Argument("axis must be increasing".into()));
    }
    let tol = 1e-9 * step;
    for (k, &x) in xs.iter().enumerate() {
        if (x - (xs[0] + k as f64 * step)).abs() > tol {
            return Err(Error::Argument(format!("axis is not uniform at index {k}")));
        }
    }
    Ok(step)
}

impl std::str::FromStr for AxisSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Argument(format!("grid '{s}' must have the form lo:hi:step")));
        }
        let num = |p: &str| {
            p.trim()
                .parse::<f64>()
                .map_err(|e| Error::Argument(format!("grid '{s}': bad number '{p}': {e}")))
        };
        Self::new(num(parts[0])?, num(parts[1])?, num(parts[2])?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_expands() {
        let a: AxisSpec = "-8:8:0.03125".parse().unwrap();
        let pts = a.points();
        assert_eq!(pts.len(), 513);
        assert_eq!(pts[256], 0.0);
        assert_eq!(pts[0], -8.0);
        assert_eq!(pts[512], 8.0);
        assert!(pts.iter().zip(pts.iter().rev()).all(|(x, y)| *x == -*y));
    }

    #[test]
    fn non_symmetric_axes() {
        let a = AxisSpec::new(1.0, 3.0, 0.5).unwrap();
        assert_eq!(a.points(), vec![1.0, 1.5, 2.0, 2.5, 3.0]);
        let b = AxisSpec::new(0.0, 1.0, 0.3).unwrap();
        assert_eq!(b.len(), 4);
    }

    #[test]
    fn rejects_malformed() {
        assert!("1:2".parse::<AxisSpec>().is_err());
        assert!("1:x:0.1".parse::<AxisSpec>().is_err());
        assert!("2:1:0.1".parse::<AxisSpec>().is_err());
        assert!("0:1:0".parse::<AxisSpec>().is_err());
    }
}
