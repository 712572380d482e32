//! Weight functions ω and the norms they induce.
//!
//! A weight function is a continuous nondecreasing ω: [0, ∞) → [0, ∞). Two
//! families are provided: the power law ω(t) = λ t^β with β ∈ (0, 2], and a
//! tabulated family (piecewise linear through monotone samples, scaled by λ)
//! for experiments with shapes that have no closed form.
//!
//! The class of ω is the ray {cω : c > 0}; [`WeightFunction::scaled`] moves
//! along it.

mod axioms;
mod conjugate;
mod norms;

pub use axioms::{check_weight_axioms, default_axiom_grid, AxiomReport, AxiomVerdict, Verdict};
pub(crate) use axioms::require_strict_gaussian_limit;
pub use conjugate::{ConjugateMethod, OmegaStar};
pub use norms::{
    function_norm, matrix_norm, phase_space_norm, sequence_norm, NormEstimate, Witness,
    BOUNDARY_FRACTION,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightFamily {
    Power,
    Tabulated,
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Power { beta: f64 },
    Tabulated { ts: Vec<f64>, ws: Vec<f64> },
}

/// A weight function ω. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WeightSpec", into = "WeightSpec")]
pub struct WeightFunction {
    lambda: f64,
    shape: Shape,
}

/// JSON form: `{"family":"power","lambda":λ,"beta":β}` or
/// `{"family":"tabulated","points":[[t,w],...]}` (optional `"lambda"`, default 1).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
enum WeightSpec {
    Power {
        lambda: f64,
        beta: f64,
    },
    Tabulated {
        points: Vec<[f64; 2]>,
        #[serde(default = "unit_scale", skip_serializing_if = "is_unit")]
        lambda: f64,
    },
}

fn unit_scale() -> f64 {
    1.0
}

fn is_unit(x: &f64) -> bool {
    *x == 1.0
}

impl TryFrom<WeightSpec> for WeightFunction {
    type Error = Error;

    fn try_from(spec: WeightSpec) -> Result<Self> {
        match spec {
            WeightSpec::Power { lambda, beta } => WeightFunction::power(lambda, beta),
            WeightSpec::Tabulated { points, lambda } => {
                WeightFunction::tabulated(&points)?.scaled(lambda)
            }
        }
    }
}

impl From<WeightFunction> for WeightSpec {
    fn from(w: WeightFunction) -> Self {
        match w.shape {
            Shape::Power { beta } => WeightSpec::Power { lambda: w.lambda, beta },
            Shape::Tabulated { ts, ws } => WeightSpec::Tabulated {
                points: ts.into_iter().zip(ws).map(|(t, w)| [t, w]).collect(),
                lambda: w.lambda,
            },
        }
    }
}

impl WeightFunction {
    /// ω(t) = λ t^β.
    pub fn power(lambda: f64, beta: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::Argument(format!("lambda must be a positive real, got {lambda}")));
        }
        if !(beta > 0.0 && beta <= 2.0) {
            return Err(Error::Argument(format!("beta must lie in (0, 2], got {beta}")));
        }
        Ok(Self { lambda, shape: Shape::Power { beta } })
    }

    /// Piecewise-linear weight through `(t, ω(t))` samples. Abscissae must be
    /// strictly increasing and nonnegative, values nonnegative and nondecreasing.
    pub fn tabulated(points: &[[f64; 2]]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Argument("tabulated weight needs at least two points".into()));
        }
        let ts: Vec<f64> = points.iter().map(|p| p[0]).collect();
        let ws: Vec<f64> = points.iter().map(|p| p[1]).collect();
        crate::error::ensure_finite(ts.iter().chain(&ws).copied(), "tabulated weight")?;
        if ts[0] < 0.0 || ws[0] < 0.0 {
            return Err(Error::Argument("tabulated weight must start at t ≥ 0 with ω ≥ 0".into()));
        }
        for k in 1..ts.len() {
            if ts[k] <= ts[k - 1] {
                return Err(Error::Argument(format!(
                    "tabulated abscissae must be strictly increasing (t[{k}] = {})",
                    ts[k]
                )));
            }
            if ws[k] < ws[k - 1] {
                return Err(Error::Argument(format!(
                    "tabulated values must be nondecreasing (ω({}) < ω({}))",
                    ts[k],
                    ts[k - 1]
                )));
            }
        }
        Ok(Self { lambda: 1.0, shape: Shape::Tabulated { ts, ws } })
    }

    pub fn family(&self) -> WeightFamily {
        match self.shape {
            Shape::Power { .. } => WeightFamily::Power,
            Shape::Tabulated { .. } => WeightFamily::Tabulated,
        }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Exponent of the power family; `None` for tabulated weights.
    pub fn beta(&self) -> Option<f64> {
        match self.shape {
            Shape::Power { beta } => Some(beta),
            Shape::Tabulated { .. } => None,
        }
    }

    /// The member cω of the same class.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::Argument(format!("scale factor must be positive, got {c}")));
        }
        Ok(Self { lambda: self.lambda * c, shape: self.shape.clone() })
    }

    /// Range of t on which ω can be evaluated.
    pub fn domain(&self) -> (f64, f64) {
        match &self.shape {
            Shape::Power { .. } => (0.0, f64::INFINITY),
            Shape::Tabulated { ts, .. } => (ts[0], ts[ts.len() - 1]),
        }
    }

    /// ω(t).
    pub fn eval(&self, t: f64) -> Result<f64> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::Domain(format!("weight evaluated at t = {t}; t must be ≥ 0")));
        }
        match &self.shape {
            Shape::Power { beta } => Ok(self.lambda * t.powf(*beta)),
            Shape::Tabulated { ts, ws } => {
                let (lo, hi) = (ts[0], ts[ts.len() - 1]);
                if t < lo || t > hi {
                    return Err(Error::Extrapolation { t, lo, hi });
                }
                let k = ts.partition_point(|&s| s <= t).clamp(1, ts.len() - 1);
                let (t0, t1, w0, w1) = (ts[k - 1], ts[k], ws[k - 1], ws[k]);
                let w = w0 + (w1 - w0) * (t - t0) / (t1 - t0);
                Ok(self.lambda * w)
            }
        }
    }

    /// Ω(u) = ω(e^u).
    pub fn big_omega(&self, u: f64) -> Result<f64> {
        self.eval(u.exp())
    }

    /// Ω*(ν) = sup_{u ∈ ℝ} {νu − Ω(u)}, the convex conjugate of Ω.
    pub fn omega_star(&self, nu: f64) -> Result<OmegaStar> {
        conjugate::omega_star(self, nu, conjugate::Domain::RealLine)
    }

    /// sup_{u ≥ 0} {νu − Ω(u)}: the conjugate restricted to the half line
    /// e^u ≥ 1. Nondecreasing in ν, and the form entering the moment bound.
    pub fn omega_star_half_line(&self, nu: f64) -> Result<OmegaStar> {
        conjugate::omega_star(self, nu, conjugate::Domain::HalfLine)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_values() {
        assert_eq!(WeightFunction::power(1.0, 2.0).unwrap().eval(2.0).unwrap(), 4.0);
        assert_eq!(WeightFunction::power(0.5, 1.0).unwrap().eval(3.0).unwrap(), 1.5);
        let w = WeightFunction::power(0.7, 0.3).unwrap();
        let w0 = w.eval(0.0).unwrap();
        assert!(w0.is_finite() && w0 >= 0.0);
    }

    #[test]
    fn rejects_bad_parameters_and_arguments() {
        assert!(WeightFunction::power(0.0, 1.0).is_err());
        assert!(WeightFunction::power(1.0, 2.5).is_err());
        assert!(WeightFunction::power(1.0, 0.0).is_err());
        let w = WeightFunction::power(1.0, 1.0).unwrap();
        assert!(matches!(w.eval(-1.0), Err(Error::Domain(_))));
        assert!(w.scaled(-2.0).is_err());
    }

    #[test]
    fn tabulated_interpolates_and_refuses_to_extrapolate() {
        let w = WeightFunction::tabulated(&[[0.0, 0.0], [1.0, 1.0], [3.0, 2.0]]).unwrap();
        assert_eq!(w.eval(0.5).unwrap(), 0.5);
        assert_eq!(w.eval(2.0).unwrap(), 1.5);
        assert_eq!(w.eval(3.0).unwrap(), 2.0);
        assert!(matches!(w.eval(3.5), Err(Error::Extrapolation { .. })));
        assert!(WeightFunction::tabulated(&[[0.0, 1.0], [1.0, 0.5]]).is_err());
        assert!(WeightFunction::tabulated(&[[1.0, 1.0], [1.0, 2.0]]).is_err());
    }

    #[test]
    fn scaling_stays_in_class() {
        let w = WeightFunction::power(0.4, 1.5).unwrap();
        let v = w.scaled(2.5).unwrap();
        assert_eq!(v.family(), WeightFamily::Power);
        assert_eq!(v.beta(), Some(1.5));
        assert!((v.eval(2.0).unwrap() - 2.5 * w.eval(2.0).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn json_forms() {
        let w: WeightFunction =
            serde_json::from_str(r#"{"family":"power","lambda":0.5,"beta":1}"#).unwrap();
        assert_eq!(w, WeightFunction::power(0.5, 1.0).unwrap());
        let t: WeightFunction =
            serde_json::from_str(r#"{"family":"tabulated","points":[[0,0],[2,1]]}"#).unwrap();
        assert_eq!(t.eval(1.0).unwrap(), 0.5);
        let back: WeightFunction = serde_json::from_str(&serde_json::to_string(&t).unwrap()).unwrap();
        assert_eq!(back, t);
        assert!(serde_json::from_str::<WeightFunction>(r#"{"family":"power","lambda":1,"beta":3}"#)
            .is_err());
    }
}
