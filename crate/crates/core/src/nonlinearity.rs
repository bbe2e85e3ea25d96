//! Registry of nonlinearities `F(t, u)` with exact first and second `u`-derivatives.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::kernel::Fn2;

#[derive(Clone)]
pub enum Nonlinearity {
    /// `F = u`
    Identity,
    /// `F = 0`
    Zero,
    /// `F = sin(πu)`
    SinPi,
    /// `F = u²`
    Square,
    /// `F = u³`
    Cubic,
    /// `F = Σ c_k u^k`
    Polynomial(Vec<f64>),
    /// User-supplied `F`, `∂F/∂u`, `∂²F/∂u²`.
    Custom {
        name: String,
        f: Fn2,
        df: Fn2,
        d2f: Fn2,
    },
}

impl fmt::Debug for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Nonlinearity::Polynomial(c) => write!(f, "Polynomial({c:?})"),
            Nonlinearity::Custom { name, .. } => write!(f, "Custom({name})"),
            other => f.write_str(other.name()),
        }
    }
}

/// Names accepted by [`Nonlinearity::from_name`].
pub const REGISTRY: &[&str] = &["identity", "zero", "sin_pi", "square", "cubic"];

impl Nonlinearity {
    pub fn from_name(name: &str) -> Result<Self> {
        Ok(match name {
            "identity" => Nonlinearity::Identity,
            "zero" => Nonlinearity::Zero,
            "sin_pi" => Nonlinearity::SinPi,
            "square" => Nonlinearity::Square,
            "cubic" => Nonlinearity::Cubic,
            _ => {
                return Err(Error::Domain(format!(
                    "unknown nonlinearity `{name}` (known: {})",
                    REGISTRY.join(", ")
                )))
            }
        })
    }

    pub fn custom(
        name: impl Into<String>,
        f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        d2f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Nonlinearity::Custom {
            name: name.into(),
            f: Arc::new(f),
            df: Arc::new(df),
            d2f: Arc::new(d2f),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Nonlinearity::Identity => "identity",
            Nonlinearity::Zero => "zero",
            Nonlinearity::SinPi => "sin_pi",
            Nonlinearity::Square => "square",
            Nonlinearity::Cubic => "cubic",
            Nonlinearity::Polynomial(_) => "polynomial",
            Nonlinearity::Custom { name, .. } => name,
        }
    }

    /// `F(t, u)`.
    pub fn f(&self, t: f64, u: f64) -> f64 {
        match self {
            Nonlinearity::Identity => u,
            Nonlinearity::Zero => 0.0,
            Nonlinearity::SinPi => (PI * u).sin(),
            Nonlinearity::Square => u * u,
            Nonlinearity::Cubic => u * u * u,
            Nonlinearity::Polynomial(c) => horner(c, u),
            Nonlinearity::Custom { f, .. } => f(t, u),
        }
    }

    /// `∂F/∂u (t, u)`.
    pub fn df(&self, t: f64, u: f64) -> f64 {
        match self {
            Nonlinearity::Identity => 1.0,
            Nonlinearity::Zero => 0.0,
            Nonlinearity::SinPi => PI * (PI * u).cos(),
            Nonlinearity::Square => 2.0 * u,
            Nonlinearity::Cubic => 3.0 * u * u,
            Nonlinearity::Polynomial(c) => horner(&derivative(c), u),
            Nonlinearity::Custom { df, .. } => df(t, u),
        }
    }

    /// `∂²F/∂u² (t, u)`.
    pub fn d2f(&self, t: f64, u: f64) -> f64 {
        match self {
            Nonlinearity::Identity | Nonlinearity::Zero => 0.0,
            Nonlinearity::SinPi => -PI * PI * (PI * u).sin(),
            Nonlinearity::Square => 2.0,
            Nonlinearity::Cubic => 6.0 * u,
            Nonlinearity::Polynomial(c) => horner(&derivative(&derivative(c)), u),
            Nonlinearity::Custom { d2f, .. } => d2f(t, u),
        }
    }
}

fn horner(c: &[f64], u: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ck| acc * u + ck)
}

fn derivative(c: &[f64]) -> Vec<f64> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(k, &ck)| k as f64 * ck)
        .collect()
}

/// Compares the analytic derivatives with centered differences at one point.
/// Returns the worse of the two relative discrepancies.
pub fn derivative_mismatch(nl: &Nonlinearity, t: f64, u: f64, step: f64) -> f64 {
    let fd1 = (nl.f(t, u + step) - nl.f(t, u - step)) / (2.0 * step);
    let fd2 = (nl.df(t, u + step) - nl.df(t, u - step)) / (2.0 * step);
    let rel = |exact: f64, approx: f64| (exact - approx).abs() / exact.abs().max(1.0);
    rel(nl.df(t, u), fd1).max(rel(nl.d2f(t, u), fd2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn registry_derivatives_match_centered_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut all: Vec<Nonlinearity> = REGISTRY
            .iter()
            .map(|n| Nonlinearity::from_name(n).unwrap())
            .collect();
        all.push(Nonlinearity::Polynomial(vec![0.5, -1.0, 0.25, 2.0]));
        for nl in &all {
            for _ in 0..100 {
                let t = rng.gen_range(0.0..1.0);
                let u = rng.gen_range(-2.0..2.0);
                let m = derivative_mismatch(nl, t, u, 1e-5);
                assert!(m < 1e-6, "{nl:?} at ({t}, {u}): {m:e}");
            }
        }
    }

    #[test]
    fn sin_pi_vanishes_at_one() {
        assert!(Nonlinearity::SinPi.f(0.0, 1.0).abs() < 1e-15);
    }

    #[test]
    fn polynomial_matches_named() {
        let p = Nonlinearity::Polynomial(vec![0.0, 0.0, 1.0]);
        for u in [-1.5, 0.0, 0.3, 2.0] {
            assert_eq!(p.f(0.0, u), Nonlinearity::Square.f(0.0, u));
            assert_eq!(p.df(0.0, u), Nonlinearity::Square.df(0.0, u));
            assert_eq!(p.d2f(0.0, u), 2.0);
        }
    }

    #[test]
    fn unknown_name_is_rejected() {
        assert!(Nonlinearity::from_name("tanh").is_err());
    }
}
