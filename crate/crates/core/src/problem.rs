//! Hammerstein problem instances `φ(s) - ∫ H(s,t) L(s,t) F(t, φ(t)) dt = y(s)`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::kernel::{Fn2, SingularKernel};
use crate::nonlinearity::Nonlinearity;
use crate::quadrature::reference_integral;

/// Shared one-argument callable.
pub type Fn1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

const LATTICE: usize = 33;

#[derive(Clone)]
pub struct HammersteinProblem {
    a: f64,
    b: f64,
    singular: SingularKernel,
    smooth: Fn2,
    nonlin: Nonlinearity,
    rhs: Fn1,
    exact: Option<Fn1>,
}

impl fmt::Debug for HammersteinProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HammersteinProblem")
            .field("domain", &(self.a, self.b))
            .field("singular", &self.singular)
            .field("nonlin", &self.nonlin)
            .field("has_exact", &self.exact.is_some())
            .finish_non_exhaustive()
    }
}

impl HammersteinProblem {
    /// Builds a problem on `[a, b]`. `smooth` is the regular kernel factor `L(s, t)`.
    ///
    /// `L` is spot-checked for finiteness on a 33×33 lattice.
    pub fn new(
        (a, b): (f64, f64),
        singular: SingularKernel,
        smooth: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        nonlin: Nonlinearity,
        rhs: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        Self::from_parts((a, b), singular, Arc::new(smooth), nonlin, Arc::new(rhs))
    }

    pub fn from_parts(
        (a, b): (f64, f64),
        singular: SingularKernel,
        smooth: Fn2,
        nonlin: Nonlinearity,
        rhs: Fn1,
    ) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::Domain(format!("invalid domain [{a}, {b}]")));
        }
        let step = (b - a) / (LATTICE - 1) as f64;
        for i in 0..LATTICE {
            for j in 0..LATTICE {
                let (s, t) = (a + i as f64 * step, a + j as f64 * step);
                let v = smooth(s, t);
                if !v.is_finite() {
                    return Err(Error::Domain(format!("L({s}, {t}) = {v} is not finite")));
                }
            }
        }
        Ok(HammersteinProblem { a, b, singular, smooth, nonlin, rhs, exact: None })
    }

    /// Attaches a known solution used for error reporting.
    pub fn with_exact(mut self, exact: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.exact = Some(Arc::new(exact));
        self
    }

    pub fn with_exact_fn(mut self, exact: Fn1) -> Self {
        self.exact = Some(exact);
        self
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn singular(&self) -> &SingularKernel {
        &self.singular
    }

    pub fn nonlinearity(&self) -> &Nonlinearity {
        &self.nonlin
    }

    /// Regular kernel factor `L(s, t)`.
    pub fn smooth(&self, s: f64, t: f64) -> f64 {
        (self.smooth)(s, t)
    }

    pub fn smooth_fn(&self) -> &Fn2 {
        &self.smooth
    }

    /// Right-hand side `y(s)`.
    pub fn rhs(&self, s: f64) -> f64 {
        (self.rhs)(s)
    }

    pub fn rhs_fn(&self) -> &Fn1 {
        &self.rhs
    }

    pub fn exact(&self) -> Option<&Fn1> {
        self.exact.as_ref()
    }
}

/// The example with `H = ln|s - t|`, `L = 1`, `F = sin(πu)`, `y = 1` on `[0, 1]`,
/// whose solution is `φ ≡ 1`.
pub fn constant_solution_example() -> HammersteinProblem {
    HammersteinProblem::new(
        (0.0, 1.0),
        SingularKernel::Logarithmic,
        |_, _| 1.0,
        Nonlinearity::SinPi,
        |_| 1.0,
    )
    .expect("constant data is valid")
    .with_exact(|_| 1.0)
}

/// Builds a problem whose solution is `exact` by setting `y = exact - K(exact)`,
/// with `K(exact)` taken from the adaptive reference quadrature at tolerance `quad_tol`.
///
/// The right-hand side is checked at 11 equispaced points during construction;
/// later evaluations that fail to converge return NaN.
pub fn manufactured_problem(
    domain: (f64, f64),
    singular: SingularKernel,
    smooth: Fn2,
    nonlin: Nonlinearity,
    exact: Fn1,
    quad_tol: f64,
) -> Result<HammersteinProblem> {
    if !(quad_tol > 0.0) {
        return Err(Error::Domain(format!("quad_tol must be positive, got {quad_tol}")));
    }
    let (a, b) = domain;
    let rhs_at = {
        let singular = singular.clone();
        let smooth = smooth.clone();
        let nonlin = nonlin.clone();
        let exact = exact.clone();
        move |s: f64| -> Result<f64> {
            let k = reference_integral(&singular, &*smooth, &nonlin, (a, b), &*exact, s, quad_tol)?;
            Ok(exact(s) - k)
        }
    };
    for i in 0..=10 {
        rhs_at(a + (b - a) * i as f64 / 10.0)?;
    }
    let rhs: Fn1 = Arc::new(move |s| rhs_at(s).unwrap_or(f64::NAN));
    Ok(HammersteinProblem::from_parts(domain, singular, smooth, nonlin, rhs)?.with_exact_fn(exact))
}

/// Manufactured problem with `φ = cos`, `F = u²`, `L = 1`, logarithmic kernel on `[0, 1]`.
pub fn manufactured_cos_square(quad_tol: f64) -> Result<HammersteinProblem> {
    manufactured_problem(
        (0.0, 1.0),
        SingularKernel::Logarithmic,
        Arc::new(|_, _| 1.0),
        Nonlinearity::Square,
        Arc::new(f64::cos),
        quad_tol,
    )
}

/// Named regular kernels `L(s, t)`.
pub const SMOOTH_KERNELS: &[&str] = &["one", "zero", "product", "cos_diff", "exp_sum"];

pub fn smooth_kernel_by_name(name: &str) -> Option<Fn2> {
    Some(match name {
        "one" => Arc::new(|_, _| 1.0),
        "zero" => Arc::new(|_, _| 0.0),
        "product" => Arc::new(|s, t| s * t),
        "cos_diff" => Arc::new(|s: f64, t: f64| (s - t).cos()),
        "exp_sum" => Arc::new(|s: f64, t: f64| (s + t).exp()),
        _ => return None,
    })
}

/// Named functions of one variable, used for `y`, initial iterates and exact solutions.
pub const FUNCTIONS: &[&str] = &["one", "zero", "t", "t2", "cos", "sin", "exp"];

pub fn function_by_name(name: &str) -> Option<Fn1> {
    Some(match name {
        "one" => Arc::new(|_| 1.0),
        "zero" => Arc::new(|_| 0.0),
        "t" => Arc::new(|t| t),
        "t2" => Arc::new(|t| t * t),
        "cos" => Arc::new(f64::cos),
        "sin" => Arc::new(f64::sin),
        "exp" => Arc::new(f64::exp),
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::eval_operator_reference;

    #[test]
    fn rejects_non_finite_smooth_kernel() {
        let r = HammersteinProblem::new(
            (0.0, 1.0),
            SingularKernel::Logarithmic,
            |s, t| 1.0 / (s - t),
            Nonlinearity::Identity,
            |_| 0.0,
        );
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn manufactured_constant_one_with_sin_pi() {
        let p = manufactured_problem(
            (0.0, 1.0),
            SingularKernel::Logarithmic,
            Arc::new(|_, _| 1.0),
            Nonlinearity::SinPi,
            Arc::new(|_| 1.0),
            1e-12,
        )
        .unwrap();
        for i in 0..=10 {
            let s = i as f64 / 10.0;
            assert!((p.rhs(s) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn manufactured_zero() {
        let p = manufactured_problem(
            (0.0, 1.0),
            SingularKernel::algebraic(0.5).unwrap(),
            Arc::new(|s: f64, t: f64| (s * t).exp()),
            Nonlinearity::Zero,
            Arc::new(|_| 0.0),
            1e-10,
        )
        .unwrap();
        assert_eq!(p.rhs(0.37), 0.0);
    }

    // 40-digit reference: cos(s) - ∫_0^1 ln|s - t| cos²t dt.
    #[test]
    fn manufactured_cos_square_golden() {
        let p = manufactured_cos_square(1e-13).unwrap();
        let golden = [
            (0.0, 1.901_353_244_200_673_7),
            (0.1, 2.173_793_563_686_609_1),
            (0.5, 2.137_310_821_325_103_2),
            (1.0, 1.065_910_994_783_970_2),
        ];
        for (s, y) in golden {
            assert!((p.rhs(s) - y).abs() < 1e-12, "s={s}: {} vs {y}", p.rhs(s));
        }
    }

    #[test]
    fn manufactured_residual_within_twice_tol() {
        let tol = 1e-10;
        let p = manufactured_cos_square(tol).unwrap();
        let exact = p.exact().unwrap().clone();
        for i in 0..=10 {
            let s = i as f64 / 10.0;
            let k = eval_operator_reference(&p, &*exact, s, tol).unwrap();
            let r = exact(s) - k - p.rhs(s);
            assert!(r.abs() <= 2.0 * tol, "s={s} residual {r:e}");
        }
    }

    #[test]
    fn manufactured_rejects_bad_tolerance() {
        let r = manufactured_problem(
            (0.0, 1.0),
            SingularKernel::Logarithmic,
            Arc::new(|_, _| 1.0),
            Nonlinearity::Square,
            Arc::new(f64::cos),
            0.0,
        );
        assert!(r.is_err());
    }

    #[test]
    fn registries_resolve() {
        for n in SMOOTH_KERNELS {
            assert!(smooth_kernel_by_name(n).is_some());
        }
        for n in FUNCTIONS {
            assert!(function_by_name(n).is_some());
        }
        assert!(function_by_name("tanh").is_none());
    }
}
