//! Weakly singular kernel factors `H(s, t)` and their analytic moments.
//!
//! For the logarithmic and algebraic kernels every integral needed by the
//! product rule is computed from closed-form antiderivatives in the shifted
//! variable `u = t - s`. Both antiderivatives vanish at `u = 0`, so a
//! singular point coinciding with a grid node needs no special handling.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::gauss::gl20;

/// Shared two-argument callable `(s, t) -> value`.
pub type Fn2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Distances below this are treated as the singular point itself.
const CANCELLATION_GUARD: f64 = 1e-300;

#[derive(Clone)]
pub enum SingularKernel {
    /// `H(s, t) = ln|s - t|`.
    Logarithmic,
    /// `H(s, t) = |s - t|^(-beta)`, `0 < beta < 1`. Build with [`SingularKernel::algebraic`].
    AlgebraicPower { beta: f64 },
    /// A continuous `H(s, t)`; moments are taken by Gauss–Legendre.
    Smooth(Fn2),
}

impl fmt::Debug for SingularKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SingularKernel::Logarithmic => write!(f, "Logarithmic"),
            SingularKernel::AlgebraicPower { beta } => write!(f, "AlgebraicPower {{ beta: {beta} }}"),
            SingularKernel::Smooth(_) => write!(f, "Smooth(<fn>)"),
        }
    }
}

impl SingularKernel {
    /// `|s - t|^(-beta)`; rejects `beta` outside `(0, 1)`.
    pub fn algebraic(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::Domain(format!(
                "algebraic kernel exponent must lie in (0, 1), got {beta}"
            )));
        }
        Ok(SingularKernel::AlgebraicPower { beta })
    }

    pub fn smooth(h: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        SingularKernel::Smooth(Arc::new(h))
    }

    /// `H ≡ 1`: the product rule degenerates to the trapezoidal rule.
    pub fn constant_one() -> Self {
        SingularKernel::smooth(|_, _| 1.0)
    }

    /// Pointwise value. Infinite at `s = t` for the singular kinds.
    pub fn eval(&self, s: f64, t: f64) -> f64 {
        match self {
            SingularKernel::Logarithmic => (s - t).abs().ln(),
            SingularKernel::AlgebraicPower { beta } => (s - t).abs().powf(-beta),
            SingularKernel::Smooth(h) => h(s, t),
        }
    }

    /// `H(s, s + u)`, evaluated from the offset `u` directly so that tiny
    /// offsets keep full precision.
    pub fn eval_shifted(&self, s: f64, u: f64) -> f64 {
        match self {
            SingularKernel::Logarithmic => u.abs().ln(),
            SingularKernel::AlgebraicPower { beta } => u.abs().powf(-beta),
            SingularKernel::Smooth(h) => h(s, s + u),
        }
    }

    /// True when `H(s, t)` depends on `t - s` only.
    pub fn is_translation_invariant(&self) -> bool {
        !matches!(self, SingularKernel::Smooth(_))
    }

    /// Antiderivatives `(G0, G1)` in `u = t - s` with `G0' = H(u)` and `G1' = u H(u)`,
    /// normalized so both vanish at `u = 0`. `None` for smooth kernels.
    fn shifted_antiderivatives(&self, u: f64) -> Option<(f64, f64)> {
        let au = u.abs();
        match self {
            SingularKernel::Logarithmic => {
                if au < CANCELLATION_GUARD {
                    return Some((0.0, 0.0));
                }
                let l = au.ln();
                Some((u * (l - 1.0), 0.5 * u * u * l - 0.25 * u * u))
            }
            SingularKernel::AlgebraicPower { beta } => {
                if au < CANCELLATION_GUARD {
                    return Some((0.0, 0.0));
                }
                let p = au.powf(1.0 - beta);
                Some((u.signum() * p / (1.0 - beta), au * p / (2.0 - beta)))
            }
            SingularKernel::Smooth(_) => None,
        }
    }

    /// `∫_c^d H(s, t) dt`.
    pub fn moment0(&self, s: f64, c: f64, d: f64) -> f64 {
        if c == d {
            return 0.0;
        }
        match self.shifted_moments(s, c, d) {
            Some((m0, _)) => m0,
            None => self.smooth_integral(s, c, d, |_| 1.0),
        }
    }

    /// `∫_c^d H(s, t) t dt`.
    pub fn moment1(&self, s: f64, c: f64, d: f64) -> f64 {
        if c == d {
            return 0.0;
        }
        match self.shifted_moments(s, c, d) {
            // ∫ t H = ∫ (u + s) H(u) du
            Some((m0, m1u)) => m1u + s * m0,
            None => self.smooth_integral(s, c, d, |t| t),
        }
    }

    /// `(∫ H(u) du, ∫ u H(u) du)` over `u ∈ [c - s, d - s]`.
    fn shifted_moments(&self, s: f64, c: f64, d: f64) -> Option<(f64, f64)> {
        let (g0c, g1c) = self.shifted_antiderivatives(c - s)?;
        let (g0d, g1d) = self.shifted_antiderivatives(d - s)?;
        Some((g0d - g0c, g1d - g1c))
    }

    fn smooth_integral(&self, s: f64, c: f64, d: f64, weight: impl Fn(f64) -> f64) -> f64 {
        const PIECES: usize = 4;
        let rule = gl20();
        let w = (d - c) / PIECES as f64;
        (0..PIECES)
            .map(|p| {
                let lo = c + p as f64 * w;
                let hi = if p + 1 == PIECES { d } else { lo + w };
                rule.integrate(lo, hi, |t| self.eval(s, t) * weight(t))
            })
            .sum()
    }

    /// Integrals of `H(s, ·)` against the two hat-function halves on one panel `[c, d]`:
    /// `(∫ H (d - t) dt / h, ∫ H (t - c) dt / h)` with `h = d - c`.
    /// The first entry contributes to the weight of node `c`, the second to node `d`.
    pub fn panel_hat_integrals(&self, s: f64, c: f64, d: f64) -> (f64, f64) {
        let h = d - c;
        match self {
            SingularKernel::Smooth(_) => self.smooth_panel_hats(s, c, h),
            _ => {
                let p = c - s;
                let q = d - s;
                let (g0p, g1p) = self.shifted_antiderivatives(p).expect("analytic kernel");
                let (g0q, g1q) = self.shifted_antiderivatives(q).expect("analytic kernel");
                hats_from_antiderivatives(p, q, h, g0q - g0p, g1q - g1p)
            }
        }
    }

    /// Hat integrals of a smooth `H(s, ·)` over the panel `[c, c + h]`.
    pub(crate) fn smooth_panel_hats(&self, s: f64, c: f64, h: f64) -> (f64, f64) {
        // m0/2 ∓ (first moment about the midpoint)/h; the odd part is
        // summed pairwise so that a constant H gives exactly h/2 each.
        let rule = gl20();
        let (nodes, weights) = (rule.nodes(), rule.weights());
        let half = 0.5 * h;
        let mid = c + half;
        let m = nodes.len();
        let values: Vec<f64> = nodes.iter().map(|x| self.eval(s, mid + half * x)).collect();
        let m0: f64 = half * weights.iter().zip(&values).map(|(w, v)| w * v).sum::<f64>();
        let odd: f64 = (0..m / 2)
            .map(|i| weights[m - 1 - i] * nodes[m - 1 - i] * (values[m - 1 - i] - values[i]))
            .sum();
        let centered = half * half * odd;
        (0.5 * m0 - centered / h, 0.5 * m0 + centered / h)
    }

    pub(crate) fn antiderivatives_at(&self, u: f64) -> Option<(f64, f64)> {
        self.shifted_antiderivatives(u)
    }
}

#[inline]
pub(crate) fn hats_from_antiderivatives(p: f64, q: f64, h: f64, dg0: f64, dg1: f64) -> (f64, f64) {
    // ∫_p^q H(u)(q - u) du and ∫_p^q H(u)(u - p) du
    let left = q * dg0 - dg1;
    let right = dg1 - p * dg0;
    (left / h, right / h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_moment0_centered() {
        let k = SingularKernel::Logarithmic;
        let m = k.moment0(0.5, 0.0, 1.0);
        assert!((m - (0.5f64.ln() - 1.0)).abs() < 1e-15);
        assert!((m + 1.6931471805599453).abs() < 1e-15);
    }

    #[test]
    fn empty_interval_moments_vanish() {
        let k = SingularKernel::Logarithmic;
        assert_eq!(k.moment0(0.3, 0.7, 0.7), 0.0);
        assert_eq!(k.moment1(0.3, 0.7, 0.7), 0.0);
        let a = SingularKernel::algebraic(0.3).unwrap();
        assert_eq!(a.moment1(0.1, 0.2, 0.2), 0.0);
        assert_eq!(SingularKernel::constant_one().moment1(0.1, 0.2, 0.2), 0.0);
    }

    #[test]
    fn algebraic_half_from_endpoint() {
        let k = SingularKernel::algebraic(0.5).unwrap();
        assert!((k.moment0(0.0, 0.0, 1.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn log_moment1_symmetric_point() {
        let k = SingularKernel::Logarithmic;
        let m1 = k.moment1(0.5, 0.0, 1.0);
        assert!((m1 + 0.8465735902799727).abs() < 1e-15);
        assert!((m1 - 0.5 * k.moment0(0.5, 0.0, 1.0)).abs() < 1e-15);
    }

    // Reference values from 40-digit quadrature split at the singular point.
    #[test]
    fn golden_moments() {
        let k = SingularKernel::Logarithmic;
        assert!((k.moment1(0.25, 0.0, 1.0) + 0.553_172_670_246_768_9).abs() < 1e-15);
        assert!((k.moment0(0.25, 0.0, 1.0) + 1.562_335_144_618_808_4).abs() < 1e-15);
        let a = SingularKernel::algebraic(0.5).unwrap();
        assert!((a.moment0(0.3, 0.0, 1.0) - 2.768_765_168_078_483_3).abs() < 1e-14);
        assert!((a.moment1(0.3, 0.0, 1.0) - 1.111_526_384_638_413_7).abs() < 1e-14);
    }

    #[test]
    fn algebraic_rejects_out_of_range() {
        for beta in [0.0, 1.0, 1.2, -0.5, f64::NAN] {
            assert!(SingularKernel::algebraic(beta).is_err(), "beta={beta}");
        }
    }

    #[test]
    fn hat_integrals_sum_to_moment0() {
        for k in [
            SingularKernel::Logarithmic,
            SingularKernel::algebraic(0.7).unwrap(),
            SingularKernel::smooth(|s, t| (s * t).exp()),
        ] {
            for &(s, c, d) in &[(0.5, 0.25, 0.75), (0.25, 0.25, 0.5), (0.9, 0.0, 0.1)] {
                let (l, r) = k.panel_hat_integrals(s, c, d);
                let m0 = k.moment0(s, c, d);
                assert!((l + r - m0).abs() < 1e-14 * (1.0 + m0.abs()), "{k:?} {s} {c} {d}");
            }
        }
    }

    #[test]
    fn smooth_one_hats_are_half_panels() {
        let k = SingularKernel::constant_one();
        let (l, r) = k.panel_hat_integrals(0.3, 0.25, 0.5);
        assert!((l - 0.125).abs() <= 2.0 * f64::EPSILON * 0.125);
        assert!((r - 0.125).abs() <= 2.0 * f64::EPSILON * 0.125);
    }
}
