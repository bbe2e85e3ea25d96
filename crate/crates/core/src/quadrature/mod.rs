//! Product-trapezoidal quadrature for weakly singular kernels.
//!
//! The weight of node `t_j` at the point `s` is the integral of `H(s, ·)`
//! against the hat function centered at `t_j`, so the rule integrates
//! `H(s, t) g(t)` exactly whenever `g` is piecewise linear on the grid.

pub mod adaptive;
pub mod gauss;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::kernel::{hats_from_antiderivatives, SingularKernel};
use crate::nonlinearity::Nonlinearity;
use crate::problem::HammersteinProblem;
use crate::sampled::SampledFunction;

use gauss::GaussLegendre;

/// How `K(x)(s)` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureMode {
    /// Product-trapezoidal rule on a fine uniform grid.
    FineProductRule,
    /// `∫ H (g(t) - g(s)) dt` by composite Gauss–Legendre plus `g(s) ∫ H dt` analytically.
    SingularitySubtraction,
}

impl QuadratureMode {
    pub fn as_str(self) -> &'static str {
        match self {
            QuadratureMode::FineProductRule => "fine_product_rule",
            QuadratureMode::SingularitySubtraction => "singularity_subtraction",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub n_fine: usize,
    pub mode: QuadratureMode,
    pub gl_points: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            n_fine: 4096,
            mode: QuadratureMode::FineProductRule,
            gl_points: 16,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_fine < 2 {
            return Err(Error::Domain(format!("n_fine must be at least 2, got {}", self.n_fine)));
        }
        if self.gl_points < 2 {
            return Err(Error::Domain(format!(
                "gl_points must be at least 2, got {}",
                self.gl_points
            )));
        }
        Ok(())
    }
}

/// Product-rule weights `w_j(s)`, `j = 0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    pub s: f64,
    pub w: Vec<f64>,
}

/// Adds the weights of the uniform `nodes` (spacing `h`) at `s` into `out`,
/// which must be zeroed.
fn accumulate_weights(nodes: &[f64], h: f64, kernel: &SingularKernel, s: f64, out: &mut [f64]) {
    debug_assert_eq!(out.len(), nodes.len());
    if kernel.is_translation_invariant() {
        let mut prev_u = nodes[0] - s;
        let mut prev_g = kernel.antiderivatives_at(prev_u).expect("analytic kernel");
        for j in 0..nodes.len() - 1 {
            let u = nodes[j + 1] - s;
            let g = kernel.antiderivatives_at(u).expect("analytic kernel");
            let (l, r) = hats_from_antiderivatives(prev_u, u, u - prev_u, g.0 - prev_g.0, g.1 - prev_g.1);
            out[j] += l;
            out[j + 1] += r;
            prev_u = u;
            prev_g = g;
        }
    } else {
        for j in 0..nodes.len() - 1 {
            // nominal width, so that H ≡ 1 reproduces the trapezoidal weights exactly
            let (l, r) = kernel.smooth_panel_hats(s, nodes[j], h);
            out[j] += l;
            out[j + 1] += r;
        }
    }
}

/// Product-trapezoidal weights of `grid` at `s`.
pub fn product_weights(grid: &Grid, kernel: &SingularKernel, s: f64) -> WeightVector {
    let mut w = vec![0.0; grid.n() + 1];
    accumulate_weights(grid.nodes(), grid.h(), kernel, s, &mut w);
    WeightVector { s, w }
}

/// Weight rows for every point in `points`: row `i` holds `w_j(points[i])`.
pub fn weight_rows(grid: &Grid, kernel: &SingularKernel, points: &[f64]) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|&s| product_weights(grid, kernel, s).w)
        .collect()
}

/// Discrete linearized operator applied to nodal data:
/// `Σ_j w_j(s) L(s, t_j) ∂F/∂u(t_j, x(t_j)) h_j`.
///
/// Every grid node must be one of `x`'s sample points.
pub fn apply_product_linearization(
    grid: &Grid,
    problem: &HammersteinProblem,
    x: &SampledFunction,
    h_values: &[f64],
    s: f64,
) -> Result<f64> {
    if h_values.len() != grid.n() + 1 {
        return Err(Error::Domain(format!(
            "expected {} nodal values, got {}",
            grid.n() + 1,
            h_values.len()
        )));
    }
    let wv = product_weights(grid, problem.singular(), s);
    let nl = problem.nonlinearity();
    let mut acc = 0.0;
    for (j, &t) in grid.nodes().iter().enumerate() {
        let idx = x.index_of(t).ok_or_else(|| {
            Error::Domain(format!("grid node {t} is not a sample point of the iterate"))
        })?;
        acc += wv.w[j] * problem.smooth(s, t) * nl.df(t, x.values()[idx]) * h_values[j];
    }
    Ok(acc)
}

/// Evaluates `K(x)(s)` for one or many points with a fixed quadrature setup.
#[derive(Debug, Clone)]
pub struct OperatorEvaluator {
    config: QuadratureConfig,
    fine: Grid,
    // Hat integrals of panel p seen from fine node i, indexed by p - i + n_fine.
    hats_by_offset: Option<Vec<(f64, f64)>>,
    rule: GaussLegendre,
}

/// Coarse panels used by the subtraction mode before grading toward `s`.
const SUBTRACTION_PANELS: usize = 32;
const GRADING_RATIO: f64 = 0.1;
const GRADING_LEVELS: usize = 12;

impl OperatorEvaluator {
    pub fn new(problem: &HammersteinProblem, config: QuadratureConfig) -> Result<Self> {
        config.validate()?;
        let (a, b) = problem.domain();
        let fine = Grid::new(a, b, config.n_fine)?;
        let hats_by_offset = match (config.mode, problem.singular().is_translation_invariant()) {
            (QuadratureMode::FineProductRule, true) => {
                let kernel = problem.singular();
                let n = config.n_fine as i64;
                let h = fine.h();
                let g: Vec<(f64, f64)> = (-n..=n)
                    .map(|k| kernel.antiderivatives_at(k as f64 * h).expect("analytic kernel"))
                    .collect();
                let table = (0..2 * n as usize)
                    .map(|m| {
                        let p = (m as i64 - n) as f64 * h;
                        let q = (m as i64 - n + 1) as f64 * h;
                        hats_from_antiderivatives(p, q, q - p, g[m + 1].0 - g[m].0, g[m + 1].1 - g[m].1)
                    })
                    .collect();
                Some(table)
            }
            _ => None,
        };
        Ok(OperatorEvaluator {
            config,
            fine,
            hats_by_offset,
            rule: GaussLegendre::new(config.gl_points),
        })
    }

    pub fn config(&self) -> &QuadratureConfig {
        &self.config
    }

    /// Nodes of the fine product-rule grid.
    pub fn fine_nodes(&self) -> &[f64] {
        self.fine.nodes()
    }

    /// `K(x)(s)` at a single point.
    pub fn eval(&self, problem: &HammersteinProblem, x: &SampledFunction, s: f64) -> f64 {
        self.eval_many(problem, x, &[s])[0]
    }

    /// `K(x)` at every point of `points`.
    pub fn eval_many(
        &self,
        problem: &HammersteinProblem,
        x: &SampledFunction,
        points: &[f64],
    ) -> Vec<f64> {
        if matches!(problem.nonlinearity(), Nonlinearity::Zero) {
            return vec![0.0; points.len()];
        }
        match self.config.mode {
            QuadratureMode::FineProductRule => self.fine_rule_many(problem, x, points),
            QuadratureMode::SingularitySubtraction => points
                .iter()
                .map(|&s| self.subtraction(problem, x, s))
                .collect(),
        }
    }

    fn fine_rule_many(
        &self,
        problem: &HammersteinProblem,
        x: &SampledFunction,
        points: &[f64],
    ) -> Vec<f64> {
        let nodes = self.fine.nodes();
        let nl = problem.nonlinearity();
        let fvals: Vec<f64> = nodes.iter().map(|&t| nl.f(t, x.eval(t))).collect();
        let mut g = vec![0.0; nodes.len()];
        let mut w = vec![0.0; nodes.len()];
        points
            .iter()
            .map(|&s| {
                for (gj, (&t, &fv)) in g.iter_mut().zip(nodes.iter().zip(&fvals)) {
                    *gj = problem.smooth(s, t) * fv;
                }
                let fine_index = nodes.binary_search_by(|p| p.total_cmp(&s)).ok();
                match (&self.hats_by_offset, fine_index) {
                    (Some(table), Some(i)) => {
                        let n = self.config.n_fine;
                        let row = &table[n - i..2 * n - i];
                        row.iter()
                            .zip(g.windows(2))
                            .map(|((l, r), gp)| l * gp[0] + r * gp[1])
                            .sum()
                    }
                    _ => {
                        w.iter_mut().for_each(|v| *v = 0.0);
                        accumulate_weights(nodes, self.fine.h(), problem.singular(), s, &mut w);
                        w.iter().zip(&g).map(|(a, b)| a * b).sum()
                    }
                }
            })
            .collect()
    }

    fn subtraction(&self, problem: &HammersteinProblem, x: &SampledFunction, s: f64) -> f64 {
        let (a, b) = problem.domain();
        let kernel = problem.singular();
        let nl = problem.nonlinearity();
        let g = |t: f64| problem.smooth(s, t) * nl.f(t, x.eval(t));
        let gs = g(s);
        let mut acc = 0.0;
        for (c, d) in subtraction_panels(a, b, s) {
            acc += self
                .rule
                .integrate(c, d, |t| {
                    // a node can round onto s inside the innermost graded panel
                    let u = t - s;
                    if u == 0.0 {
                        0.0
                    } else {
                        kernel.eval_shifted(s, u) * (g(t) - gs)
                    }
                });
        }
        acc + gs * kernel.moment0(s, a, b)
    }
}

/// Uniform panels split at `s`, with the panels touching `s` graded geometrically toward it.
fn subtraction_panels(a: f64, b: f64, s: f64) -> Vec<(f64, f64)> {
    let width = (b - a) / SUBTRACTION_PANELS as f64;
    let mut breaks: Vec<f64> = (0..=SUBTRACTION_PANELS).map(|k| a + k as f64 * width).collect();
    breaks[SUBTRACTION_PANELS] = b;
    if !breaks.contains(&s) {
        breaks.push(s);
        breaks.sort_by(f64::total_cmp);
    }
    let mut panels = Vec::new();
    for w in breaks.windows(2) {
        let (c, d) = (w[0], w[1]);
        if d <= c {
            continue;
        }
        if c == s || d == s {
            // distances from s of the graded breakpoints, from far to near
            let len = d - c;
            let mut cuts = vec![len];
            let mut r = len;
            for _ in 0..GRADING_LEVELS {
                r *= GRADING_RATIO;
                cuts.push(r);
            }
            cuts.push(0.0);
            let dir = if c == s { 1.0 } else { -1.0 };
            for pair in cuts.windows(2) {
                let (p, q) = (s + dir * pair[1], s + dir * pair[0]);
                panels.push(if p < q { (p, q) } else { (q, p) });
            }
        } else {
            panels.push((c, d));
        }
    }
    panels
}

/// `K(x)(s)` with the given quadrature settings.
pub fn eval_operator(
    problem: &HammersteinProblem,
    x: &SampledFunction,
    s: f64,
    config: QuadratureConfig,
) -> Result<f64> {
    Ok(OperatorEvaluator::new(problem, config)?.eval(problem, x, s))
}

/// High-accuracy `K(x)(s)` by adaptive Gauss–Kronrod quadrature split at `t = s`.
pub fn eval_operator_reference(
    problem: &HammersteinProblem,
    x: &dyn Fn(f64) -> f64,
    s: f64,
    tol: f64,
) -> Result<f64> {
    reference_integral(
        problem.singular(),
        &**problem.smooth_fn(),
        problem.nonlinearity(),
        problem.domain(),
        x,
        s,
        tol,
    )
}

pub(crate) fn reference_integral(
    kernel: &SingularKernel,
    smooth: &(dyn Fn(f64, f64) -> f64 + Send + Sync),
    nl: &Nonlinearity,
    (a, b): (f64, f64),
    x: &dyn Fn(f64) -> f64,
    s: f64,
    tol: f64,
) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    if matches!(nl, Nonlinearity::Zero) {
        return Ok(0.0);
    }
    let budget = adaptive::DEFAULT_MAX_EVALUATIONS / 2;
    // Integrate in the offset u = |t - s| so the singular end sits at u = 0.
    let right = adaptive::integrate(
        |u| {
            let t = s + u;
            kernel.eval_shifted(s, u) * smooth(s, t) * nl.f(t, x(t))
        },
        0.0,
        (b - s).max(0.0),
        0.5 * tol,
        budget,
    )?;
    let left = adaptive::integrate(
        |u| {
            let t = s - u;
            kernel.eval_shifted(s, -u) * smooth(s, t) * nl.f(t, x(t))
        },
        0.0,
        (s - a).max(0.0),
        0.5 * tol,
        budget,
    )?;
    Ok(left.value + right.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::constant_solution_example;
    use std::sync::Arc;

    fn oracle_hat(kernel: &SingularKernel, grid: &Grid, s: f64, j: usize) -> f64 {
        let nodes = grid.nodes();
        let h = grid.h();
        let mut total = 0.0;
        let mut piece = |c: f64, d: f64, weight: &dyn Fn(f64) -> f64| {
            // split at s when it falls inside the panel
            let mut pts = vec![c];
            if s > c && s < d {
                pts.push(s);
            }
            pts.push(d);
            for w in pts.windows(2) {
                let (lo, hi) = (w[0], w[1]);
                let est = if hi <= s {
                    adaptive::integrate(|u| kernel.eval_shifted(s, -u) * weight(s - u), s - hi, s - lo, 1e-14, 1_000_000)
                } else {
                    adaptive::integrate(|u| kernel.eval_shifted(s, u) * weight(s + u), lo - s, hi - s, 1e-14, 1_000_000)
                };
                total += est.unwrap().value;
            }
        };
        if j > 0 {
            let c = nodes[j - 1];
            piece(c, nodes[j], &|t| (t - c) / h);
        }
        if j < grid.n() {
            let d = nodes[j + 1];
            piece(nodes[j], d, &|t| (d - t) / h);
        }
        total
    }

    #[test]
    fn trapezoidal_weights_for_constant_kernel() {
        let g = Grid::new(0.0, 1.0, 4).unwrap();
        let w = product_weights(&g, &SingularKernel::constant_one(), 0.37).w;
        assert_eq!(w, vec![0.125, 0.25, 0.25, 0.25, 0.125]);
    }

    #[test]
    fn log_weights_match_oracle_two_panels() {
        let g = Grid::new(0.0, 1.0, 2).unwrap();
        let k = SingularKernel::Logarithmic;
        let w = product_weights(&g, &k, 0.5).w;
        for (j, wj) in w.iter().enumerate() {
            assert!((wj - oracle_hat(&k, &g, 0.5, j)).abs() < 1e-10);
        }
        // 40-digit references
        assert!((w[0] + 0.298_286_795_139_986_33).abs() < 1e-15);
        assert!((w[1] + 1.096_573_590_279_972_7).abs() < 1e-15);
        assert!((w[2] + 0.298_286_795_139_986_33).abs() < 1e-15);
    }

    #[test]
    fn golden_weights_off_node() {
        let g = Grid::new(0.0, 1.0, 4).unwrap();
        let log = product_weights(&g, &SingularKernel::Logarithmic, 0.3).w;
        let want = [
            -0.196_955_397_886_882_27,
            -0.690_512_815_037_856_6,
            -0.455_864_212_346_511_4,
            -0.206_505_244_118_290_76,
            -0.061_026_632_665_352_436,
        ];
        for (a, b) in log.iter().zip(want) {
            assert!((a - b).abs() < 1e-14);
        }
        let alg = product_weights(&g, &SingularKernel::algebraic(0.5).unwrap(), 0.3).w;
        let want = [
            0.278_717_502_402_060_84,
            1.234_126_968_408_232_1,
            0.715_541_752_799_932_7,
            0.380_620_713_327_473_35,
            0.159_758_231_140_784_3,
        ];
        for (a, b) in alg.iter().zip(want) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn reflection_reverses_weights() {
        let g = Grid::new(0.0, 1.0, 7).unwrap();
        for k in [SingularKernel::Logarithmic, SingularKernel::algebraic(0.4).unwrap()] {
            for s in [0.0, 0.13, 0.5, 0.71] {
                let w = product_weights(&g, &k, s).w;
                let mut wr = product_weights(&g, &k, 1.0 - s).w;
                wr.reverse();
                for (a, b) in w.iter().zip(&wr) {
                    assert!((a - b).abs() < 1e-12, "{k:?} s={s}");
                }
            }
        }
    }

    #[test]
    fn linearization_exact_on_linear_data() {
        let g = Grid::new(0.0, 1.0, 4).unwrap();
        let p = HammersteinProblem::new(
            (0.0, 1.0),
            SingularKernel::constant_one(),
            |_, _| 1.0,
            Nonlinearity::Identity,
            |_| 0.0,
        )
        .unwrap();
        let x = SampledFunction::from_fn(g.nodes().to_vec(), |_| 0.0).unwrap();
        let h: Vec<f64> = g.nodes().to_vec();
        assert_eq!(apply_product_linearization(&g, &p, &x, &h, 0.3).unwrap(), 0.5);
        let zeros = vec![0.0; 5];
        assert_eq!(apply_product_linearization(&g, &p, &x, &zeros, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn linearization_requires_nodes_in_iterate() {
        let g = Grid::new(0.0, 1.0, 4).unwrap();
        let p = constant_solution_example();
        let x = SampledFunction::from_fn(vec![0.0, 1.0], |_| 1.0).unwrap();
        assert!(apply_product_linearization(&g, &p, &x, &[0.0; 5], 0.3).is_err());
    }

    #[test]
    fn constant_solution_example_operator_vanishes_at_one() {
        let p = constant_solution_example();
        let x = SampledFunction::from_fn(vec![0.0, 1.0], |_| 1.0).unwrap();
        for mode in [QuadratureMode::FineProductRule, QuadratureMode::SingularitySubtraction] {
            let cfg = QuadratureConfig { mode, ..Default::default() };
            for s in [0.0, 0.3, 1.0] {
                assert!(eval_operator(&p, &x, s, cfg).unwrap().abs() < 1e-14);
            }
        }
    }

    #[test]
    fn both_modes_match_oracle_on_linear_iterate() {
        let p = HammersteinProblem::new(
            (0.0, 1.0),
            SingularKernel::Logarithmic,
            |_, _| 1.0,
            Nonlinearity::Identity,
            |_| 0.0,
        )
        .unwrap();
        let x = SampledFunction::from_fn(vec![0.0, 1.0], |t| t).unwrap();
        let want = eval_operator_reference(&p, &|t| t, 0.5, 1e-13).unwrap();
        assert!((want + 0.846_573_590_279_972_65).abs() < 1e-12);
        for mode in [QuadratureMode::FineProductRule, QuadratureMode::SingularitySubtraction] {
            let cfg = QuadratureConfig { mode, ..Default::default() };
            let got = eval_operator(&p, &x, 0.5, cfg).unwrap();
            assert!((got - want).abs() < 1e-6, "{mode:?}: {got} vs {want}");
        }
    }

    #[test]
    fn reference_reduces_to_moment0() {
        let p = HammersteinProblem::new(
            (0.0, 1.0),
            SingularKernel::Logarithmic,
            |_, _| 1.0,
            Nonlinearity::Polynomial(vec![1.0]),
            |_| 0.0,
        )
        .unwrap();
        for s in [0.0, 0.25, 0.8, 1.0] {
            let r = eval_operator_reference(&p, &|_| 0.0, s, 1e-12).unwrap();
            assert!((r - SingularKernel::Logarithmic.moment0(s, 0.0, 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_nonlinearity_gives_zero() {
        let p = HammersteinProblem::from_parts(
            (0.0, 1.0),
            SingularKernel::Logarithmic,
            Arc::new(|_, _| 3.0),
            Nonlinearity::Zero,
            Arc::new(|_| 0.0),
        )
        .unwrap();
        assert_eq!(eval_operator_reference(&p, &|t| t, 0.4, 1e-10).unwrap(), 0.0);
        let x = SampledFunction::from_fn(vec![0.0, 1.0], |t| t).unwrap();
        assert_eq!(eval_operator(&p, &x, 0.4, QuadratureConfig::default()).unwrap(), 0.0);
    }

    #[test]
    fn toeplitz_fast_path_matches_general_weights() {
        let p = constant_solution_example();
        let cfg = QuadratureConfig { n_fine: 64, ..Default::default() };
        let ev = OperatorEvaluator::new(&p, cfg).unwrap();
        let pts: Vec<f64> = ev.fine_nodes().to_vec();
        let x = SampledFunction::from_fn(pts.clone(), |t| 0.3 + t * t).unwrap();
        let fast = ev.eval_many(&p, &x, &pts);
        let fine = Grid::new(0.0, 1.0, 64).unwrap();
        for (s, k) in pts.iter().zip(fast) {
            let w = product_weights(&fine, p.singular(), *s).w;
            let slow: f64 = w
                .iter()
                .zip(fine.nodes())
                .map(|(w, &t)| w * p.nonlinearity().f(t, x.eval(t)))
                .sum();
            assert!((k - slow).abs() < 1e-13, "s={s}");
        }
    }

    #[test]
    fn subtraction_panels_cover_domain() {
        for s in [0.0, 0.3, 0.5, 1.0] {
            let panels = subtraction_panels(0.0, 1.0, s);
            let total: f64 = panels.iter().map(|(c, d)| d - c).sum();
            assert!((total - 1.0).abs() < 1e-14);
            assert!(panels.iter().all(|(c, d)| d > c));
        }
    }

    #[test]
    fn subtraction_is_finite_off_the_panel_breaks() {
        let problem = HammersteinProblem::new(
            (0.0, 1.0),
            SingularKernel::algebraic(0.5).unwrap(),
            |s: f64, t: f64| (s - t).cos(),
            Nonlinearity::SinPi,
            |_| 0.0,
        )
        .unwrap();
        let pts: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
        let x = SampledFunction::from_fn(pts, |t| 0.5 + 0.25 * t).unwrap();
        let cfg = QuadratureConfig { mode: QuadratureMode::SingularitySubtraction, ..Default::default() };
        let ev = OperatorEvaluator::new(&problem, cfg).unwrap();
        for s in [0.35, 0.123_456_789, 0.999_999] {
            let reference = eval_operator_reference(&problem, &|t| 0.5 + 0.25 * t, s, 1e-13).unwrap();
            let v = ev.eval(&problem, &x, s);
            assert!((v - reference).abs() < 1e-10, "s = {s}: {v} vs {reference}");
        }
    }
}
