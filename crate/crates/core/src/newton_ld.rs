//! Linearize-then-discretize: Newton's method on the operator equation
//! `φ - K(φ) = y`, with every linearized step discretized by the product
//! trapezoidal rule on a fixed coarse grid.
//!
//! Each step solves `(I - A_k) x_{k+1} = K(φ_k)(t_i) + y(t_i) - A_k x_k` on the
//! grid nodes and then rebuilds the new iterate everywhere through
//!
//! ```text
//! φ_{k+1}(s) = Σ_j w_j(s) L(s, t_j) ∂F/∂u(t_j, x_k[j]) (x_{k+1}[j] - x_k[j]) + K(φ_k)(s) + y(s).
//! ```
//!
//! The nonlinear operator `K` is evaluated accurately at every step, so the
//! iterates converge to the solution of the continuous equation up to the
//! quadrature floor, whatever the coarse grid size.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::linalg::{max_nan, norm_inf, solve_dense, DenseMatrix};
use crate::problem::{Fn1, HammersteinProblem};
use crate::quadrature::{product_weights, OperatorEvaluator, QuadratureConfig};
use crate::report::{IterationRecord, Method, SolveReport, Status};
use crate::sampled::SampledFunction;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LdSettings {
    /// Stop when the nodal step norm is at most `tol`.
    pub tol: f64,
    pub max_iter: usize,
    pub quad: QuadratureConfig,
    /// Size of the equispaced output grid used for error reporting.
    pub sample_count: usize,
}

impl Default for LdSettings {
    fn default() -> Self {
        LdSettings {
            tol: 1e-12,
            max_iter: 30,
            quad: QuadratureConfig::default(),
            sample_count: 201,
        }
    }
}

impl LdSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::Domain(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::Domain("max_iter must be at least 1".into()));
        }
        if self.sample_count < 2 {
            return Err(Error::Domain("sample_count must be at least 2".into()));
        }
        self.quad.validate()
    }
}

/// Starting iterate.
#[derive(Clone, Default)]
pub enum InitialGuess {
    /// `φ_0 = y`.
    #[default]
    Rhs,
    Function(Fn1),
    Sampled(SampledFunction),
}

impl InitialGuess {
    pub fn function(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        InitialGuess::Function(std::sync::Arc::new(f))
    }
}

/// Current iterate of the linearize-then-discretize method and the data frozen for the solve.
#[derive(Debug, Clone)]
pub struct LdState {
    grid: Grid,
    iterate: SampledFunction,
    nodal: Vec<f64>,
    k: usize,
    node_index: Vec<usize>,
    sample_index: Vec<usize>,
    rhs_values: Vec<f64>,
    // coarse product weights at every evaluation point, one row per point
    weights: DenseMatrix,
    evaluator: OperatorEvaluator,
}

/// Sorted union of several point sets with exact duplicates removed.
pub(crate) fn merge_points(sets: &[&[f64]]) -> Vec<f64> {
    let mut all: Vec<f64> = sets.iter().flat_map(|s| s.iter().copied()).collect();
    all.sort_by(f64::total_cmp);
    all.dedup();
    all
}

pub(crate) fn locate(points: &[f64], targets: &[f64]) -> Vec<usize> {
    targets
        .iter()
        .map(|t| {
            points
                .binary_search_by(|p| p.total_cmp(t))
                .expect("target belongs to the merged point set")
        })
        .collect()
}

pub(crate) fn sample_grid(problem: &HammersteinProblem, count: usize) -> Result<Grid> {
    let (a, b) = problem.domain();
    Grid::new(a, b, count - 1)
}

pub(crate) fn check_grid(problem: &HammersteinProblem, grid: &Grid) -> Result<()> {
    if (grid.a(), grid.b()) != problem.domain() {
        return Err(Error::Domain(format!(
            "grid spans [{}, {}] but the problem is posed on {:?}",
            grid.a(),
            grid.b(),
            problem.domain()
        )));
    }
    Ok(())
}

impl LdState {
    pub fn init(
        problem: &HammersteinProblem,
        grid: &Grid,
        phi0: &InitialGuess,
        settings: &LdSettings,
    ) -> Result<Self> {
        settings.validate()?;
        check_grid(problem, grid)?;
        let evaluator = OperatorEvaluator::new(problem, settings.quad)?;
        let samples = sample_grid(problem, settings.sample_count)?;
        let points = merge_points(&[grid.nodes(), evaluator.fine_nodes(), samples.nodes()]);
        let node_index = locate(&points, grid.nodes());
        let sample_index = locate(&points, samples.nodes());

        let rhs_values: Vec<f64> = points.iter().map(|&s| problem.rhs(s)).collect();
        if let Some(i) = rhs_values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("y({}) is not finite", points[i])));
        }
        let values: Vec<f64> = match phi0 {
            InitialGuess::Rhs => rhs_values.clone(),
            InitialGuess::Function(f) => points.iter().map(|&s| f(s)).collect(),
            InitialGuess::Sampled(f) => points.iter().map(|&s| f.eval(s)).collect(),
        };

        let n1 = grid.n() + 1;
        let mut weights = DenseMatrix::zeros(points.len(), n1);
        for (i, &s) in points.iter().enumerate() {
            weights
                .row_mut(i)
                .copy_from_slice(&product_weights(grid, problem.singular(), s).w);
        }

        let iterate = SampledFunction::new(points, values)?;
        let nodal = node_index.iter().map(|&i| iterate.values()[i]).collect();
        Ok(LdState {
            grid: grid.clone(),
            iterate,
            nodal,
            k: 0,
            node_index,
            sample_index,
            rhs_values,
            weights,
            evaluator,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn iterate(&self) -> &SampledFunction {
        &self.iterate
    }

    /// Iterate values at the grid nodes.
    pub fn nodal(&self) -> &[f64] {
        &self.nodal
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// The frozen evaluation point set.
    pub fn eval_points(&self) -> &[f64] {
        self.iterate.points()
    }

    /// `max_i |x[i] - K(φ)(t_i) - y(t_i)|` for the current iterate.
    pub fn nodal_residual(&self, problem: &HammersteinProblem) -> f64 {
        let kv = self.evaluator.eval_many(problem, &self.iterate, self.grid.nodes());
        self.node_index
            .iter()
            .zip(&kv)
            .zip(&self.nodal)
            .map(|((&p, k), x)| (x - k - self.rhs_values[p]).abs())
            .fold(0.0, max_nan)
    }

    /// Sup error over the output samples, if `exact` is known.
    pub fn sample_error(&self, exact: Option<&Fn1>) -> Option<f64> {
        let exact = exact?;
        let pts = self.iterate.points();
        let vals = self.iterate.values();
        Some(
            self.sample_index
                .iter()
                .map(|&i| (vals[i] - exact(pts[i])).abs())
                .fold(0.0, max_nan),
        )
    }

    /// Performs one Newton step and returns the nodal step norm `‖x_{k+1} - x_k‖∞`.
    pub fn step(&mut self, problem: &HammersteinProblem) -> Result<f64> {
        let nodes = self.grid.nodes();
        let n1 = nodes.len();
        let nl = problem.nonlinearity();
        let x_old = self.nodal.clone();
        let slope: Vec<f64> = nodes.iter().zip(&x_old).map(|(&t, &x)| nl.df(t, x)).collect();

        let points = self.iterate.points().to_vec();
        let k_values = self.evaluator.eval_many(problem, &self.iterate, &points);

        let mut system = DenseMatrix::identity(n1);
        let mut rhs = vec![0.0; n1];
        for (i, &pi) in self.node_index.iter().enumerate() {
            let ti = nodes[i];
            let w = self.weights.row(pi);
            let mut ax = 0.0;
            for j in 0..n1 {
                let aij = w[j] * problem.smooth(ti, nodes[j]) * slope[j];
                system[(i, j)] -= aij;
                ax += aij * x_old[j];
            }
            rhs[i] = k_values[pi] + self.rhs_values[pi] - ax;
        }
        let x_new = solve_dense(&system, &rhs)?;
        let delta: Vec<f64> = x_new.iter().zip(&x_old).map(|(a, b)| a - b).collect();
        let scaled: Vec<f64> = delta.iter().zip(&slope).map(|(d, f)| d * f).collect();

        let values = self.iterate.values_mut();
        for (p, &s) in points.iter().enumerate() {
            let w = self.weights.row(p);
            let mut corr = 0.0;
            for j in 0..n1 {
                corr += w[j] * problem.smooth(s, nodes[j]) * scaled[j];
            }
            values[p] = corr + k_values[p] + self.rhs_values[p];
        }
        self.nodal = self.node_index.iter().map(|&i| self.iterate.values()[i]).collect();
        self.k += 1;
        let step: Vec<f64> = self.nodal.iter().zip(&x_old).map(|(a, b)| a - b).collect();
        Ok(norm_inf(&step))
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub function: SampledFunction,
    pub report: SolveReport,
}

/// Iterates [`LdState::step`] from `φ_0 = y` until the nodal step is at most `tol`
/// or `max_iter` steps were taken.
pub fn solve(problem: &HammersteinProblem, grid: &Grid, settings: &LdSettings) -> Result<Solution> {
    solve_from(problem, grid, &InitialGuess::Rhs, settings)
}

/// Like [`solve`] with an explicit starting iterate.
///
/// A numerically singular linear system ends the iteration with
/// [`Status::Singular`]; the report up to that point is kept.
pub fn solve_from(
    problem: &HammersteinProblem,
    grid: &Grid,
    phi0: &InitialGuess,
    settings: &LdSettings,
) -> Result<Solution> {
    let clock = Instant::now();
    let mut state = LdState::init(problem, grid, phi0, settings)?;
    let mut report = SolveReport::new(Method::LinearizeDiscretize, grid.n());
    report.n_fine = Some(settings.quad.n_fine);
    report.mode = Some(settings.quad.mode);
    report.push(IterationRecord {
        k: 0,
        step_norm: None,
        residual_norm: Some(state.nodal_residual(problem)),
        true_error: state.sample_error(problem.exact()),
        wall_ms: Some(clock.elapsed().as_secs_f64() * 1e3),
    });
    while state.k < settings.max_iter {
        let clock = Instant::now();
        let step = match state.step(problem) {
            Ok(s) => s,
            Err(Error::Singular { .. }) => {
                report.status = Status::Singular;
                break;
            }
            Err(e) => return Err(e),
        };
        report.push(IterationRecord {
            k: state.k,
            step_norm: Some(step),
            residual_norm: Some(state.nodal_residual(problem)),
            true_error: state.sample_error(problem.exact()),
            wall_ms: Some(clock.elapsed().as_secs_f64() * 1e3),
        });
        if step <= settings.tol {
            report.status = Status::Converged;
            break;
        }
        if !step.is_finite() {
            // diverged; reported as an unconverged run
            break;
        }
    }
    Ok(Solution { function: state.iterate, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::SingularKernel;
    use crate::nonlinearity::Nonlinearity;
    use crate::problem::constant_solution_example;

    fn small_quad() -> LdSettings {
        LdSettings {
            quad: QuadratureConfig { n_fine: 256, ..Default::default() },
            sample_count: 21,
            ..Default::default()
        }
    }

    #[test]
    fn constant_solution_example_starts_at_solution() {
        let p = constant_solution_example();
        let g = Grid::new(0.0, 1.0, 10).unwrap();
        let mut st = LdState::init(&p, &g, &InitialGuess::Rhs, &small_quad()).unwrap();
        assert!(st.iterate().values().iter().all(|&v| v == 1.0));
        let step = st.step(&p).unwrap();
        assert!(step < 1e-14);
        assert!(st.nodal().iter().all(|v| (v - 1.0).abs() < 1e-14));
    }

    #[test]
    fn zero_initial_guess() {
        let p = constant_solution_example();
        let g = Grid::new(0.0, 1.0, 5).unwrap();
        let st = LdState::init(&p, &g, &InitialGuess::function(|_| 0.0), &small_quad()).unwrap();
        assert!(st.nodal().iter().all(|&v| v == 0.0));
        assert_eq!(st.k(), 0);
    }

    #[test]
    fn zero_nonlinearity_gives_rhs_in_one_step() {
        let p = HammersteinProblem::new(
            (0.0, 1.0),
            SingularKernel::Logarithmic,
            |_, _| 1.0,
            Nonlinearity::Zero,
            |s: f64| s.sin(),
        )
        .unwrap()
        .with_exact(f64::sin);
        let g = Grid::new(0.0, 1.0, 6).unwrap();
        let mut st = LdState::init(&p, &g, &InitialGuess::function(|s| 3.0 * s), &small_quad()).unwrap();
        st.step(&p).unwrap();
        assert_eq!(st.sample_error(p.exact()), Some(0.0));

        let sol = solve(&p, &g, &small_quad()).unwrap();
        assert_eq!(sol.report.status, Status::Converged);
        assert_eq!(sol.report.iterations(), 1);
        assert_eq!(sol.report.final_error(), Some(0.0));
    }

    #[test]
    fn nodal_matches_iterate_at_nodes() {
        let p = constant_solution_example();
        let g = Grid::new(0.0, 1.0, 7).unwrap();
        let mut st = LdState::init(&p, &g, &InitialGuess::function(|s| 0.9 + 0.1 * s), &small_quad()).unwrap();
        st.step(&p).unwrap();
        for (j, &t) in g.nodes().iter().enumerate() {
            assert_eq!(st.iterate().eval(t), st.nodal()[j]);
        }
    }

    #[test]
    fn grid_must_span_problem_domain() {
        let p = constant_solution_example();
        let g = Grid::new(0.0, 2.0, 4).unwrap();
        assert!(LdState::init(&p, &g, &InitialGuess::Rhs, &small_quad()).is_err());
    }

    #[test]
    fn rejects_invalid_settings() {
        let p = constant_solution_example();
        let g = Grid::new(0.0, 1.0, 4).unwrap();
        let bad = LdSettings { tol: 0.0, ..small_quad() };
        assert!(solve(&p, &g, &bad).is_err());
        let bad = LdSettings { max_iter: 0, ..small_quad() };
        assert!(solve(&p, &g, &bad).is_err());
    }

    #[test]
    fn singular_system_is_reported_in_status() {
        // H = L = 1, F = u on one panel: A = [[.5, .5], [.5, .5]], so I - A is singular.
        let p = HammersteinProblem::new(
            (0.0, 1.0),
            SingularKernel::constant_one(),
            |_, _| 1.0,
            Nonlinearity::Identity,
            |_| 1.0,
        )
        .unwrap();
        let g = Grid::new(0.0, 1.0, 1).unwrap();
        let sol = solve(&p, &g, &small_quad()).unwrap();
        assert_eq!(sol.report.status, Status::Singular);
        assert_eq!(sol.report.records.len(), 1);
    }
}
