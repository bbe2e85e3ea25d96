//! Discretize-then-linearize baseline: the product-integration system
//! `X - A F(X) = Y` solved by finite-dimensional Newton.
//!
//! The limit of these iterates is the discrete solution for the chosen grid,
//! so the attainable accuracy is bounded by the grid size.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::linalg::{max_nan, norm_inf, solve_dense, DenseMatrix};
use crate::newton_ld::{check_grid, merge_points, sample_grid, Solution};
use crate::problem::HammersteinProblem;
use crate::quadrature::product_weights;
use crate::report::{IterationRecord, Method, SolveReport, Status};
use crate::sampled::SampledFunction;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DlSettings {
    pub tol: f64,
    pub max_iter: usize,
    pub sample_count: usize,
}

impl Default for DlSettings {
    fn default() -> Self {
        DlSettings { tol: 1e-12, max_iter: 30, sample_count: 201 }
    }
}

impl DlSettings {
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
        Ok(())
    }
}

/// Returns the matrix `A(i, j) = w_j(t_i) L(t_i, t_j)` and `Y(i) = y(t_i)`.
pub fn assemble(problem: &HammersteinProblem, grid: &Grid) -> Result<(DenseMatrix, Vec<f64>)> {
    check_grid(problem, grid)?;
    let nodes = grid.nodes();
    let n1 = nodes.len();
    let mut a = DenseMatrix::zeros(n1, n1);
    for (i, &ti) in nodes.iter().enumerate() {
        let w = product_weights(grid, problem.singular(), ti).w;
        for (j, &tj) in nodes.iter().enumerate() {
            a[(i, j)] = w[j] * problem.smooth(ti, tj);
        }
    }
    let y: Vec<f64> = nodes.iter().map(|&t| problem.rhs(t)).collect();
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("right-hand side is not finite at a grid node".into()));
    }
    Ok((a, y))
}

#[derive(Debug, Clone)]
pub struct DlState {
    grid: Grid,
    x: Vec<f64>,
    k: usize,
    matrix: DenseMatrix,
    rhs: Vec<f64>,
}

impl DlState {
    /// Assembles the system and starts from `X = Y`.
    pub fn new(problem: &HammersteinProblem, grid: &Grid) -> Result<Self> {
        let (matrix, rhs) = assemble(problem, grid)?;
        Ok(DlState { grid: grid.clone(), x: rhs.clone(), k: 0, matrix, rhs })
    }

    pub fn with_start(mut self, x: Vec<f64>) -> Result<Self> {
        if x.len() != self.x.len() {
            return Err(Error::Domain(format!(
                "start vector has length {}, expected {}",
                x.len(),
                self.x.len()
            )));
        }
        self.x = x;
        Ok(self)
    }

    pub fn nodal(&self) -> &[f64] {
        &self.x
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    fn f_values(&self, problem: &HammersteinProblem) -> Vec<f64> {
        let nl = problem.nonlinearity();
        self.grid.nodes().iter().zip(&self.x).map(|(&t, &x)| nl.f(t, x)).collect()
    }

    /// `X - A F(X) - Y`.
    pub fn residual(&self, problem: &HammersteinProblem) -> Vec<f64> {
        let af = self.matrix.mul_vec(&self.f_values(problem));
        self.x
            .iter()
            .zip(&af)
            .zip(&self.rhs)
            .map(|((x, a), y)| x - a - y)
            .collect()
    }

    /// One Newton step; returns `‖δ‖∞`.
    pub fn step(&mut self, problem: &HammersteinProblem) -> Result<f64> {
        let nl = problem.nonlinearity();
        let n1 = self.x.len();
        let r = self.residual(problem);
        let slope: Vec<f64> = self.grid.nodes().iter().zip(&self.x).map(|(&t, &x)| nl.df(t, x)).collect();
        let mut jac = DenseMatrix::identity(n1);
        for i in 0..n1 {
            for j in 0..n1 {
                jac[(i, j)] -= self.matrix[(i, j)] * slope[j];
            }
        }
        let neg_r: Vec<f64> = r.iter().map(|v| -v).collect();
        let delta = solve_dense(&jac, &neg_r)?;
        for (x, d) in self.x.iter_mut().zip(&delta) {
            *x += d;
        }
        self.k += 1;
        Ok(norm_inf(&delta))
    }

    /// Natural extension `y(s) + Σ_j w_j(s) L(s, t_j) F(t_j, X_j)`.
    pub fn extension(&self, problem: &HammersteinProblem, s: f64) -> f64 {
        let w = product_weights(&self.grid, problem.singular(), s).w;
        self.extension_with(problem, s, &w, problem.rhs(s), &self.f_values(problem))
    }

    fn extension_with(&self, problem: &HammersteinProblem, s: f64, w: &[f64], ys: f64, fv: &[f64]) -> f64 {
        let sum: f64 = w
            .iter()
            .zip(self.grid.nodes())
            .zip(fv)
            .map(|((w, &t), f)| w * problem.smooth(s, t) * f)
            .sum();
        ys + sum
    }
}

/// Output points with their weight rows and right-hand side values.
struct Extension {
    points: Vec<f64>,
    weights: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    exact: Option<Vec<f64>>,
    is_sample: Vec<bool>,
}

impl Extension {
    fn new(problem: &HammersteinProblem, grid: &Grid, sample_count: usize) -> Result<Self> {
        let samples = sample_grid(problem, sample_count)?;
        let points = merge_points(&[grid.nodes(), samples.nodes()]);
        let weights = points
            .iter()
            .map(|&s| product_weights(grid, problem.singular(), s).w)
            .collect();
        let rhs: Vec<f64> = points.iter().map(|&s| problem.rhs(s)).collect();
        if rhs.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("right-hand side is not finite at an output point".into()));
        }
        let exact = problem.exact().map(|e| points.iter().map(|&s| e(s)).collect());
        let is_sample = points
            .iter()
            .map(|p| samples.nodes().binary_search_by(|q| q.total_cmp(p)).is_ok())
            .collect();
        Ok(Extension { points, weights, rhs, exact, is_sample })
    }

    fn values(&self, state: &DlState, problem: &HammersteinProblem) -> Vec<f64> {
        let fv = state.f_values(problem);
        self.points
            .iter()
            .enumerate()
            .map(|(i, &s)| state.extension_with(problem, s, &self.weights[i], self.rhs[i], &fv))
            .collect()
    }

    fn error(&self, values: &[f64]) -> Option<f64> {
        let exact = self.exact.as_ref()?;
        Some(
            values
                .iter()
                .zip(exact)
                .zip(&self.is_sample)
                .filter(|(_, &s)| s)
                .map(|((v, e), _)| (v - e).abs())
                .fold(0.0, max_nan),
        )
    }
}

/// Newton iteration on the discrete system from `X = Y`, stopping on step norm.
/// The returned function is the natural extension sampled on nodes and output points.
pub fn solve(problem: &HammersteinProblem, grid: &Grid, settings: &DlSettings) -> Result<Solution> {
    settings.validate()?;
    let clock = Instant::now();
    let mut state = DlState::new(problem, grid)?;
    let ext = Extension::new(problem, grid, settings.sample_count)?;
    let mut report = SolveReport::new(Method::DiscretizeLinearize, grid.n());
    let mut values = ext.values(&state, problem);
    report.push(IterationRecord {
        k: 0,
        step_norm: None,
        residual_norm: Some(norm_inf(&state.residual(problem))),
        true_error: ext.error(&values),
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
        values = ext.values(&state, problem);
        report.push(IterationRecord {
            k: state.k,
            step_norm: Some(step),
            residual_norm: Some(norm_inf(&state.residual(problem))),
            true_error: ext.error(&values),
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
    let function = SampledFunction::new(ext.points, values)?;
    Ok(Solution { function, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::SingularKernel;
    use crate::nonlinearity::Nonlinearity;
    use crate::problem::constant_solution_example;

    #[test]
    fn trapezoidal_rows_for_constant_kernel() {
        let p = HammersteinProblem::new(
            (0.0, 1.0),
            SingularKernel::constant_one(),
            |_, _| 1.0,
            Nonlinearity::Identity,
            |_| 0.0,
        )
        .unwrap();
        let (a, _) = assemble(&p, &Grid::new(0.0, 1.0, 2).unwrap()).unwrap();
        for i in 0..3 {
            assert_eq!(a.row(i), &[0.25, 0.5, 0.25]);
        }
    }

    #[test]
    fn zero_smooth_kernel_gives_zero_matrix() {
        let p = HammersteinProblem::new(
            (0.0, 1.0),
            SingularKernel::Logarithmic,
            |_, _| 0.0,
            Nonlinearity::SinPi,
            |_| 1.0,
        )
        .unwrap();
        let (a, _) = assemble(&p, &Grid::new(0.0, 1.0, 5).unwrap()).unwrap();
        assert!(a.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn row_sums_equal_moment0() {
        let p = constant_solution_example();
        let g = Grid::new(0.0, 1.0, 50).unwrap();
        let (a, _) = assemble(&p, &g).unwrap();
        for (i, &t) in g.nodes().iter().enumerate() {
            let m0 = SingularKernel::Logarithmic.moment0(t, 0.0, 1.0);
            let sum: f64 = a.row(i).iter().sum();
            assert!((sum - m0).abs() <= 1e-12 * m0.abs(), "row {i}");
        }
    }

    #[test]
    fn constant_solution_example_is_a_fixed_point() {
        let p = constant_solution_example();
        let g = Grid::new(0.0, 1.0, 50).unwrap();
        let mut st = DlState::new(&p, &g).unwrap();
        assert!(norm_inf(&st.residual(&p)) < 1e-14);
        let d = st.step(&p).unwrap();
        assert!(d < 1e-14);
    }

    #[test]
    fn zero_nonlinearity_converges_to_rhs() {
        let p = HammersteinProblem::new(
            (0.0, 1.0),
            SingularKernel::Logarithmic,
            |_, _| 1.0,
            Nonlinearity::Zero,
            |s: f64| s.cos(),
        )
        .unwrap();
        let g = Grid::new(0.0, 1.0, 8).unwrap();
        let st = DlState::new(&p, &g).unwrap().with_start(vec![5.0; 9]).unwrap();
        let mut st = st;
        st.step(&p).unwrap();
        for (x, &t) in st.nodal().iter().zip(g.nodes()) {
            assert!((x - t.cos()).abs() < 1e-15);
        }
    }

    #[test]
    fn extension_interpolates_nodes_at_convergence() {
        let p = constant_solution_example();
        let g = Grid::new(0.0, 1.0, 10).unwrap();
        let st = DlState::new(&p, &g).unwrap();
        for &t in g.nodes() {
            assert!((st.extension(&p, t) - 1.0).abs() < 1e-14);
        }
    }
}
