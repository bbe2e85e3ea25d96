//! Solvers for nonlinear Hammerstein integral equations of the second kind
//! with weakly singular kernels,
//!
//! ```text
//! φ(s) - ∫_a^b H(s, t) L(s, t) F(t, φ(t)) dt = y(s),
//! ```
//!
//! where `H` carries the singularity (`ln|s - t|` or `|s - t|^(-β)`), `L` is
//! continuous and `F` is a smooth nonlinearity.
//!
//! Two methods are provided:
//!
//! * [`newton_ld`]: Newton's method applied to the operator equation, with
//!   each linear step discretized by the product trapezoidal rule. The
//!   iterates approach the true solution as the iteration count grows, for a
//!   fixed coarse grid.
//! * [`newton_dl`]: the classical route, which first discretizes into a
//!   nonlinear system and then applies finite-dimensional Newton. Its accuracy
//!   is capped by the grid.
//!
//! The [`experiment`] module drives both on a configuration file and writes
//! CSV error curves; see the crate's `examples/` directory for runnable
//! walkthroughs.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// golden values in tests keep all the digits they were computed with
#![cfg_attr(test, allow(clippy::excessive_precision))]

pub mod error;
pub mod experiment;
pub mod grid;
pub mod kernel;
pub mod linalg;
pub mod newton_dl;
pub mod newton_ld;
pub mod nonlinearity;
pub mod problem;
pub mod quadrature;
pub mod report;
pub mod sampled;

pub use error::{Error, Result};
pub use grid::{make_grid, Grid};
pub use kernel::SingularKernel;
pub use linalg::{solve_dense, DenseMatrix};
pub use newton_dl::DlSettings;
pub use newton_ld::{InitialGuess, LdSettings, Solution};
pub use nonlinearity::Nonlinearity;
pub use problem::{manufactured_problem, constant_solution_example, HammersteinProblem};
pub use quadrature::{
    eval_operator, eval_operator_reference, product_weights, QuadratureConfig, QuadratureMode,
    WeightVector,
};
pub use report::{Method, SolveReport, Status};
pub use sampled::SampledFunction;
