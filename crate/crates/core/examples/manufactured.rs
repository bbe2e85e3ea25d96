//! Building a test problem from a chosen solution. The right-hand side is
//! `y = φ - K(φ)` with `K(φ)` from the adaptive reference quadrature.

use std::sync::Arc;

use hammerstein::{make_grid, manufactured_problem, newton_ld, LdSettings, Nonlinearity, SingularKernel};

fn main() -> hammerstein::Result<()> {
    let problem = manufactured_problem(
        (0.0, 1.0),
        SingularKernel::Logarithmic,
        Arc::new(|s: f64, t: f64| 0.2 * (s * t).exp()),
        Nonlinearity::Cubic,
        Arc::new(|s: f64| 0.5 + 0.5 * s * s),
        1e-13,
    )?;
    for s in [0.0, 0.25, 0.5, 1.0] {
        println!("y({s}) = {:.15}", problem.rhs(s));
    }
    let grid = make_grid(0.0, 1.0, 20)?;
    let sol = newton_ld::solve(&problem, &grid, &LdSettings::default())?;
    println!("status {:?}, final error {:.3e}", sol.report.status, sol.report.final_error().unwrap_or(f64::NAN));
    Ok(())
}
