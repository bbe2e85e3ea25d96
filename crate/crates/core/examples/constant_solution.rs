//! Log kernel, `F = sin(πu)`, `y = 1`: the exact solution is `φ ≡ 1`.
//! Both solvers should sit on it from the first iterate.

use hammerstein::{make_grid, newton_dl, newton_ld, constant_solution_example, DlSettings, LdSettings};

fn main() -> hammerstein::Result<()> {
    let problem = constant_solution_example();
    let grid = make_grid(0.0, 1.0, 50)?;

    let ld = newton_ld::solve(&problem, &grid, &LdSettings::default())?;
    println!("linearize-discretize, n = 50");
    for r in &ld.report.records {
        println!("  k = {:2}  error = {:.3e}", r.k, r.true_error.unwrap_or(f64::NAN));
    }

    let dl = newton_dl::solve(&problem, &grid, &DlSettings::default())?;
    let last = dl.report.records.last().expect("at least one record");
    println!(
        "discretize-linearize: {} iterations, residual {:.3e}, phi(0.37) = {:.15}",
        dl.report.iterations(),
        last.residual_norm.unwrap_or(f64::NAN),
        dl.function.eval(0.37)
    );
    Ok(())
}
