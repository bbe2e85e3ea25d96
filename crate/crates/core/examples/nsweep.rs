//! Linearize-discretize on grids of several sizes: the terminal error is the
//! same for all of them, only the iteration count changes.

use hammerstein::problem::manufactured_cos_square;
use hammerstein::{make_grid, newton_ld, LdSettings};

fn main() -> hammerstein::Result<()> {
    let problem = manufactured_cos_square(1e-13)?;
    let settings = LdSettings::default();
    for n in [5, 10, 25, 50] {
        let grid = make_grid(0.0, 1.0, n)?;
        let rep = newton_ld::solve(&problem, &grid, &settings)?.report;
        println!(
            "n = {n:3}: {:2} iterations, below 1e-6 after {:?}, final error {:.3e}",
            rep.iterations(),
            rep.iterations_to(1e-6),
            rep.final_error().unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
