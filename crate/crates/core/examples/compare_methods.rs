//! Error curves of both methods on a manufactured problem (`φ = cos`, `F = u²`).
//!
//! The discretize-linearize error stalls at a level set by `n`; the
//! linearize-discretize error keeps falling until it reaches the
//! quadrature floor.

use hammerstein::problem::manufactured_cos_square;
use hammerstein::{make_grid, newton_dl, newton_ld, DlSettings, LdSettings};

fn main() -> hammerstein::Result<()> {
    let problem = manufactured_cos_square(1e-13)?;
    let grid = make_grid(0.0, 1.0, 50)?;

    let ld = newton_ld::solve(&problem, &grid, &LdSettings::default())?;
    let dl = newton_dl::solve(&problem, &grid, &DlSettings { tol: 1e-300, max_iter: 10, ..Default::default() })?;

    println!("{:>3} {:>12} {:>12}", "k", "LD error", "DL error");
    let rows = ld.report.records.len().max(dl.report.records.len());
    for k in 0..rows {
        let cell = |rep: &hammerstein::SolveReport| {
            rep.records
                .get(k)
                .and_then(|r| r.true_error)
                .map_or_else(|| "".to_string(), |e| format!("{e:.3e}"))
        };
        println!("{k:>3} {:>12} {:>12}", cell(&ld.report), cell(&dl.report));
    }
    Ok(())
}
