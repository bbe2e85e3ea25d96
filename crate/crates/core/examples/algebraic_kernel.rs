//! `|s - t|^(-1/2)` kernel, solved with both operator-evaluation modes.

use std::sync::Arc;

use hammerstein::{
    make_grid, manufactured_problem, newton_ld, LdSettings, Nonlinearity, QuadratureConfig,
    QuadratureMode, SingularKernel,
};

fn main() -> hammerstein::Result<()> {
    let problem = manufactured_problem(
        (0.0, 1.0),
        SingularKernel::algebraic(0.5)?,
        Arc::new(|s: f64, t: f64| 0.1 * (s - t).cos()),
        Nonlinearity::SinPi,
        Arc::new(|s: f64| 0.5 + 0.25 * s),
        1e-13,
    )?;
    let grid = make_grid(0.0, 1.0, 20)?;
    for mode in [QuadratureMode::FineProductRule, QuadratureMode::SingularitySubtraction] {
        let settings = LdSettings {
            quad: QuadratureConfig { mode, ..Default::default() },
            ..Default::default()
        };
        let rep = newton_ld::solve(&problem, &grid, &settings)?.report;
        println!(
            "{:<24} {} iterations, final error {:.3e}",
            mode.as_str(),
            rep.iterations(),
            rep.final_error().unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
