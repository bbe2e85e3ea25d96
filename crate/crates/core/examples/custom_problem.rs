//! A user-supplied nonlinearity and kernel, solved step by step.

use hammerstein::newton_ld::LdState;
use hammerstein::{make_grid, HammersteinProblem, InitialGuess, LdSettings, Nonlinearity, SingularKernel};

fn main() -> hammerstein::Result<()> {
    let nonlin = Nonlinearity::custom(
        "damped_exp",
        |t, u| 0.3 * (-t).exp() * u.exp(),
        |t, u| 0.3 * (-t).exp() * u.exp(),
        |t, u| 0.3 * (-t).exp() * u.exp(),
    );
    let problem = HammersteinProblem::new(
        (-1.0, 1.0),
        SingularKernel::Logarithmic,
        |s, t| 1.0 + 0.5 * s * t,
        nonlin,
        |s| s.sin(),
    )?;
    let grid = make_grid(-1.0, 1.0, 16)?;
    let mut state = LdState::init(&problem, &grid, &InitialGuess::Rhs, &LdSettings::default())?;
    for _ in 0..8 {
        let step = state.step(&problem)?;
        println!(
            "k = {}  step = {step:.3e}  nodal residual = {:.3e}",
            state.k(),
            state.nodal_residual(&problem)
        );
        if step < 1e-12 {
            break;
        }
    }
    println!("phi(0) = {:.12}", state.iterate().eval(0.0));
    Ok(())
}
