//! Product-integration weights for the three kernel families.

use hammerstein::{make_grid, product_weights, SingularKernel};

fn main() -> hammerstein::Result<()> {
    let grid = make_grid(0.0, 1.0, 8)?;
    let s = 0.5;
    let kernels = [
        ("ln|s-t|", SingularKernel::Logarithmic),
        ("|s-t|^-0.5", SingularKernel::algebraic(0.5)?),
        ("1", SingularKernel::constant_one()),
    ];
    for (label, kernel) in &kernels {
        let wv = product_weights(&grid, kernel, s);
        let sum: f64 = wv.w.iter().sum();
        println!("H = {label}, s = {s}");
        for (t, w) in grid.nodes().iter().zip(&wv.w) {
            println!("  t = {t:.4}  w = {w:+.15e}");
        }
        println!("  sum = {sum:+.15e}  (integral of H: {:+.15e})", kernel.moment0(s, 0.0, 1.0));
    }
    Ok(())
}
