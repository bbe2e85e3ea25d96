//! Runs the comparison experiment from a JSON config and writes CSV output.
//!
//! ```text
//! cargo run --example run_config -- examples/configs/manufactured.json /tmp/out
//! ```

use std::path::PathBuf;

use hammerstein::experiment::{run_compare, validate_config};

fn main() -> hammerstein::Result<()> {
    let mut args = std::env::args().skip(1);
    let config = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/configs/constant_solution_example.json"));
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("hammerstein-example"));
    let cfg = validate_config(&config)?;
    let output = run_compare(&cfg, Some(&out))?;
    for f in &output.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}
