use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hammerstein::experiment::{self, validate_config, ExperimentOutput, RunConfig};
use hammerstein::report::format_float;
use hammerstein::{make_grid, product_weights, Error, SingularKernel};

#[derive(Parser)]
#[command(version, about = "Newton/product-integration solvers for weakly singular Hammerstein equations")]
struct Cli {
    /// Output directory (overrides `out` in the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the solver(s) selected in the config.
    Solve {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run both methods on the same problem and grid.
    Compare {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the linearize-discretize solver for several grid sizes.
    Nsweep {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated ascending grid sizes; defaults to the config's `n_list`.
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<usize>>,
    },
    /// Print product-integration weights at one point.
    Weights {
        #[arg(long, value_enum, default_value = "log")]
        kernel: KernelArg,
        #[arg(long, default_value_t = 0.5)]
        beta: f64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = 0.0)]
        a: f64,
        #[arg(long, default_value_t = 1.0)]
        b: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelArg {
    Log,
    Algebraic,
    SmoothOne,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config { .. } | Error::Domain(_) => 2,
        _ => 3,
    }
}

fn print_summary(output: &ExperimentOutput) {
    for rep in &output.reports {
        let err = rep
            .final_error()
            .map_or_else(|| "n/a".to_string(), |e| format!("{e:.3e}"));
        eprintln!(
            "{} n={} iterations={} status={} final_error={}",
            rep.method.tag(),
            rep.n,
            rep.iterations(),
            rep.status.as_str(),
            err
        );
    }
    for f in &output.files {
        eprintln!("wrote {}", f.display());
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    let output = match cli.command {
        Command::Weights { kernel, beta, n, s, a, b } => {
            let grid = make_grid(a, b, n)?;
            if !(a..=b).contains(&s) {
                return Err(Error::Domain(format!("s = {s} lies outside [{a}, {b}]")));
            }
            let kernel = match kernel {
                KernelArg::Log => SingularKernel::Logarithmic,
                KernelArg::Algebraic => SingularKernel::algebraic(beta)?,
                KernelArg::SmoothOne => SingularKernel::constant_one(),
            };
            let wv = product_weights(&grid, &kernel, s);
            println!("j,t,w");
            for (j, (t, w)) in grid.nodes().iter().zip(&wv.w).enumerate() {
                println!("{j},{},{}", format_float(*t), format_float(*w));
            }
            return Ok(ExitCode::SUCCESS);
        }
        Command::Solve { config } => {
            let cfg = validate_config(&config)?;
            experiment::run_solve(&cfg, Some(&out_dir(&cli.out, &cfg)))?
        }
        Command::Compare { config } => {
            let cfg = validate_config(&config)?;
            experiment::run_compare(&cfg, Some(&out_dir(&cli.out, &cfg)))?
        }
        Command::Nsweep { config, n } => {
            let cfg = validate_config(&config)?;
            let list = n.unwrap_or_else(|| cfg.n_list.clone());
            experiment::run_nsweep(&cfg, &list, Some(&out_dir(&cli.out, &cfg)))?
        }
    };
    print_summary(&output);
    Ok(if output.has_fatal() { ExitCode::from(3) } else { ExitCode::SUCCESS })
}

fn out_dir(cli_out: &Option<PathBuf>, cfg: &RunConfig) -> PathBuf {
    cli_out.clone().or_else(|| cfg.out.clone()).unwrap_or_else(|| "out".into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
