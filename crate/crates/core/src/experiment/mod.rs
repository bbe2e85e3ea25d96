//! Experiment drivers: single solves, the method comparison at one grid size,
//! and the grid-size sweep of the linearize-then-discretize method. Each
//! writes CSV data plus a gnuplot script.

pub mod config;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::newton_dl;
use crate::newton_ld;
use crate::problem::HammersteinProblem;
use crate::report::{format_float, write_reports_csv, SolveReport, Status};

pub use config::{validate_config, RunConfig, SolverSelection};

/// Reports produced by one experiment and the files written for it.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub reports: Vec<SolveReport>,
    pub files: Vec<PathBuf>,
}

impl ExperimentOutput {
    /// True when a solver stopped on a numerically singular system.
    pub fn has_fatal(&self) -> bool {
        self.reports.iter().any(|r| r.status == Status::Singular)
    }
}

fn run_ld(cfg: &RunConfig, problem: &HammersteinProblem, n: usize) -> Result<SolveReport> {
    let grid = Grid::new(cfg.domain.0, cfg.domain.1, n)?;
    Ok(newton_ld::solve_from(problem, &grid, &cfg.initial_guess(), &cfg.ld)?.report)
}

fn run_dl(cfg: &RunConfig, problem: &HammersteinProblem, n: usize) -> Result<SolveReport> {
    let grid = Grid::new(cfg.domain.0, cfg.domain.1, n)?;
    Ok(newton_dl::solve(problem, &grid, &cfg.dl)?.report)
}

/// Runs the solver(s) selected in the configuration.
pub fn run_solve(cfg: &RunConfig, out_dir: Option<&Path>) -> Result<ExperimentOutput> {
    let problem = cfg.build_problem()?;
    let mut reports = Vec::new();
    if matches!(cfg.solver, SolverSelection::Ld | SolverSelection::Both) {
        reports.push(run_ld(cfg, &problem, cfg.n)?);
    }
    if matches!(cfg.solver, SolverSelection::Dl | SolverSelection::Both) && !has_singular(&reports) {
        reports.push(run_dl(cfg, &problem, cfg.n)?);
    }
    let files = match out_dir {
        Some(dir) => write_method_outputs(dir, "solve", cfg, &reports)?,
        None => Vec::new(),
    };
    Ok(ExperimentOutput { reports, files })
}

/// Runs both methods on the same problem and grid.
pub fn run_compare(cfg: &RunConfig, out_dir: Option<&Path>) -> Result<ExperimentOutput> {
    let problem = cfg.build_problem()?;
    let mut reports = vec![run_ld(cfg, &problem, cfg.n)?];
    if !has_singular(&reports) {
        reports.push(run_dl(cfg, &problem, cfg.n)?);
    }
    let files = match out_dir {
        Some(dir) => write_method_outputs(dir, "compare", cfg, &reports)?,
        None => Vec::new(),
    };
    Ok(ExperimentOutput { reports, files })
}

/// Runs the linearize-then-discretize solver once per grid size in `n_list`.
pub fn run_nsweep(cfg: &RunConfig, n_list: &[usize], out_dir: Option<&Path>) -> Result<ExperimentOutput> {
    if n_list.is_empty() {
        return Err(Error::config("n_list", "must not be empty"));
    }
    if n_list[0] == 0 || n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::config("n_list", "must be positive and strictly ascending"));
    }
    let problem = cfg.build_problem()?;
    let mut reports = Vec::new();
    for &n in n_list {
        reports.push(run_ld(cfg, &problem, n)?);
        if has_singular(&reports) {
            break;
        }
    }
    let files = match out_dir {
        Some(dir) => write_sweep_outputs(dir, cfg, &reports)?,
        None => Vec::new(),
    };
    Ok(ExperimentOutput { reports, files })
}

fn has_singular(reports: &[SolveReport]) -> bool {
    reports.iter().any(|r| r.status == Status::Singular)
}

fn write_effective_config(dir: &Path, cfg: &RunConfig) -> Result<PathBuf> {
    let path = dir.join("effective_config.json");
    let text = serde_json::to_string_pretty(&cfg.to_json()).expect("JSON values serialize");
    fs::write(&path, text + "\n")?;
    Ok(path)
}

fn write_method_outputs(dir: &Path, stem: &str, cfg: &RunConfig, reports: &[SolveReport]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let csv_path = dir.join(format!("{stem}.csv"));
    let refs: Vec<&SolveReport> = reports.iter().collect();
    write_reports_csv(fs::File::create(&csv_path)?, &refs, cfg.record_wall_time)?;

    let gp_path = dir.join(format!("{stem}.gp"));
    let mut gp = fs::File::create(&gp_path)?;
    writeln!(gp, "# log10 of the sup-norm error against Newton iteration, n = {}", cfg.n)?;
    writeln!(gp, "set datafile separator ','")?;
    writeln!(gp, "set terminal pngcairo size 900,560")?;
    writeln!(gp, "set output '{stem}.png'")?;
    writeln!(gp, "set xlabel 'iteration k'")?;
    writeln!(gp, "set ylabel 'log10(error)'")?;
    writeln!(gp, "set key top right")?;
    let mut plots = Vec::new();
    for rep in reports {
        let tag = rep.method.tag();
        let title = match tag {
            "ld" => "linearize-discretize",
            _ => "discretize-linearize",
        };
        plots.push(format!(
            "'{stem}.csv' using 2:(strcol(1) eq '{tag}' && strcol(5) ne '' ? log10($5) : 1/0) with linespoints title '{title}'"
        ));
    }
    writeln!(gp, "plot {}", plots.join(", \\\n     "))?;

    let cfg_path = write_effective_config(dir, cfg)?;
    Ok(vec![csv_path, gp_path, cfg_path])
}

fn write_sweep_outputs(dir: &Path, cfg: &RunConfig, reports: &[SolveReport]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let csv_path = dir.join("nsweep.csv");
    let mut w = csv::Writer::from_path(&csv_path)?;
    w.write_record(["n", "k", "true_error"])?;
    for rep in reports {
        for r in &rep.records {
            w.write_record([
                rep.n.to_string(),
                r.k.to_string(),
                r.true_error.map(format_float).unwrap_or_default(),
            ])?;
        }
    }
    w.flush()?;

    let summary_path = dir.join("nsweep_summary.csv");
    let mut w = csv::Writer::from_path(&summary_path)?;
    let eps_col = format!("iterations_to_{:e}", cfg.epsilon);
    w.write_record(["n", eps_col.as_str(), "final_error", "status"])?;
    for rep in reports {
        w.write_record([
            rep.n.to_string(),
            rep.iterations_to(cfg.epsilon).map(|k| k.to_string()).unwrap_or_default(),
            rep.final_error().map(format_float).unwrap_or_default(),
            rep.status.as_str().to_string(),
        ])?;
    }
    w.flush()?;

    let gp_path = dir.join("nsweep.gp");
    let mut gp = fs::File::create(&gp_path)?;
    let ns: Vec<String> = reports.iter().map(|r| r.n.to_string()).collect();
    writeln!(gp, "# log10 of the linearize-discretize error for several grid sizes")?;
    writeln!(gp, "set datafile separator ','")?;
    writeln!(gp, "set terminal pngcairo size 900,560")?;
    writeln!(gp, "set output 'nsweep.png'")?;
    writeln!(gp, "set xlabel 'iteration k'")?;
    writeln!(gp, "set ylabel 'log10(error)'")?;
    writeln!(gp, "NS = \"{}\"", ns.join(" "))?;
    writeln!(
        gp,
        "plot for [n in NS] 'nsweep.csv' using 2:(strcol(1) eq n && strcol(3) ne '' ? log10($3) : 1/0) with linespoints title 'n='.n"
    )?;

    let cfg_path = write_effective_config(dir, cfg)?;
    Ok(vec![csv_path, summary_path, gp_path, cfg_path])
}
