//! JSON run configuration.
//!
//! A minimal file needs only the problem data and the grid size:
//!
//! ```json
//! {"kernel": "log", "L": "one", "F": "sin_pi", "y": 1, "n": 50}
//! ```
//!
//! Every other field has a default; unknown fields are rejected.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::kernel::SingularKernel;
use crate::newton_dl::DlSettings;
use crate::newton_ld::{InitialGuess, LdSettings};
use crate::nonlinearity::{derivative_mismatch, Nonlinearity, REGISTRY};
use crate::problem::{
    function_by_name, manufactured_problem, smooth_kernel_by_name, Fn1, HammersteinProblem,
    FUNCTIONS, SMOOTH_KERNELS,
};
use crate::quadrature::{QuadratureConfig, QuadratureMode};

pub const SCHEMA_VERSION: u32 = 1;
pub const SEED_ENV: &str = "HAMMERSTEIN_SEED";

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    schema: Option<u32>,
    kernel: String,
    beta: Option<f64>,
    #[serde(rename = "L")]
    smooth: String,
    #[serde(rename = "F")]
    nonlin: Value,
    y: Value,
    exact: Option<Value>,
    domain: Option<[f64; 2]>,
    n: usize,
    solver: Option<String>,
    tol: Option<f64>,
    max_iter: Option<usize>,
    n_fine: Option<usize>,
    mode: Option<String>,
    gl_points: Option<usize>,
    sample_count: Option<usize>,
    phi0: Option<Value>,
    quad_tol: Option<f64>,
    epsilon: Option<f64>,
    n_list: Option<Vec<usize>>,
    seed: Option<u64>,
    record_wall_time: Option<bool>,
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum KernelChoice {
    Log,
    Algebraic { beta: f64 },
    /// `H ≡ 1`
    SmoothOne,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RhsChoice {
    Constant(f64),
    Named(String),
    /// `y = φ - K(φ)` for the named `φ`.
    Manufactured(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionChoice {
    Constant(f64),
    Named(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverSelection {
    Ld,
    Dl,
    Both,
}

/// A fully validated run configuration with defaults filled in.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub schema: u32,
    pub kernel: KernelChoice,
    pub smooth: String,
    pub nonlinearity: Nonlinearity,
    pub rhs: RhsChoice,
    pub exact: Option<FunctionChoice>,
    pub domain: (f64, f64),
    pub n: usize,
    pub solver: SolverSelection,
    pub ld: LdSettings,
    pub dl: DlSettings,
    /// `None` starts from `y`.
    pub phi0: Option<FunctionChoice>,
    pub quad_tol: f64,
    pub epsilon: f64,
    pub n_list: Vec<usize>,
    pub seed: u64,
    pub record_wall_time: bool,
    pub out: Option<PathBuf>,
}

fn positive(path: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::config(path, format!("must be a positive finite number, got {v}")))
    }
}

fn function_choice(path: &str, v: &Value) -> Result<FunctionChoice> {
    match v {
        Value::Number(x) => Ok(FunctionChoice::Constant(x.as_f64().unwrap_or(f64::NAN))),
        Value::String(name) if function_by_name(name).is_some() => Ok(FunctionChoice::Named(name.clone())),
        Value::String(name) => Err(Error::config(
            path,
            format!("unknown function `{name}` (known: {})", FUNCTIONS.join(", ")),
        )),
        other => Err(Error::config(path, format!("expected a number or function name, got {other}"))),
    }
}

impl FunctionChoice {
    pub fn to_fn(&self) -> Fn1 {
        match self {
            FunctionChoice::Constant(c) => {
                let c = *c;
                Arc::new(move |_| c)
            }
            FunctionChoice::Named(n) => function_by_name(n).expect("validated name"),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            FunctionChoice::Constant(c) => json!(c),
            FunctionChoice::Named(n) => json!(n),
        }
    }
}

fn parse_nonlinearity(v: &Value) -> Result<Nonlinearity> {
    match v {
        Value::String(name) => Nonlinearity::from_name(name).map_err(|_| {
            Error::config("F", format!("unknown nonlinearity `{name}` (known: {})", REGISTRY.join(", ")))
        }),
        Value::Object(map) if map.len() == 1 && map.contains_key("polynomial") => {
            let coeffs = map["polynomial"]
                .as_array()
                .ok_or_else(|| Error::config("F.polynomial", "expected an array of coefficients"))?;
            let mut out = Vec::with_capacity(coeffs.len());
            for (i, c) in coeffs.iter().enumerate() {
                let x = c
                    .as_f64()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| Error::config(format!("F.polynomial[{i}]"), "expected a finite number"))?;
                out.push(x);
            }
            if out.is_empty() {
                return Err(Error::config("F.polynomial", "needs at least one coefficient"));
            }
            Ok(Nonlinearity::Polynomial(out))
        }
        other => Err(Error::config("F", format!("expected a registry name or {{\"polynomial\": [...]}}, got {other}"))),
    }
}

fn parse_rhs(v: &Value) -> Result<RhsChoice> {
    match v {
        Value::Object(map) if map.len() == 1 && map.contains_key("manufactured") => {
            match function_choice("y.manufactured", &map["manufactured"])? {
                FunctionChoice::Named(n) => Ok(RhsChoice::Manufactured(n)),
                FunctionChoice::Constant(c) => Err(Error::config(
                    "y.manufactured",
                    format!("expected a function name, got {c}"),
                )),
            }
        }
        other => match function_choice("y", other)? {
            FunctionChoice::Constant(c) if !c.is_finite() => Err(Error::config("y", "must be finite")),
            FunctionChoice::Constant(c) => Ok(RhsChoice::Constant(c)),
            FunctionChoice::Named(n) => Ok(RhsChoice::Named(n)),
        },
    }
}

impl RunConfig {
    /// Parses and validates a JSON document. `seed_override` replaces the configured seed.
    pub fn from_json_str(text: &str, seed_override: Option<u64>) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(if path == "." { "<root>".to_string() } else { path }, e.inner().to_string())
        })?;

        let schema = raw.schema.unwrap_or(SCHEMA_VERSION);
        if schema != SCHEMA_VERSION {
            return Err(Error::config("schema", format!("unsupported schema version {schema}, expected {SCHEMA_VERSION}")));
        }

        let kernel = match raw.kernel.as_str() {
            "log" => KernelChoice::Log,
            "algebraic" => {
                let beta = raw.beta.ok_or_else(|| Error::config("beta", "required for the algebraic kernel"))?;
                if !(beta > 0.0 && beta < 1.0) {
                    return Err(Error::config("beta", format!("must lie in (0, 1), got {beta}")));
                }
                KernelChoice::Algebraic { beta }
            }
            "smooth_one" => KernelChoice::SmoothOne,
            other => {
                return Err(Error::config(
                    "kernel",
                    format!("unknown kernel `{other}` (known: log, algebraic, smooth_one)"),
                ))
            }
        };
        if raw.beta.is_some() && !matches!(kernel, KernelChoice::Algebraic { .. }) {
            return Err(Error::config("beta", "only meaningful for the algebraic kernel"));
        }

        if smooth_kernel_by_name(&raw.smooth).is_none() {
            return Err(Error::config(
                "L",
                format!("unknown kernel factor `{}` (known: {})", raw.smooth, SMOOTH_KERNELS.join(", ")),
            ));
        }
        let nonlinearity = parse_nonlinearity(&raw.nonlin)?;
        let rhs = parse_rhs(&raw.y)?;
        let exact = raw.exact.as_ref().map(|v| function_choice("exact", v)).transpose()?;
        if matches!(rhs, RhsChoice::Manufactured(_)) && exact.is_some() {
            return Err(Error::config("exact", "a manufactured right-hand side fixes the exact solution"));
        }

        let domain = match raw.domain {
            Some([a, b]) if a.is_finite() && b.is_finite() && a < b => (a, b),
            Some([a, b]) => return Err(Error::config("domain", format!("need finite a < b, got [{a}, {b}]"))),
            None => (0.0, 1.0),
        };
        if raw.n == 0 {
            return Err(Error::config("n", "must be at least 1"));
        }
        let solver = match raw.solver.as_deref().unwrap_or("both") {
            "ld" => SolverSelection::Ld,
            "dl" => SolverSelection::Dl,
            "both" => SolverSelection::Both,
            other => return Err(Error::config("solver", format!("expected ld, dl or both, got `{other}`"))),
        };
        let tol = positive("tol", raw.tol.unwrap_or(1e-12))?;
        let max_iter = raw.max_iter.unwrap_or(30);
        if max_iter == 0 {
            return Err(Error::config("max_iter", "must be at least 1"));
        }
        let n_fine = raw.n_fine.unwrap_or(4096);
        if n_fine < 2 {
            return Err(Error::config("n_fine", "must be at least 2"));
        }
        let mode = match raw.mode.as_deref().unwrap_or("fine_product_rule") {
            "fine_product_rule" => QuadratureMode::FineProductRule,
            "singularity_subtraction" => QuadratureMode::SingularitySubtraction,
            other => {
                return Err(Error::config(
                    "mode",
                    format!("expected fine_product_rule or singularity_subtraction, got `{other}`"),
                ))
            }
        };
        let gl_points = raw.gl_points.unwrap_or(16);
        if gl_points < 2 {
            return Err(Error::config("gl_points", "must be at least 2"));
        }
        let sample_count = raw.sample_count.unwrap_or(201);
        if sample_count < 2 {
            return Err(Error::config("sample_count", "must be at least 2"));
        }
        let phi0 = match &raw.phi0 {
            None => None,
            Some(Value::String(s)) if s == "y" => None,
            Some(v) => Some(function_choice("phi0", v)?),
        };
        let quad_tol = positive("quad_tol", raw.quad_tol.unwrap_or(1e-12))?;
        let epsilon = positive("epsilon", raw.epsilon.unwrap_or(1e-6))?;
        let n_list = raw.n_list.unwrap_or_else(|| vec![raw.n]);
        if n_list.is_empty() {
            return Err(Error::config("n_list", "must not be empty"));
        }
        for (i, w) in n_list.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(Error::config(format!("n_list[{}]", i + 1), "must be strictly ascending"));
            }
        }
        if n_list[0] == 0 {
            return Err(Error::config("n_list[0]", "must be at least 1"));
        }
        let seed = seed_override.or(raw.seed).unwrap_or(0);

        let cfg = RunConfig {
            schema,
            kernel,
            smooth: raw.smooth,
            nonlinearity,
            rhs,
            exact,
            domain,
            n: raw.n,
            solver,
            ld: LdSettings {
                tol,
                max_iter,
                quad: QuadratureConfig { n_fine, mode, gl_points },
                sample_count,
            },
            dl: DlSettings { tol, max_iter, sample_count },
            phi0,
            quad_tol,
            epsilon,
            n_list,
            seed,
            record_wall_time: raw.record_wall_time.unwrap_or(false),
            out: raw.out,
        };
        cfg.check_derivatives()?;
        Ok(cfg)
    }

    /// Checks the nonlinearity's derivatives against centered differences at
    /// points drawn from the configured seed.
    fn check_derivatives(&self) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let (a, b) = self.domain;
        for _ in 0..32 {
            let t = rng.gen_range(a..=b);
            let u = rng.gen_range(-2.0..=2.0);
            let m = derivative_mismatch(&self.nonlinearity, t, u, 1e-5);
            if !(m < 1e-6) {
                return Err(Error::config(
                    "F",
                    format!("derivative check failed at (t, u) = ({t}, {u}): relative mismatch {m:e}"),
                ));
            }
        }
        Ok(())
    }

    pub fn singular_kernel(&self) -> SingularKernel {
        match self.kernel {
            KernelChoice::Log => SingularKernel::Logarithmic,
            KernelChoice::Algebraic { beta } => SingularKernel::AlgebraicPower { beta },
            KernelChoice::SmoothOne => SingularKernel::constant_one(),
        }
    }

    pub fn initial_guess(&self) -> InitialGuess {
        match &self.phi0 {
            None => InitialGuess::Rhs,
            Some(f) => InitialGuess::Function(f.to_fn()),
        }
    }

    /// Builds the problem instance described by this configuration.
    pub fn build_problem(&self) -> Result<HammersteinProblem> {
        let smooth = smooth_kernel_by_name(&self.smooth).expect("validated name");
        match &self.rhs {
            RhsChoice::Manufactured(name) => manufactured_problem(
                self.domain,
                self.singular_kernel(),
                smooth,
                self.nonlinearity.clone(),
                function_by_name(name).expect("validated name"),
                self.quad_tol,
            ),
            RhsChoice::Constant(_) | RhsChoice::Named(_) => {
                let rhs = match &self.rhs {
                    RhsChoice::Constant(c) => FunctionChoice::Constant(*c).to_fn(),
                    RhsChoice::Named(n) => function_by_name(n).expect("validated name"),
                    RhsChoice::Manufactured(_) => unreachable!(),
                };
                let p = HammersteinProblem::from_parts(
                    self.domain,
                    self.singular_kernel(),
                    smooth,
                    self.nonlinearity.clone(),
                    rhs,
                )?;
                Ok(match &self.exact {
                    Some(e) => p.with_exact_fn(e.to_fn()),
                    None => p,
                })
            }
        }
    }

    /// The effective configuration, defaults included, as JSON.
    pub fn to_json(&self) -> Value {
        let kernel = match self.kernel {
            KernelChoice::Log => json!({"kernel": "log"}),
            KernelChoice::Algebraic { beta } => json!({"kernel": "algebraic", "beta": beta}),
            KernelChoice::SmoothOne => json!({"kernel": "smooth_one"}),
        };
        let nonlin = match &self.nonlinearity {
            Nonlinearity::Polynomial(c) => json!({"polynomial": c}),
            other => json!(other.name()),
        };
        let y = match &self.rhs {
            RhsChoice::Constant(c) => json!(c),
            RhsChoice::Named(n) => json!(n),
            RhsChoice::Manufactured(n) => json!({"manufactured": n}),
        };
        let mut v = json!({
            "schema": self.schema,
            "L": self.smooth,
            "F": nonlin,
            "y": y,
            "domain": [self.domain.0, self.domain.1],
            "n": self.n,
            "solver": match self.solver {
                SolverSelection::Ld => "ld",
                SolverSelection::Dl => "dl",
                SolverSelection::Both => "both",
            },
            "tol": self.ld.tol,
            "max_iter": self.ld.max_iter,
            "n_fine": self.ld.quad.n_fine,
            "mode": self.ld.quad.mode.as_str(),
            "gl_points": self.ld.quad.gl_points,
            "sample_count": self.ld.sample_count,
            "phi0": self.phi0.as_ref().map_or(json!("y"), FunctionChoice::to_json),
            "quad_tol": self.quad_tol,
            "epsilon": self.epsilon,
            "n_list": self.n_list,
            "seed": self.seed,
            "record_wall_time": self.record_wall_time,
        });
        let obj = v.as_object_mut().expect("object literal");
        obj.extend(kernel.as_object().expect("object literal").clone());
        if let Some(e) = &self.exact {
            obj.insert("exact".into(), e.to_json());
        }
        if let Some(out) = &self.out {
            obj.insert("out".into(), json!(out));
        }
        v
    }
}

/// Reads, parses and validates a config file, honoring `HAMMERSTEIN_SEED`.
pub fn validate_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config("<file>", format!("cannot read {}: {e}", path.display())))?;
    let seed = match std::env::var(SEED_ENV) {
        Ok(s) => Some(
            s.trim()
                .parse::<u64>()
                .map_err(|e| Error::config(SEED_ENV, format!("invalid seed `{s}`: {e}")))?,
        ),
        Err(_) => None,
    };
    RunConfig::from_json_str(&text, seed)
}
