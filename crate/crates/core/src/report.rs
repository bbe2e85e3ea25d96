//! Per-iteration solve reports and their CSV form.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::quadrature::QuadratureMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Newton on the operator equation, each step discretized by product integration.
    LinearizeDiscretize,
    /// Product-integration system solved by finite-dimensional Newton.
    DiscretizeLinearize,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::LinearizeDiscretize => "ld",
            Method::DiscretizeLinearize => "dl",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "ld" => Some(Method::LinearizeDiscretize),
            "dl" => Some(Method::DiscretizeLinearize),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Converged,
    MaxIter,
    Singular,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::MaxIter => "max_iter",
            Status::Singular => "singular",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    /// `‖x_k - x_{k-1}‖∞` on the grid nodes; absent for the initial iterate.
    pub step_norm: Option<f64>,
    /// Nodal residual of the discretized equation.
    pub residual_norm: Option<f64>,
    /// Sup-norm error on the output sample grid, when the exact solution is known.
    pub true_error: Option<f64>,
    pub wall_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub method: Method,
    pub records: Vec<IterationRecord>,
    pub status: Status,
    pub n: usize,
    pub n_fine: Option<usize>,
    pub mode: Option<QuadratureMode>,
}

impl SolveReport {
    pub fn new(method: Method, n: usize) -> Self {
        SolveReport {
            method,
            records: Vec::new(),
            status: Status::MaxIter,
            n,
            n_fine: None,
            mode: None,
        }
    }

    pub(crate) fn push(&mut self, record: IterationRecord) {
        debug_assert_eq!(record.k, self.records.len(), "records must be dense in k");
        self.records.push(record);
    }

    /// Number of Newton steps taken.
    pub fn iterations(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn errors(&self) -> Vec<f64> {
        self.records.iter().filter_map(|r| r.true_error).collect()
    }

    pub fn final_error(&self) -> Option<f64> {
        self.records.last().and_then(|r| r.true_error)
    }

    pub fn final_residual(&self) -> Option<f64> {
        self.records.last().and_then(|r| r.residual_norm)
    }

    /// First iteration whose true error is at most `eps`.
    pub fn iterations_to(&self, eps: f64) -> Option<usize> {
        self.records
            .iter()
            .find(|r| r.true_error.is_some_and(|e| e <= eps))
            .map(|r| r.k)
    }
}

pub const CSV_HEADER: [&str; 6] = ["method", "k", "step_norm", "residual_norm", "true_error", "wall_ms"];

/// Scientific notation with 17 significant digits, enough to round-trip any `f64`.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(format_float).unwrap_or_default()
}

/// Writes the records of every report, one row per iteration.
/// Wall times are left blank unless `with_timing` is set, so output is reproducible.
pub fn write_reports_csv<W: Write>(out: W, reports: &[&SolveReport], with_timing: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for rep in reports {
        for r in &rep.records {
            w.write_record([
                rep.method.tag().to_string(),
                r.k.to_string(),
                opt(r.step_norm),
                opt(r.residual_norm),
                opt(r.true_error),
                if with_timing { opt(r.wall_ms) } else { String::new() },
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Parses CSV produced by [`write_reports_csv`] back into per-method record lists.
pub fn read_reports_csv<R: Read>(input: R) -> Result<Vec<(Method, Vec<IterationRecord>)>> {
    let mut rdr = csv::Reader::from_reader(input);
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::Domain(format!("unexpected CSV header {headers:?}")));
    }
    let mut out: Vec<(Method, Vec<IterationRecord>)> = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let method = Method::from_tag(&row[0])
            .ok_or_else(|| Error::Domain(format!("unknown method tag `{}`", &row[0])))?;
        let parse = |i: usize| -> Result<Option<f64>> {
            let f = &row[i];
            if f.is_empty() {
                return Ok(None);
            }
            f.parse::<f64>()
                .map(Some)
                .map_err(|e| Error::Domain(format!("column {}: {e}", CSV_HEADER[i])))
        };
        let record = IterationRecord {
            k: row[1]
                .parse()
                .map_err(|e| Error::Domain(format!("column k: {e}")))?,
            step_norm: parse(2)?,
            residual_norm: parse(3)?,
            true_error: parse(4)?,
            wall_ms: parse(5)?,
        };
        match out.last_mut() {
            Some((m, recs)) if *m == method && record.k == recs.len() => recs.push(record),
            _ => out.push((method, vec![record])),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_opt() -> impl Strategy<Value = Option<f64>> {
        prop_oneof![Just(None), any::<f64>().prop_filter("finite", |v| v.is_finite()).prop_map(Some)]
    }

    proptest! {
        #[test]
        fn csv_round_trip(rows in proptest::collection::vec((arb_opt(), arb_opt(), arb_opt(), arb_opt()), 1..12)) {
            let mut rep = SolveReport::new(Method::LinearizeDiscretize, 10);
            for (k, (a, b, c, d)) in rows.into_iter().enumerate() {
                rep.push(IterationRecord { k, step_norm: a, residual_norm: b, true_error: c, wall_ms: d });
            }
            let mut buf = Vec::new();
            write_reports_csv(&mut buf, &[&rep], true).unwrap();
            let back = read_reports_csv(&buf[..]).unwrap();
            prop_assert_eq!(back.len(), 1);
            prop_assert_eq!(back[0].0, Method::LinearizeDiscretize);
            prop_assert_eq!(&back[0].1, &rep.records);
        }
    }

    #[test]
    fn two_blocks_and_blank_timing() {
        let mut ld = SolveReport::new(Method::LinearizeDiscretize, 4);
        let mut dl = SolveReport::new(Method::DiscretizeLinearize, 4);
        for k in 0..3 {
            let r = IterationRecord {
                k,
                step_norm: None,
                residual_norm: Some(1.0),
                true_error: None,
                wall_ms: Some(3.5),
            };
            ld.push(r.clone());
            dl.push(r);
        }
        let mut buf = Vec::new();
        write_reports_csv(&mut buf, &[&ld, &dl], false).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("method,k,step_norm,residual_norm,true_error,wall_ms\n"));
        assert!(text.contains("ld,0,,1.0000000000000000e0,,\n"));
        let back = read_reports_csv(&buf[..]).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[1].0, Method::DiscretizeLinearize);
        assert!(back[1].1.iter().all(|r| r.wall_ms.is_none()));
    }
}
