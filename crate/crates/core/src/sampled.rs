//! Functions stored as values on a sorted point set.

use crate::error::{Error, Result};
use crate::linalg::max_nan;

/// Piecewise-linear function through `(points[i], values[i])`.
///
/// Outside `[points[0], points[last]]` the end values are held constant.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    points: Vec<f64>,
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(points: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Domain("sampled function needs at least one point".into()));
        }
        if points.len() != values.len() {
            return Err(Error::Domain(format!(
                "{} points but {} values",
                points.len(),
                values.len()
            )));
        }
        if points.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Domain(
                "sample points must be strictly increasing".into(),
            ));
        }
        Ok(SampledFunction { points, values })
    }

    /// Samples `f` on `points`.
    pub fn from_fn(points: Vec<f64>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = points.iter().map(|&p| f(p)).collect();
        SampledFunction::new(points, values)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of `p` in the point set, if present.
    pub fn index_of(&self, p: f64) -> Option<usize> {
        self.points.binary_search_by(|x| x.total_cmp(&p)).ok()
    }

    pub fn eval(&self, p: f64) -> f64 {
        let pts = &self.points;
        let last = pts.len() - 1;
        if p <= pts[0] {
            return self.values[0];
        }
        if p >= pts[last] {
            return self.values[last];
        }
        match pts.binary_search_by(|x| x.total_cmp(&p)) {
            Ok(i) => self.values[i],
            Err(i) => {
                let (x0, x1) = (pts[i - 1], pts[i]);
                let (v0, v1) = (self.values[i - 1], self.values[i]);
                let w = (p - x0) / (x1 - x0);
                v0 + w * (v1 - v0)
            }
        }
    }

    /// `max |self(p) - other(p)|` over this function's points.
    pub fn sup_distance(&self, other: impl Fn(f64) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.values)
            .map(|(&p, &v)| (v - other(p)).abs())
            .fold(0.0, max_nan)
    }
}
