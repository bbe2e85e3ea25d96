//! Uniform partitions of a real interval.

use crate::error::{Error, Result};

/// Uniform grid `a = t_0 < t_1 < ... < t_n = b` with mesh width `h = (b - a) / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    a: f64,
    b: f64,
    n: usize,
    h: f64,
    nodes: Vec<f64>,
}

impl Grid {
    /// Builds the uniform grid with `n` subintervals on `[a, b]`.
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::Domain(format!("grid endpoints must be finite, got [{a}, {b}]")));
        }
        if a >= b {
            return Err(Error::Domain(format!("grid requires a < b, got a = {a}, b = {b}")));
        }
        if n == 0 {
            return Err(Error::Domain("grid requires at least one subinterval".into()));
        }
        let h = (b - a) / n as f64;
        let mut nodes: Vec<f64> = (0..=n).map(|j| a + j as f64 * h).collect();
        nodes[n] = b;
        Ok(Grid { a, b, n, h, nodes })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Number of subintervals.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Mesh width.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn node(&self, j: usize) -> f64 {
        self.nodes[j]
    }
}

/// Convenience wrapper around [`Grid::new`].
pub fn make_grid(a: f64, b: f64, n: usize) -> Result<Grid> {
    Grid::new(a, b, n)
}
