use serde::{Deserialize, Serialize};

/// Absolute-plus-relative tolerance used for every floating comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs: 1e-9, rel: 1e-9 }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }

    /// Same value for both parts.
    pub fn uniform(tol: f64) -> Self {
        Self { abs: tol, rel: tol }
    }

    /// Allowed slack when comparing quantities of magnitude `scale`.
    pub fn slack(&self, scale: f64) -> f64 {
        self.abs + self.rel * scale.abs()
    }

    pub fn close(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.slack(a.abs().max(b.abs()))
    }

    /// `lhs <= rhs` up to tolerance.
    pub fn le(&self, lhs: f64, rhs: f64) -> bool {
        lhs <= rhs + self.slack(lhs.abs().max(rhs.abs()))
    }
}
