//! Dense vector-valued samples over a contiguous integer index window.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row of the structured-text sample schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub n: i64,
    pub value: Vec<f64>,
}

/// Values `n ↦ x(n) ∈ R^dim` for every `n` in `[n_min, n_max]`, stored
/// row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    n_min: i64,
    n_max: i64,
    dim: usize,
    data: Vec<f64>,
}

impl Samples {
    pub fn new(n_min: i64, n_max: i64, dim: usize, data: Vec<f64>) -> Result<Self> {
        if n_min > n_max {
            return Err(Error::InvalidParameter(format!(
                "empty window [{n_min}, {n_max}]"
            )));
        }
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        let len = (n_max - n_min + 1) as usize;
        if data.len() != len * dim {
            return Err(Error::Malformed(format!(
                "expected {} values for {len} rows of dimension {dim}, found {}",
                len * dim,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                index: n_min + (pos / dim) as i64,
            });
        }
        Ok(Self {
            n_min,
            n_max,
            dim,
            data,
        })
    }

    /// Samples `f(n)` for each `n` in the window.
    pub fn from_fn(
        n_min: i64,
        n_max: i64,
        dim: usize,
        mut f: impl FnMut(i64) -> Vec<f64>,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(((n_max - n_min + 1).max(0) as usize) * dim);
        for n in n_min..=n_max {
            let v = f(n);
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            data.extend_from_slice(&v);
        }
        Self::new(n_min, n_max, dim, data)
    }

    pub fn scalar_fn(n_min: i64, n_max: i64, mut f: impl FnMut(i64) -> f64) -> Result<Self> {
        Self::from_fn(n_min, n_max, 1, |n| vec![f(n)])
    }

    /// Builds samples from rows in any order; every index must appear once.
    pub fn from_rows(n_min: i64, n_max: i64, dim: usize, rows: &[Row]) -> Result<Self> {
        if n_min > n_max {
            return Err(Error::Malformed(format!("empty window [{n_min}, {n_max}]")));
        }
        let len = (n_max - n_min + 1) as usize;
        let mut seen = vec![false; len];
        let mut data = vec![0.0; len * dim];
        for row in rows {
            if row.n < n_min || row.n > n_max {
                return Err(Error::Malformed(format!(
                    "row index {} outside [{n_min}, {n_max}]",
                    row.n
                )));
            }
            if row.value.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.value.len(),
                });
            }
            let k = (row.n - n_min) as usize;
            if seen[k] {
                return Err(Error::Malformed(format!("duplicate row index {}", row.n)));
            }
            seen[k] = true;
            data[k * dim..(k + 1) * dim].copy_from_slice(&row.value);
        }
        if let Some(k) = seen.iter().position(|s| !s) {
            return Err(Error::Malformed(format!(
                "missing row index {}",
                n_min + k as i64
            )));
        }
        Self::new(n_min, n_max, dim, data)
    }

    pub fn rows(&self) -> Vec<Row> {
        (self.n_min..=self.n_max)
            .map(|n| Row {
                n,
                value: self.at(n).to_vec(),
            })
            .collect()
    }

    pub fn n_min(&self) -> i64 {
        self.n_min
    }

    pub fn n_max(&self) -> i64 {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        (self.n_max - self.n_min + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, n: i64) -> bool {
        n >= self.n_min && n <= self.n_max
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Value at `n`. Panics outside the window; use [`Samples::get`] for a
    /// checked lookup.
    pub fn at(&self, n: i64) -> &[f64] {
        let k = (n - self.n_min) as usize * self.dim;
        &self.data[k..k + self.dim]
    }

    pub fn get(&self, n: i64) -> Result<&[f64]> {
        if self.contains(n) {
            Ok(self.at(n))
        } else {
            Err(Error::OutOfWindow {
                index: n,
                n_min: self.n_min,
                n_max: self.n_max,
            })
        }
    }

    /// Scalar value of component 0 at `n`.
    pub fn scalar(&self, n: i64) -> f64 {
        self.at(n)[0]
    }

    /// Restriction to `[lo, hi]`, which must lie inside the window.
    pub fn restrict(&self, lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidParameter(format!("empty window [{lo}, {hi}]")));
        }
        if lo < self.n_min {
            return Err(Error::InsufficientSamples {
                missing_lo: lo,
                missing_hi: (self.n_min - 1).min(hi),
            });
        }
        if hi > self.n_max {
            return Err(Error::InsufficientSamples {
                missing_lo: (self.n_max + 1).max(lo),
                missing_hi: hi,
            });
        }
        let a = (lo - self.n_min) as usize * self.dim;
        let b = (hi - self.n_min + 1) as usize * self.dim;
        Ok(Self {
            n_min: lo,
            n_max: hi,
            dim: self.dim,
            data: self.data[a..b].to_vec(),
        })
    }

    /// Same values re-indexed so that the sample formerly at `n` sits at `n - shift`.
    pub fn reindexed(&self, shift: i64) -> Self {
        Self {
            n_min: self.n_min - shift,
            n_max: self.n_max - shift,
            dim: self.dim,
            data: self.data.clone(),
        }
    }

    pub fn map_values(&self, mut f: impl FnMut(i64, &[f64]) -> Vec<f64>) -> Result<Self> {
        Self::from_fn(self.n_min, self.n_max, self.dim, |n| f(n, self.at(n)))
    }

    /// Largest absolute entry over the window (sup norm with max over components).
    pub fn sup_norm(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Sup of `|self - other|` over the intersection of the two windows.
    pub fn sup_distance(&self, other: &Samples) -> Result<f64> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let lo = self.n_min.max(other.n_min);
        let hi = self.n_max.min(other.n_max);
        if lo > hi {
            return Err(Error::EmptyOverlap);
        }
        let mut d = 0.0_f64;
        for n in lo..=hi {
            for (a, b) in self.at(n).iter().zip(other.at(n)) {
                d = d.max((a - b).abs());
            }
        }
        Ok(d)
    }
}

/// Max-norm of a vector.
pub fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Max-norm of `a - b`.
pub fn max_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}
