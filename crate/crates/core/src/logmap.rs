//! Exact correspondence between `q^Z ∪ {0}` and `Z ∪ {-∞_q}` via
//! `f̃(n) = f(q^n)`.

use serde::{Deserialize, Serialize};

use crate::dynamics::{QuantumRhs, Rhs};
use crate::error::{Error, Result};
use crate::qlattice::{qpow, GridFunction, QLattice};
use crate::samples::{Row, Samples};

/// Largest `|n|` for which `(q-1)q^n` is evaluated.
pub const OVERFLOW_GUARD: i64 = 1024;

/// A log index: either a finite integer `n` (the point `q^n`) or the formal
/// index `-∞_q` of the point `0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LogIndex {
    NegInf,
    At(i64),
}

impl From<i64> for LogIndex {
    fn from(n: i64) -> Self {
        LogIndex::At(n)
    }
}

impl LogIndex {
    /// `self + k`. `-∞_q` absorbs finite offsets.
    pub fn offset(self, k: i64) -> LogIndex {
        match self {
            LogIndex::NegInf => LogIndex::NegInf,
            LogIndex::At(n) => LogIndex::At(n + k),
        }
    }

    /// `self ± other` with the convention `t ± (-∞_q) = t`.
    pub fn combine(self, other: LogIndex) -> LogIndex {
        match (self, other) {
            (LogIndex::At(n), LogIndex::At(m)) => LogIndex::At(n + m),
            (a, LogIndex::NegInf) => a,
            (LogIndex::NegInf, b) => b,
        }
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            LogIndex::NegInf => None,
            LogIndex::At(n) => Some(n),
        }
    }
}

/// Fails when the window leaves `|n| <= OVERFLOW_GUARD`.
pub fn guard_window(n_min: i64, n_max: i64) -> Result<()> {
    for n in [n_min, n_max] {
        if n.abs() > OVERFLOW_GUARD {
            return Err(Error::OverflowGuard {
                index: n,
                limit: OVERFLOW_GUARD,
            });
        }
    }
    Ok(())
}

/// Vector samples on a window of `Z`, optionally with the value stored at
/// `-∞_q` (the value `f(0)` of the quantum-scale function).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LogSignalDoc", into = "LogSignalDoc")]
pub struct LogSignal {
    samples: Samples,
    includes_ninf: bool,
    ninf_value: Option<Vec<f64>>,
}

impl LogSignal {
    pub fn new(samples: Samples) -> Self {
        Self {
            samples,
            includes_ninf: false,
            ninf_value: None,
        }
    }

    pub fn from_fn(n_min: i64, n_max: i64, dim: usize, f: impl FnMut(i64) -> Vec<f64>) -> Result<Self> {
        Ok(Self::new(Samples::from_fn(n_min, n_max, dim, f)?))
    }

    pub fn scalar_fn(n_min: i64, n_max: i64, f: impl FnMut(i64) -> f64) -> Result<Self> {
        Ok(Self::new(Samples::scalar_fn(n_min, n_max, f)?))
    }

    pub fn with_ninf_value(mut self, value: Vec<f64>) -> Result<Self> {
        if value.len() != self.samples.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.samples.dim(),
                found: value.len(),
            });
        }
        if value.iter().any(|v| !v.is_finite()) {
            return Err(Error::Malformed("non-finite value at -inf_q".into()));
        }
        self.includes_ninf = true;
        self.ninf_value = Some(value);
        Ok(self)
    }

    pub fn samples(&self) -> &Samples {
        &self.samples
    }

    pub fn into_samples(self) -> Samples {
        self.samples
    }

    pub fn n_min(&self) -> i64 {
        self.samples.n_min()
    }

    pub fn n_max(&self) -> i64 {
        self.samples.n_max()
    }

    pub fn dim(&self) -> usize {
        self.samples.dim()
    }

    pub fn at(&self, n: i64) -> &[f64] {
        self.samples.at(n)
    }

    pub fn includes_ninf(&self) -> bool {
        self.includes_ninf
    }

    pub fn ninf_value(&self) -> Option<&[f64]> {
        self.ninf_value.as_deref()
    }

    pub fn value(&self, idx: LogIndex) -> Result<&[f64]> {
        match idx {
            LogIndex::NegInf => self.ninf_value().ok_or(Error::UndefinedAtZero),
            LogIndex::At(n) => self.samples.get(n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogSignalDoc {
    pub n_min: i64,
    pub n_max: i64,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub includes_zero: bool,
    pub rows: Vec<Row>,
    #[serde(default, alias = "ninf_value", skip_serializing_if = "Option::is_none")]
    pub zero_value: Option<Vec<f64>>,
}

impl TryFrom<LogSignalDoc> for LogSignal {
    type Error = Error;

    fn try_from(doc: LogSignalDoc) -> Result<Self> {
        let samples = Samples::from_rows(doc.n_min, doc.n_max, doc.dim, &doc.rows)?;
        let mut s = LogSignal::new(samples);
        s.includes_ninf = doc.includes_zero;
        if let Some(z) = doc.zero_value {
            s = s.with_ninf_value(z)?;
        }
        Ok(s)
    }
}

impl From<LogSignal> for LogSignalDoc {
    fn from(s: LogSignal) -> Self {
        Self {
            n_min: s.n_min(),
            n_max: s.n_max(),
            dim: s.dim(),
            includes_zero: s.includes_ninf,
            rows: s.samples.rows(),
            zero_value: s.ninf_value,
        }
    }
}

/// `f̃(n) = f(q^n)`; the value at `t = 0`, if supplied, moves to `-∞_q`.
/// A supplied derivative at zero has no log-scale counterpart and is dropped.
pub fn lift(f: &GridFunction) -> LogSignal {
    LogSignal {
        samples: f.samples().clone(),
        includes_ninf: f.lattice().includes_zero(),
        ninf_value: f.zero_value().map(<[f64]>::to_vec),
    }
}

/// Inverse of [`lift`]: `f(t) = f̃(log_q t)`.
pub fn lower(s: &LogSignal, q: f64) -> Result<GridFunction> {
    let lattice = QLattice::new(q, s.n_min(), s.n_max(), s.includes_ninf)?;
    let f = GridFunction::new(lattice, s.samples.clone())?;
    match &s.ninf_value {
        Some(z) => f.with_zero_value(z.clone()),
        None => Ok(f),
    }
}

/// Log-scale right-hand side `F(n, x, d) = (q-1)q^n f(q^n, x, d)` built by
/// [`transform_rhs`].
pub struct LogRhs<R> {
    inner: R,
    q: f64,
}

/// Wraps a quantum-scale right-hand side as its log-scale counterpart.
pub fn transform_rhs<R: QuantumRhs>(f: R, q: f64) -> Result<LogRhs<R>> {
    if !(q.is_finite() && q > 1.0) {
        return Err(Error::InvalidParameter(format!("base q must exceed 1, got {q}")));
    }
    Ok(LogRhs { inner: f, q })
}

impl<R: QuantumRhs> LogRhs<R> {
    pub fn q(&self) -> f64 {
        self.q
    }

    /// Evaluation at any log index. Both sides of the transformed equation
    /// vanish at `-∞_q`, so the zero vector is returned there.
    pub fn at(&self, idx: LogIndex, x: &[f64], delayed: &[&[f64]]) -> Result<Vec<f64>> {
        match idx {
            LogIndex::NegInf => Ok(vec![0.0; x.len()]),
            LogIndex::At(n) => {
                if n.abs() > OVERFLOW_GUARD {
                    return Err(Error::OverflowGuard {
                        index: n,
                        limit: OVERFLOW_GUARD,
                    });
                }
                let t = qpow(self.q, n);
                let scale = (self.q - 1.0) * t;
                let v = self
                    .inner
                    .eval(t, x, delayed)
                    .map_err(|message| Error::Rhs { index: n, message })?;
                Ok(v.into_iter().map(|y| scale * y).collect())
            }
        }
    }
}

impl<R: QuantumRhs> Rhs for LogRhs<R> {
    fn eval(&self, n: i64, x: &[f64], delayed: &[&[f64]]) -> std::result::Result<Vec<f64>, String> {
        self.at(LogIndex::At(n), x, delayed).map_err(|e| e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lift_examples() {
        let lat = QLattice::new(2.0, 0, 3, false).unwrap();
        let f = GridFunction::scalar_fn(lat, |t| t).unwrap();
        let s = lift(&f);
        assert_eq!(s.samples().data(), &[1.0, 2.0, 4.0, 8.0]);
        let c = GridFunction::scalar_fn(lat, |_| 3.0).unwrap();
        assert!(lift(&c).samples().data().iter().all(|&v| v == 3.0));
    }

    #[test]
    fn lower_examples() {
        let s = LogSignal::scalar_fn(-3, 4, |n| qpow(2.0, n)).unwrap();
        let f = lower(&s, 2.0).unwrap();
        for n in -3..=4 {
            let t = f.lattice().point(LogIndex::At(n)).unwrap();
            assert_eq!(f.samples().scalar(n), t);
        }
        assert!(lower(&s, 1.0).is_err());
    }

    #[test]
    fn round_trips_keep_zero_value() {
        let lat = QLattice::new(1.5, -4, 4, true).unwrap();
        let f = GridFunction::from_fn(lat, 2, |t| vec![t.sin(), t.cos()])
            .unwrap()
            .with_zero_value(vec![0.0, 1.0])
            .unwrap();
        assert_eq!(lower(&lift(&f), 1.5).unwrap(), f);
        let s = lift(&f);
        assert_eq!(lift(&lower(&s, 1.5).unwrap()), s);
    }

    #[test]
    fn index_arithmetic() {
        assert_eq!(LogIndex::At(3).combine(LogIndex::NegInf), LogIndex::At(3));
        assert_eq!(LogIndex::NegInf.offset(5), LogIndex::NegInf);
        assert_eq!(LogIndex::At(3).combine(LogIndex::At(-1)), LogIndex::At(2));
    }

    #[test]
    fn transform_examples() {
        let one = transform_rhs(|_t: f64, x: &[f64], _d: &[&[f64]]| Ok(vec![1.0; x.len()]), 2.0).unwrap();
        for n in -3..6 {
            assert_eq!(one.at(LogIndex::At(n), &[0.0], &[]).unwrap(), vec![qpow(2.0, n)]);
        }
        let neg = transform_rhs(|_t: f64, x: &[f64], _d: &[&[f64]]| Ok(x.iter().map(|v| -v).collect()), 3.0).unwrap();
        assert_eq!(neg.at(LogIndex::At(0), &[1.5], &[]).unwrap(), vec![-3.0]);
        assert_eq!(neg.at(LogIndex::NegInf, &[1.5], &[]).unwrap(), vec![0.0]);
        assert!(matches!(
            neg.at(LogIndex::At(1025), &[1.0], &[]),
            Err(Error::OverflowGuard { index: 1025, .. })
        ));
        let failing = transform_rhs(|_t: f64, _x: &[f64], _d: &[&[f64]]| Err("boom".to_string()), 2.0).unwrap();
        assert!(matches!(
            failing.at(LogIndex::At(4), &[1.0], &[]),
            Err(Error::Rhs { index: 4, .. })
        ));
    }

    #[test]
    fn guard() {
        assert!(guard_window(-1024, 1024).is_ok());
        assert!(guard_window(-1025, 0).is_err());
    }
}
