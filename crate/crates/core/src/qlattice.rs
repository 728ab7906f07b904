//! The quantum time scale `q^Z ∪ {0}` restricted to a finite index window,
//! and its calculus.
//!
//! A point is addressed by its log index: `n ↦ t = q^n`, with the extra
//! index [`LogIndex::NegInf`] standing for `t = 0`. All sups and infs are
//! taken over the window `[n_min, n_max]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logmap::LogIndex;
use crate::samples::{Row, Samples};
use crate::tol::Tolerance;

/// `q^n` by repeated multiplication (or division, for negative `n`) from
/// `n = 0` outward. Every module computes lattice points through this
/// function so that `μ`, `σ` and the log-scale transform agree bit for bit.
pub fn qpow(q: f64, n: i64) -> f64 {
    let mut t = 1.0;
    if n >= 0 {
        for _ in 0..n {
            t *= q;
        }
    } else {
        for _ in 0..n.unsigned_abs() {
            t /= q;
        }
    }
    t
}

/// Something with a graininess `μ(n)` at every finite index.
pub trait Graininess {
    fn graininess(&self, n: i64) -> f64;
}

/// The integer time scale `Z`, where `μ ≡ 1`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct UnitScale;

impl Graininess for UnitScale {
    fn graininess(&self, _n: i64) -> f64 {
        1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QLattice {
    q: f64,
    n_min: i64,
    n_max: i64,
    includes_zero: bool,
}

impl QLattice {
    pub fn new(q: f64, n_min: i64, n_max: i64, includes_zero: bool) -> Result<Self> {
        if !(q.is_finite() && q > 1.0) {
            return Err(Error::InvalidParameter(format!("base q must exceed 1, got {q}")));
        }
        if n_min > n_max {
            return Err(Error::InvalidParameter(format!(
                "empty window [{n_min}, {n_max}]"
            )));
        }
        Ok(Self {
            q,
            n_min,
            n_max,
            includes_zero,
        })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn n_min(&self) -> i64 {
        self.n_min
    }

    pub fn n_max(&self) -> i64 {
        self.n_max
    }

    pub fn includes_zero(&self) -> bool {
        self.includes_zero
    }

    pub fn window(&self) -> (i64, i64) {
        (self.n_min, self.n_max)
    }

    fn check(&self, idx: LogIndex) -> Result<()> {
        match idx {
            LogIndex::NegInf if !self.includes_zero => Err(Error::ZeroNotIncluded),
            LogIndex::NegInf => Ok(()),
            LogIndex::At(n) if n < self.n_min || n > self.n_max => Err(Error::OutOfWindow {
                index: n,
                n_min: self.n_min,
                n_max: self.n_max,
            }),
            LogIndex::At(_) => Ok(()),
        }
    }

    /// `t = q^n`, or `0` at `-∞_q`.
    pub fn point(&self, idx: LogIndex) -> Result<f64> {
        self.check(idx)?;
        Ok(match idx {
            LogIndex::NegInf => 0.0,
            LogIndex::At(n) => qpow(self.q, n),
        })
    }

    /// Forward jump. `σ(0) = 0` since 0 is right-dense.
    pub fn sigma(&self, idx: LogIndex) -> Result<LogIndex> {
        self.check(idx)?;
        match idx {
            LogIndex::NegInf => Ok(LogIndex::NegInf),
            LogIndex::At(n) if n == self.n_max => Err(Error::OutOfWindow {
                index: n + 1,
                n_min: self.n_min,
                n_max: self.n_max,
            }),
            LogIndex::At(n) => Ok(LogIndex::At(n + 1)),
        }
    }

    /// Backward jump. `ρ(0) = 0`.
    pub fn rho(&self, idx: LogIndex) -> Result<LogIndex> {
        self.check(idx)?;
        match idx {
            LogIndex::NegInf => Ok(LogIndex::NegInf),
            LogIndex::At(n) if n == self.n_min => Err(Error::OutOfWindow {
                index: n - 1,
                n_min: self.n_min,
                n_max: self.n_max,
            }),
            LogIndex::At(n) => Ok(LogIndex::At(n - 1)),
        }
    }

    /// Graininess `μ(q^n) = (q-1)q^n`; `μ(0) = 0`.
    pub fn mu(&self, idx: LogIndex) -> Result<f64> {
        self.check(idx)?;
        Ok(match idx {
            LogIndex::NegInf => 0.0,
            LogIndex::At(n) => (self.q - 1.0) * qpow(self.q, n),
        })
    }
}

impl Graininess for QLattice {
    fn graininess(&self, n: i64) -> f64 {
        (self.q - 1.0) * qpow(self.q, n)
    }
}

/// Vector samples of a function on a window of `q^Z`, optionally with the
/// right limit at `t = 0` (never extrapolated).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridFunctionDoc", into = "GridFunctionDoc")]
pub struct GridFunction {
    lattice: QLattice,
    samples: Samples,
    zero_value: Option<Vec<f64>>,
    zero_derivative: Option<Vec<f64>>,
}

impl GridFunction {
    pub fn new(lattice: QLattice, samples: Samples) -> Result<Self> {
        if samples.n_min() != lattice.n_min() || samples.n_max() != lattice.n_max() {
            return Err(Error::Malformed(format!(
                "samples cover [{}, {}] but lattice window is [{}, {}]",
                samples.n_min(),
                samples.n_max(),
                lattice.n_min(),
                lattice.n_max()
            )));
        }
        Ok(Self {
            lattice,
            samples,
            zero_value: None,
            zero_derivative: None,
        })
    }

    /// Samples `f(t)` at `t = q^n` over the lattice window.
    pub fn from_fn(lattice: QLattice, dim: usize, mut f: impl FnMut(f64) -> Vec<f64>) -> Result<Self> {
        let samples = Samples::from_fn(lattice.n_min(), lattice.n_max(), dim, |n| {
            f(qpow(lattice.q(), n))
        })?;
        Self::new(lattice, samples)
    }

    pub fn scalar_fn(lattice: QLattice, mut f: impl FnMut(f64) -> f64) -> Result<Self> {
        Self::from_fn(lattice, 1, |t| vec![f(t)])
    }

    /// Attaches the supplied right limit `f(0+)`.
    pub fn with_zero_value(mut self, value: Vec<f64>) -> Result<Self> {
        self.check_zero_vec(&value)?;
        self.zero_value = Some(value);
        Ok(self)
    }

    /// Attaches the supplied derivative at `t = 0`.
    pub fn with_zero_derivative(mut self, value: Vec<f64>) -> Result<Self> {
        self.check_zero_vec(&value)?;
        self.zero_derivative = Some(value);
        Ok(self)
    }

    fn check_zero_vec(&self, value: &[f64]) -> Result<()> {
        if !self.lattice.includes_zero() {
            return Err(Error::ZeroNotIncluded);
        }
        if value.len() != self.samples.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.samples.dim(),
                found: value.len(),
            });
        }
        if value.iter().any(|v| !v.is_finite()) {
            return Err(Error::Malformed("non-finite value at t = 0".into()));
        }
        Ok(())
    }

    pub fn lattice(&self) -> &QLattice {
        &self.lattice
    }

    pub fn samples(&self) -> &Samples {
        &self.samples
    }

    pub fn dim(&self) -> usize {
        self.samples.dim()
    }

    pub fn zero_value(&self) -> Option<&[f64]> {
        self.zero_value.as_deref()
    }

    pub fn zero_derivative(&self) -> Option<&[f64]> {
        self.zero_derivative.as_deref()
    }

    pub fn value(&self, idx: LogIndex) -> Result<&[f64]> {
        match idx {
            LogIndex::NegInf => {
                if !self.lattice.includes_zero() {
                    return Err(Error::ZeroNotIncluded);
                }
                self.zero_value().ok_or(Error::UndefinedAtZero)
            }
            LogIndex::At(n) => self.samples.get(n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunctionDoc {
    pub q: f64,
    pub n_min: i64,
    pub n_max: i64,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub includes_zero: bool,
    pub rows: Vec<Row>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero_value: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero_derivative: Option<Vec<f64>>,
}

impl TryFrom<GridFunctionDoc> for GridFunction {
    type Error = Error;

    fn try_from(doc: GridFunctionDoc) -> Result<Self> {
        let includes_zero =
            doc.includes_zero || doc.zero_value.is_some() || doc.zero_derivative.is_some();
        let lattice = QLattice::new(doc.q, doc.n_min, doc.n_max, includes_zero)?;
        let samples = Samples::from_rows(doc.n_min, doc.n_max, doc.dim, &doc.rows)?;
        let mut f = GridFunction::new(lattice, samples)?;
        if let Some(z) = doc.zero_value {
            f = f.with_zero_value(z)?;
        }
        if let Some(d) = doc.zero_derivative {
            f = f.with_zero_derivative(d)?;
        }
        Ok(f)
    }
}

impl From<GridFunction> for GridFunctionDoc {
    fn from(f: GridFunction) -> Self {
        Self {
            q: f.lattice.q(),
            n_min: f.lattice.n_min(),
            n_max: f.lattice.n_max(),
            dim: f.samples.dim(),
            includes_zero: f.lattice.includes_zero(),
            rows: f.samples.rows(),
            zero_value: f.zero_value,
            zero_derivative: f.zero_derivative,
        }
    }
}

/// `D_q f(q^n) = (f(q^{n+1}) - f(q^n)) / ((q-1)q^n)`. At `-∞_q` returns the
/// supplied derivative at zero.
pub fn q_derivative(f: &GridFunction, idx: LogIndex) -> Result<Vec<f64>> {
    let lat = f.lattice();
    match idx {
        LogIndex::NegInf => {
            if !lat.includes_zero() {
                return Err(Error::ZeroNotIncluded);
            }
            f.zero_derivative()
                .map(<[f64]>::to_vec)
                .ok_or(Error::UndefinedAtZero)
        }
        LogIndex::At(n) => {
            if n == lat.n_max() {
                return Err(Error::NeedsSuccessor(n));
            }
            let here = f.samples().get(n)?;
            let next = f.samples().at(n + 1);
            let mu = lat.mu(idx)?;
            Ok(next.iter().zip(here).map(|(b, a)| (b - a) / mu).collect())
        }
    }
}

/// Result of a delta integral. `tail_bound` is nonzero only when the lower
/// limit is `t = 0`: it estimates the dropped part `∫_0^{q^{n_min}}` as
/// `q^{n_min}` times the largest magnitude seen on the window or at 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QIntegral {
    pub value: Vec<f64>,
    pub tail_bound: f64,
}

/// Delta integral over `[q^a, q^b)`: `Σ_{n=a}^{b-1} μ(q^n) f(q^n)`.
pub fn q_integral(f: &GridFunction, a: LogIndex, b: i64) -> Result<QIntegral> {
    let lat = f.lattice();
    lat.check(LogIndex::At(b))?;
    let (start, from_zero) = match a {
        LogIndex::NegInf => {
            if !lat.includes_zero() {
                return Err(Error::ZeroNotIncluded);
            }
            (lat.n_min(), true)
        }
        LogIndex::At(a) => {
            if a > b {
                return Err(Error::ReversedBounds { a, b });
            }
            lat.check(LogIndex::At(a))?;
            (a, false)
        }
    };
    let mut value = vec![0.0; f.dim()];
    for n in start..b {
        let mu = lat.graininess(n);
        for (acc, v) in value.iter_mut().zip(f.samples().at(n)) {
            *acc += mu * v;
        }
    }
    let tail_bound = if from_zero {
        let mut m = f.samples().sup_norm();
        if let Some(z) = f.zero_value() {
            m = m.max(crate::samples::max_norm(z));
        }
        qpow(lat.q(), lat.n_min()) * m
    } else {
        0.0
    };
    Ok(QIntegral { value, tail_bound })
}

/// Time-scale exponential `e_p(n, s)` for scalar `p` sampled on the same
/// index set as `scale`.
///
/// For `n ≥ s` this is `∏_{u=s}^{n-1} (1 + μ(u)p(u))`, for `n < s` the
/// reciprocal of the product over `[n, s)`. A `-∞_q` endpoint is refused:
/// use a finite lower index and account for the tail separately.
pub fn ts_exponential<G: Graininess>(
    scale: &G,
    p: &Samples,
    n: impl Into<LogIndex>,
    s: impl Into<LogIndex>,
) -> Result<f64> {
    let (n, s) = match (n.into(), s.into()) {
        (LogIndex::At(n), LogIndex::At(s)) => (n, s),
        _ => {
            return Err(Error::InvalidParameter(
                "exponential with a -inf_q endpoint is not evaluated; use a finite index".into(),
            ))
        }
    };
    let (lo, hi) = if n >= s { (s, n) } else { (n, s) };
    if lo == hi {
        return Ok(1.0);
    }
    if lo < p.n_min() || hi - 1 > p.n_max() {
        return Err(Error::InsufficientSamples {
            missing_lo: lo.min(p.n_min()),
            missing_hi: (hi - 1).max(p.n_max()),
        });
    }
    // Compensated product: the rounding error of each step is recovered
    // with an FMA and carried in `lo_part`, so the result is within about
    // one ulp of the exact product regardless of length.
    let mut prod = 1.0_f64;
    let mut lo_part = 0.0_f64;
    for u in lo..hi {
        let factor = 1.0 + scale.graininess(u) * p.scalar(u);
        if factor == 0.0 || !factor.is_finite() {
            return Err(Error::NotRegressive { index: u, factor });
        }
        let next = prod * factor;
        let err = prod.mul_add(factor, -next);
        lo_part = lo_part.mul_add(factor, err);
        prod = next;
    }
    let prod = prod + lo_part;
    Ok(if n >= s { prod } else { 1.0 / prod })
}

/// Checks `1 + μ(u)p(u) > 0` for `u` in `[lo, hi]`.
pub fn check_positively_regressive<G: Graininess>(
    scale: &G,
    p: &Samples,
    lo: i64,
    hi: i64,
) -> Result<()> {
    for u in lo..=hi {
        let factor = 1.0 + scale.graininess(u) * p.get(u)?[0];
        if factor <= 0.0 {
            return Err(Error::NotRegressive { index: u, factor });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    HypothesisViolated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Margin {
    pub n: i64,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GronwallReport {
    pub window: (i64, i64),
    /// Indices where `D y > p y + f` beyond tolerance.
    pub hypothesis_violations: Vec<i64>,
    /// `bound(n) - y(n)` at each index where the conclusion was checked.
    pub margins: Vec<Margin>,
    pub min_margin: f64,
    pub verdict: Verdict,
}

/// Checks the discrete Gronwall implication on `[t0, y.n_max]`.
///
/// Hypothesis: `D y(n) ≤ p(n)y(n) + f(n)` for `t0 ≤ n < n_max`, with
/// `p` positively regressive. Conclusion:
/// `y(n) ≤ y(t0)e_p(n,t0) + Σ_{τ=t0}^{n-1} e_p(n,σ(τ))μ(τ)f(τ)`.
/// The conclusion is checked only up to the first hypothesis violation.
pub fn gronwall_verify<G: Graininess>(
    scale: &G,
    y: &Samples,
    p: &Samples,
    f: &Samples,
    t0: i64,
    tol: Tolerance,
) -> Result<GronwallReport> {
    let end = y.n_max();
    if t0 < y.n_min() || t0 > end {
        return Err(Error::OutOfWindow {
            index: t0,
            n_min: y.n_min(),
            n_max: end,
        });
    }
    for s in [p, f] {
        if s.n_min() > t0 || s.n_max() < end - 1 {
            return Err(Error::InsufficientSamples {
                missing_lo: t0.min(s.n_min()),
                missing_hi: (end - 1).max(s.n_max()),
            });
        }
    }
    if end > t0 {
        check_positively_regressive(scale, p, t0, end - 1)?;
    }

    let mut violations = Vec::new();
    for n in t0..end {
        let mu = scale.graininess(n);
        let dy = (y.scalar(n + 1) - y.scalar(n)) / mu;
        let rhs = p.scalar(n) * y.scalar(n) + f.scalar(n);
        if !tol.le(dy, rhs) {
            violations.push(n);
        }
    }
    let last_checked = violations.first().copied().unwrap_or(end);

    let mut margins = Vec::new();
    let mut bound = y.scalar(t0);
    let mut min_margin = f64::INFINITY;
    let mut failed = false;
    for n in t0..=last_checked {
        if n > t0 {
            let u = n - 1;
            let mu = scale.graininess(u);
            bound = (1.0 + mu * p.scalar(u)) * bound + mu * f.scalar(u);
        }
        let margin = bound - y.scalar(n);
        if !tol.le(y.scalar(n), bound) {
            failed = true;
        }
        min_margin = min_margin.min(margin);
        margins.push(Margin { n, margin });
    }
    let verdict = if !violations.is_empty() {
        Verdict::HypothesisViolated
    } else if failed {
        Verdict::Fail
    } else {
        Verdict::Pass
    };
    Ok(GronwallReport {
        window: (t0, end),
        hypothesis_violations: violations,
        margins,
        min_margin,
        verdict,
    })
}
