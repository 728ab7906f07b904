//! Forward stepping of delayed dynamic equations and Lyapunov-type
//! verification.
//!
//! Log-form systems are `Δx(n) = F(n, x(n), [x(n - d_k(n))]_k)` on `Z`;
//! quantum-form systems are `D_q x(t) = f(t, x(t), [x(t q^{-d_k})]_k)` on
//! `q^Z`. Stepping is the exact recurrence, no discretization is involved.

use serde::{Deserialize, Serialize};

use crate::apgen::ApGenerator;
use crate::error::{Error, Result};
use crate::logmap::{transform_rhs, LogSignal};
use crate::qlattice::{GridFunction, QLattice};
use crate::samples::{max_dist, Samples};
use crate::tol::Tolerance;

/// Log-scale right-hand side `F(n, x, delayed)`.
pub trait Rhs: Send + Sync {
    fn eval(&self, n: i64, x: &[f64], delayed: &[&[f64]]) -> std::result::Result<Vec<f64>, String>;
}

/// Quantum-scale right-hand side `f(t, x, delayed)`.
pub trait QuantumRhs: Send + Sync {
    fn eval(&self, t: f64, x: &[f64], delayed: &[&[f64]]) -> std::result::Result<Vec<f64>, String>;
}

impl<F> Rhs for F
where
    F: Fn(i64, &[f64], &[&[f64]]) -> std::result::Result<Vec<f64>, String> + Send + Sync,
{
    fn eval(&self, n: i64, x: &[f64], delayed: &[&[f64]]) -> std::result::Result<Vec<f64>, String> {
        self(n, x, delayed)
    }
}

impl<F> QuantumRhs for F
where
    F: Fn(f64, &[f64], &[&[f64]]) -> std::result::Result<Vec<f64>, String> + Send + Sync,
{
    fn eval(&self, t: f64, x: &[f64], delayed: &[&[f64]]) -> std::result::Result<Vec<f64>, String> {
        self(t, x, delayed)
    }
}

/// Nonnegative integer delay `n ↦ d(n)`.
pub type DelayFn = Box<dyn Fn(i64) -> usize + Send + Sync>;

pub struct DynamicSystem {
    dim: usize,
    rhs: Box<dyn Rhs>,
    delays: Vec<DelayFn>,
    max_delay: usize,
}

impl DynamicSystem {
    pub fn new(dim: usize, rhs: impl Rhs + 'static) -> Self {
        Self {
            dim,
            rhs: Box::new(rhs),
            delays: Vec::new(),
            max_delay: 0,
        }
    }

    /// Declares the delays, in the order the right-hand side receives them,
    /// bounded by `max_delay`.
    pub fn with_delays(mut self, delays: Vec<DelayFn>, max_delay: usize) -> Self {
        self.delays = delays;
        self.max_delay = max_delay;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_delay(&self) -> usize {
        self.max_delay
    }

    pub fn delay_count(&self) -> usize {
        self.delays.len()
    }

    /// Delay values at `n`, checked against `max_delay`.
    pub fn delays_at(&self, n: i64) -> Result<Vec<usize>> {
        self.delays
            .iter()
            .map(|d| {
                let v = d(n);
                if v > self.max_delay {
                    Err(Error::InvalidParameter(format!(
                        "delay {v} at index {n} exceeds declared max_delay {}",
                        self.max_delay
                    )))
                } else {
                    Ok(v)
                }
            })
            .collect()
    }

    /// `F(n, x, delayed)` with the dimension checked.
    pub fn eval(&self, n: i64, x: &[f64], delayed: &[&[f64]]) -> Result<Vec<f64>> {
        let v = self
            .rhs
            .eval(n, x, delayed)
            .map_err(|message| Error::Rhs { index: n, message })?;
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        Ok(v)
    }

    /// `F` at `n` reading the state and delayed states from rows
    /// `data[(m - n_lo)·dim ..]`, `m ≤ n`.
    fn eval_rows(&self, n_lo: i64, data: &[f64], n: i64) -> Result<Vec<f64>> {
        let dim = self.dim;
        let row = |m: i64| &data[(m - n_lo) as usize * dim..(m - n_lo + 1) as usize * dim];
        let delays = self.delays_at(n)?;
        let mut delayed = Vec::with_capacity(delays.len());
        for d in delays {
            let m = n - d as i64;
            if m < n_lo {
                return Err(Error::MissingHistory { index: m });
            }
            delayed.push(row(m));
        }
        self.eval(n, row(n), &delayed)
    }
}

/// Quantum-scale system; [`QuantumSystem::into_log`] produces its exact
/// log-scale counterpart.
pub struct QuantumSystem<R> {
    dim: usize,
    rhs: R,
    delays: Vec<DelayFn>,
    max_delay: usize,
}

impl<R: QuantumRhs + 'static> QuantumSystem<R> {
    pub fn new(dim: usize, rhs: R) -> Self {
        Self {
            dim,
            rhs,
            delays: Vec::new(),
            max_delay: 0,
        }
    }

    pub fn with_delays(mut self, delays: Vec<DelayFn>, max_delay: usize) -> Self {
        self.delays = delays;
        self.max_delay = max_delay;
        self
    }

    /// Steps `x(qt) = x(t) + μ(t) f(t, x(t), delayed)` directly on `q^Z`
    /// from the last history index up to `n_end`.
    pub fn solve_forward(&self, history: &GridFunction, n_end: i64) -> Result<GridFunction> {
        let lat = *history.lattice();
        let q = lat.q();
        let hist = history.samples();
        check_history(self.dim, hist, n_end)?;
        let n0 = hist.n_max();
        let full = QLattice::new(q, hist.n_min(), n_end, lat.includes_zero())?;
        let n_lo = hist.n_min();
        let dim = self.dim;
        let mut data = hist.data().to_vec();
        data.reserve(((n_end - n0) as usize) * dim);
        for n in n0..n_end {
            let t = full.point(n.into())?;
            let mu = full.mu(n.into())?;
            let row = |m: i64| (m - n_lo) as usize * dim;
            let mut delayed = Vec::with_capacity(self.delays.len());
            for d in &self.delays {
                let dv = d(n);
                if dv > self.max_delay {
                    return Err(Error::InvalidParameter(format!(
                        "delay {dv} at index {n} exceeds declared max_delay {}",
                        self.max_delay
                    )));
                }
                let m = n - dv as i64;
                if m < n_lo {
                    return Err(Error::MissingHistory { index: m });
                }
                delayed.push(&data[row(m)..row(m) + dim]);
            }
            let x = &data[row(n)..row(n) + dim];
            let f = self
                .rhs
                .eval(t, x, &delayed)
                .map_err(|message| Error::Rhs { index: n, message })?;
            if f.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: f.len(),
                });
            }
            let next: Vec<f64> = x.iter().zip(&f).map(|(a, b)| a + mu * b).collect();
            if next.iter().any(|v| !v.is_finite()) {
                return Err(Error::Divergence { index: n + 1 });
            }
            data.extend_from_slice(&next);
        }
        let samples = Samples::new(hist.n_min(), n_end, self.dim, data)?;
        let g = GridFunction::new(full, samples)?;
        match history.zero_value() {
            Some(z) => g.with_zero_value(z.to_vec()),
            None => Ok(g),
        }
    }

    /// The log-scale system `Δx̃(n) = (q-1)q^n f(q^n, x̃(n), delayed)`.
    pub fn into_log(self, q: f64) -> Result<DynamicSystem> {
        let rhs = transform_rhs(self.rhs, q)?;
        Ok(DynamicSystem::new(self.dim, rhs).with_delays(self.delays, self.max_delay))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelayedTerm {
    pub delay: usize,
    pub matrix: Vec<Vec<f64>>,
}

/// Linear delayed system `A x(n) + Σ_k B_k x(n - d_k) + g(n)` with an
/// optional almost periodic forcing `g` on the log index. With `q` set the
/// expression is the quantum-scale right-hand side `D_q x` and the system is
/// transformed to log form; otherwise it is `Δx` directly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearSpec {
    pub dim: usize,
    pub a: Vec<Vec<f64>>,
    #[serde(default)]
    pub delayed: Vec<DelayedTerm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forcing: Option<ApGenerator>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
}

fn check_matrix(m: &[Vec<f64>], dim: usize) -> Result<()> {
    if m.len() != dim || m.iter().any(|r| r.len() != dim) {
        return Err(Error::Malformed(format!("matrix must be {dim}x{dim}")));
    }
    if m.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Malformed("non-finite matrix entry".into()));
    }
    Ok(())
}

fn mat_vec(m: &[Vec<f64>], x: &[f64], out: &mut [f64]) {
    for (o, row) in out.iter_mut().zip(m) {
        *o += row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
    }
}

impl LinearSpec {
    /// Log-form system; quantum specs go through [`transform_rhs`].
    pub fn system(&self) -> Result<DynamicSystem> {
        let dim = self.dim;
        if dim == 0 {
            return Err(Error::InvalidParameter("dim must be positive".into()));
        }
        check_matrix(&self.a, dim)?;
        for t in &self.delayed {
            check_matrix(&t.matrix, dim)?;
        }
        if let Some(g) = &self.forcing {
            if g.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: g.dim(),
                });
            }
        }
        let spec = self.clone();
        let expr = move |n: i64, x: &[f64], delayed: &[&[f64]]| -> Vec<f64> {
            let mut out = match &spec.forcing {
                Some(g) => g.eval(n),
                None => vec![0.0; spec.dim],
            };
            mat_vec(&spec.a, x, &mut out);
            for (t, d) in spec.delayed.iter().zip(delayed) {
                mat_vec(&t.matrix, d, &mut out);
            }
            out
        };
        let delays: Vec<DelayFn> = self
            .delayed
            .iter()
            .map(|t| {
                let d = t.delay;
                Box::new(move |_| d) as DelayFn
            })
            .collect();
        let max_delay = self.delayed.iter().map(|t| t.delay).max().unwrap_or(0);
        match self.q {
            None => Ok(DynamicSystem::new(dim, move |n: i64, x: &[f64], d: &[&[f64]]| {
                Ok::<_, String>(expr(n, x, d))
            })
            .with_delays(delays, max_delay)),
            Some(q) => {
                let ln_q = q.ln();
                // grid points t = q^n recover their index exactly after rounding
                let quantum = move |t: f64, x: &[f64], d: &[&[f64]]| {
                    Ok::<_, String>(expr((t.ln() / ln_q).round() as i64, x, d))
                };
                let rhs = transform_rhs(quantum, q)?;
                Ok(DynamicSystem::new(dim, rhs).with_delays(delays, max_delay))
            }
        }
    }
}

fn check_history(dim: usize, hist: &Samples, n_end: i64) -> Result<()> {
    if hist.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: hist.dim(),
        });
    }
    if n_end < hist.n_max() {
        return Err(Error::InvalidParameter(format!(
            "n_end {n_end} precedes the last history index {}",
            hist.n_max()
        )));
    }
    Ok(())
}

/// Steps `x(n+1) = x(n) + F(n, x(n), delayed)` from the last history index
/// `n0` to `n_end`. The output keeps the history in front.
pub fn solve_forward(sys: &DynamicSystem, history: &LogSignal, n_end: i64) -> Result<LogSignal> {
    let hist = history.samples();
    check_history(sys.dim, hist, n_end)?;
    let n_lo = hist.n_min();
    let n0 = hist.n_max();
    let mut data = hist.data().to_vec();
    data.reserve(((n_end - n0) as usize) * sys.dim);
    let dim = sys.dim;
    for n in n0..n_end {
        let step = sys.eval_rows(n_lo, &data, n)?;
        let k = (n - n_lo) as usize * dim;
        let next: Vec<f64> = data[k..k + dim].iter().zip(&step).map(|(a, b)| a + b).collect();
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { index: n + 1 });
        }
        data.extend_from_slice(&next);
    }
    let out = LogSignal::new(Samples::new(n_lo, n_end, sys.dim, data)?);
    match history.ninf_value() {
        Some(z) => out.with_ninf_value(z.to_vec()),
        None => Ok(out),
    }
}

/// `sup_{n ∈ [from, n_max-1]} |Δx(n) - F(n, x(n), delayed)|`.
pub fn trajectory_residual(sys: &DynamicSystem, traj: &LogSignal, from: i64) -> Result<f64> {
    let s = traj.samples();
    let mut worst = 0.0_f64;
    for n in from..s.n_max() {
        let f = sys.eval_rows(s.n_min(), s.data(), n)?;
        let (x, y) = (s.at(n), s.at(n + 1));
        for k in 0..sys.dim {
            worst = worst.max(((y[k] - x[k]) - f[k]).abs());
        }
    }
    Ok(worst)
}

/// Trajectory CSV: `n[,t],x_1,…,x_m`. The `t = q^n` column is written when
/// `q` is given.
pub fn trajectory_csv(s: &Samples, q: Option<f64>) -> String {
    use std::fmt::Write as _;
    let mut out = String::from("n");
    if q.is_some() {
        out.push_str(",t");
    }
    for k in 1..=s.dim() {
        let _ = write!(out, ",x_{k}");
    }
    out.push('\n');
    for n in s.n_min()..=s.n_max() {
        let _ = write!(out, "{n}");
        if let Some(q) = q {
            let _ = write!(out, ",{:e}", crate::qlattice::qpow(q, n));
        }
        for v in s.at(n) {
            let _ = write!(out, ",{v:e}");
        }
        out.push('\n');
    }
    out
}

pub type LyapunovFn = Box<dyn Fn(i64, &[f64], &[f64]) -> f64 + Send + Sync>;
pub type WedgeFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// Candidate Lyapunov function for the product system, with wedge bounds
/// `a(|x-y|) ≤ V ≤ b(|x-y|)`, Lipschitz constant `lip_v` and decay rate
/// `decay_c`. Norms are max-norms.
pub struct LyapunovSpec {
    pub v: LyapunovFn,
    pub wedge_a: WedgeFn,
    pub wedge_b: WedgeFn,
    pub lip_v: f64,
    pub decay_c: f64,
}

/// One state pair for the product system at index `n`. The delayed vectors
/// are needed only for systems with delays, in the system's delay order.
#[derive(Debug, Clone, PartialEq)]
pub struct StatePair {
    pub n: i64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub x_delayed: Vec<Vec<f64>>,
    pub y_delayed: Vec<Vec<f64>>,
}

impl StatePair {
    pub fn new(n: i64, x: Vec<f64>, y: Vec<f64>) -> Self {
        Self {
            n,
            x,
            y,
            x_delayed: Vec::new(),
            y_delayed: Vec::new(),
        }
    }
}

fn one_step(sys: &DynamicSystem, n: i64, x: &[f64], delayed: &[Vec<f64>]) -> Result<Vec<f64>> {
    if delayed.len() != sys.delays.len() {
        return Err(Error::InvalidParameter(format!(
            "system has {} delays but {} delayed states were supplied",
            sys.delays.len(),
            delayed.len()
        )));
    }
    let refs: Vec<&[f64]> = delayed.iter().map(Vec::as_slice).collect();
    let f = sys.eval(n, x, &refs)?;
    Ok(x.iter().zip(&f).map(|(a, b)| a + b).collect())
}

/// `D⁺V^Δ = V(n+1, x⁺, y⁺) - V(n, x, y)` on the unit-graininess scale,
/// where `x⁺`, `y⁺` are one-step images under the system.
pub fn dini_derivative_v(spec: &LyapunovSpec, sys: &DynamicSystem, pair: &StatePair) -> Result<f64> {
    let xp = one_step(sys, pair.n, &pair.x, &pair.x_delayed)?;
    let yp = one_step(sys, pair.n, &pair.y, &pair.y_delayed)?;
    Ok((spec.v)(pair.n + 1, &xp, &yp) - (spec.v)(pair.n, &pair.x, &pair.y))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// Decay rate outside `0 < c < 1` (positive regressivity of `-c` with `μ = 1`).
    Regressivity,
    Wedge,
    Lipschitz,
    Decay,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub condition: Condition,
    pub n: i64,
    /// `allowed - observed`; negative.
    pub margin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CheckVerdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovReport {
    pub window: (i64, i64),
    pub samples: usize,
    pub violations: Vec<Violation>,
    pub verdict: CheckVerdict,
}

/// Log-spaced radii on which the wedge functions are compared.
const WEDGE_RADII: usize = 49;

/// Checks wedges, Lipschitz bound and decay at every sample pair.
pub fn lyapunov_verify(
    spec: &LyapunovSpec,
    sys: &DynamicSystem,
    samples: &[StatePair],
    tol: Tolerance,
) -> Result<LyapunovReport> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("no sample states".into()));
    }
    let lo = samples.iter().map(|s| s.n).min().unwrap();
    let hi = samples.iter().map(|s| s.n).max().unwrap();
    let mut violations = Vec::new();
    let c = spec.decay_c;
    if !(c > 0.0 && 1.0 - c > 0.0) {
        violations.push(Violation {
            condition: Condition::Regressivity,
            n: lo,
            margin: if c <= 0.0 { c } else { 1.0 - c },
        });
    }
    if !(spec.lip_v > 0.0) {
        return Err(Error::InvalidParameter("Lipschitz constant must be positive".into()));
    }

    // (i) wedges on the radius grid: a(0)=b(0)=0, a ≤ b, both increasing.
    let a0 = (spec.wedge_a)(0.0);
    let b0 = (spec.wedge_b)(0.0);
    if a0.abs() > tol.abs || b0.abs() > tol.abs {
        violations.push(Violation {
            condition: Condition::Wedge,
            n: lo,
            margin: -a0.abs().max(b0.abs()),
        });
    }
    let mut prev = (a0, b0);
    for k in 0..WEDGE_RADII {
        let r = 10f64.powf(-6.0 + 12.0 * k as f64 / (WEDGE_RADII - 1) as f64);
        let (a, b) = ((spec.wedge_a)(r), (spec.wedge_b)(r));
        if !(a <= b) || !(a > prev.0) || !(b > prev.1) {
            violations.push(Violation {
                condition: Condition::Wedge,
                n: lo,
                margin: (b - a).min(a - prev.0).min(b - prev.1),
            });
        }
        prev = (a, b);
    }

    for s in samples {
        let r = max_dist(&s.x, &s.y);
        let v = (spec.v)(s.n, &s.x, &s.y);
        let (a, b) = ((spec.wedge_a)(r), (spec.wedge_b)(r));
        if !tol.le(a, v) || !tol.le(v, b) {
            violations.push(Violation {
                condition: Condition::Wedge,
                n: s.n,
                margin: (v - a).min(b - v),
            });
        }
        // (iii)
        let d = dini_derivative_v(spec, sys, s)?;
        let allowed = -c * v;
        if !tol.le(d, allowed) {
            violations.push(Violation {
                condition: Condition::Decay,
                n: s.n,
                margin: allowed - d,
            });
        }
    }

    // (ii) over all pairs of samples sharing an index.
    for (i, s1) in samples.iter().enumerate() {
        for s2 in &samples[i + 1..] {
            if s1.n != s2.n {
                continue;
            }
            let dv = ((spec.v)(s1.n, &s1.x, &s1.y) - (spec.v)(s2.n, &s2.x, &s2.y)).abs();
            let allowed = spec.lip_v * (max_dist(&s1.x, &s2.x) + max_dist(&s1.y, &s2.y));
            if !tol.le(dv, allowed) {
                violations.push(Violation {
                    condition: Condition::Lipschitz,
                    n: s1.n,
                    margin: allowed - dv,
                });
            }
        }
    }

    let verdict = if violations.is_empty() {
        CheckVerdict::Pass
    } else {
        CheckVerdict::Fail
    };
    Ok(LyapunovReport {
        window: (lo, hi),
        samples: samples.len(),
        violations,
        verdict,
    })
}

pub const DEFAULT_BURN_IN: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRun {
    pub perturbation: Vec<f64>,
    /// `|x(n) - reference(n)|` for `n` from the first stepped index to the end.
    pub distances: Vec<f64>,
    /// `exp` of the least-squares slope of `ln distance` after burn-in.
    pub rate: Option<f64>,
    pub monotone: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StabilityVerdict {
    Contracting,
    NotContracting,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub window: (i64, i64),
    pub burn_in: usize,
    pub reference_residual: f64,
    pub runs: Vec<ProbeRun>,
    pub verdict: StabilityVerdict,
}

/// Perturbs the initial history segment of `reference` (the first
/// `max_delay + 1` samples) by each perturbation, re-solves, and measures
/// the distance to the reference.
pub fn stability_probe(
    sys: &DynamicSystem,
    reference: &LogSignal,
    perturbations: &[Vec<f64>],
    burn_in: usize,
    tol_resid: f64,
) -> Result<StabilityReport> {
    let s = reference.samples();
    let n0 = s.n_min() + sys.max_delay as i64;
    if n0 >= s.n_max() {
        return Err(Error::WindowTooShort {
            len: s.len(),
            min: sys.max_delay + 2,
        });
    }
    let residual = trajectory_residual(sys, reference, n0)?;
    if !(residual <= tol_resid) {
        return Err(Error::NotATrajectory {
            residual,
            tol: tol_resid,
        });
    }
    let history = s.restrict(s.n_min(), n0)?;
    let mut runs = Vec::with_capacity(perturbations.len());
    for delta in perturbations {
        if delta.len() != sys.dim {
            return Err(Error::DimensionMismatch {
                expected: sys.dim,
                found: delta.len(),
            });
        }
        let start = history.map_values(|_, v| v.iter().zip(delta).map(|(a, b)| a + b).collect())?;
        let traj = solve_forward(sys, &LogSignal::new(start), s.n_max())?;
        let distances: Vec<f64> = (n0..=s.n_max())
            .map(|n| max_dist(traj.at(n), s.at(n)))
            .collect();
        let tail = &distances[burn_in.min(distances.len())..];
        let monotone = tail.len() >= 2
            && tail
                .windows(2)
                .all(|w| w[1] < w[0] || (w[0] == 0.0 && w[1] == 0.0));
        runs.push(ProbeRun {
            perturbation: delta.clone(),
            rate: fitted_rate(tail),
            distances,
            monotone,
        });
    }
    let verdict = if !runs.is_empty() && runs.iter().all(|r| r.monotone) {
        StabilityVerdict::Contracting
    } else {
        StabilityVerdict::NotContracting
    };
    Ok(StabilityReport {
        window: (n0, s.n_max()),
        burn_in,
        reference_residual: residual,
        runs,
        verdict,
    })
}

fn fitted_rate(d: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = d
        .iter()
        .enumerate()
        .filter(|(_, v)| **v > f64::MIN_POSITIVE)
        .map(|(k, v)| (k as f64, v.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some((sxy / sxx).exp())
}

/// Max-norm `V(n, x, y) = |x - y|`.
pub fn distance_lyapunov(decay_c: f64, lip_v: f64) -> LyapunovSpec {
    LyapunovSpec {
        v: Box::new(|_, x, y| max_dist(x, y)),
        wedge_a: Box::new(|r| r),
        wedge_b: Box::new(|r| r),
        lip_v,
        decay_c,
    }
}
