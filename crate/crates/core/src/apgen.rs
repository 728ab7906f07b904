//! Closed-form almost periodic generators and the ε-translation-set analyzer.
//!
//! Signals live on the log index `n` (the point `q^n`). A shift by `τ` on the
//! index is the multiplicative translate `t ↦ t q^τ` on the quantum scale,
//! so both almost-periodicity notions reduce to integer-shift scans:
//!
//! - unweighted: `sup_n |f(n+τ) - f(n)| < ε`
//! - weighted:   `sup_n |q^τ f(n+τ) - f(n)| < ε`
//!
//! Scans are finite: sups run over a window and `τ` over a range, so the
//! classifier reports evidence, never a proof.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logmap::{LogIndex, LogSignal};
use crate::qlattice::qpow;
use crate::samples::Samples;

pub const DEFAULT_WINDOW: (i64, i64) = (-500, 500);
pub const DEFAULT_TAU_RANGE: (i64, i64) = (-200, 200);
pub const DEFAULT_EPSILONS: [f64; 4] = [0.5, 0.2, 0.1, 0.05];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub amp: f64,
    pub freq: f64,
    pub phase: f64,
}

/// `offset + Σ amp·cos(freq·n + phase)`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ApComponent {
    pub offset: f64,
    #[serde(default)]
    pub terms: Vec<Term>,
}

impl ApComponent {
    pub fn constant(offset: f64) -> Self {
        Self {
            offset,
            terms: Vec::new(),
        }
    }

    pub fn with_term(mut self, amp: f64, freq: f64, phase: f64) -> Self {
        self.terms.push(Term { amp, freq, phase });
        self
    }

    fn eval_at(&self, m: i64) -> f64 {
        let x = m as f64;
        self.terms
            .iter()
            .fold(self.offset, |acc, t| acc + t.amp * (t.freq * x + t.phase).cos())
    }

    fn is_constant(&self) -> bool {
        self.terms.iter().all(|t| t.amp == 0.0 || t.freq == 0.0)
    }
}

/// Vector-valued quasi-periodic signal on the log index.
///
/// Integer shifts are kept as an exact integer offset rather than folded
/// into the phases, so translates compose without rounding. A weighted
/// translate multiplies the whole signal by `gain`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ApGeneratorDoc", into = "ApGeneratorDoc")]
pub struct ApGenerator {
    components: Vec<ApComponent>,
    shift: i64,
    gain: f64,
    zero_limit: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApGeneratorDoc {
    pub dim: usize,
    pub components: Vec<ApComponent>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub shift: i64,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub gain: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero_limit: Option<Vec<f64>>,
}

fn is_zero(v: &i64) -> bool {
    *v == 0
}

fn one() -> f64 {
    1.0
}

fn is_one(v: &f64) -> bool {
    *v == 1.0
}

impl TryFrom<ApGeneratorDoc> for ApGenerator {
    type Error = Error;

    fn try_from(doc: ApGeneratorDoc) -> Result<Self> {
        if doc.dim != doc.components.len() {
            return Err(Error::DimensionMismatch {
                expected: doc.dim,
                found: doc.components.len(),
            });
        }
        let mut g = ApGenerator::new(doc.components)?;
        g.shift = doc.shift;
        if !doc.gain.is_finite() {
            return Err(Error::Malformed("non-finite gain".into()));
        }
        g.gain = doc.gain;
        if let Some(z) = doc.zero_limit {
            g = g.with_zero_limit(z)?;
        }
        Ok(g)
    }
}

impl From<ApGenerator> for ApGeneratorDoc {
    fn from(g: ApGenerator) -> Self {
        Self {
            dim: g.components.len(),
            components: g.components,
            shift: g.shift,
            gain: g.gain,
            zero_limit: g.zero_limit,
        }
    }
}

impl ApGenerator {
    pub fn new(components: Vec<ApComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidParameter("generator needs at least one component".into()));
        }
        for c in &components {
            let finite = c.offset.is_finite()
                && c
                    .terms
                    .iter()
                    .all(|t| t.amp.is_finite() && t.freq.is_finite() && t.phase.is_finite());
            if !finite {
                return Err(Error::Malformed("non-finite generator coefficient".into()));
            }
        }
        Ok(Self {
            components,
            shift: 0,
            gain: 1.0,
            zero_limit: None,
        })
    }

    /// Scalar generator.
    pub fn scalar(component: ApComponent) -> Self {
        Self::new(vec![component]).expect("one component")
    }

    pub fn constant(value: f64) -> Self {
        Self::scalar(ApComponent::constant(value))
    }

    /// Declares the right limit at `t = 0`, returned at `-∞_q`.
    pub fn with_zero_limit(mut self, value: Vec<f64>) -> Result<Self> {
        if value.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: value.len(),
            });
        }
        self.zero_limit = Some(value);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[ApComponent] {
        &self.components
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    pub fn eval_component(&self, i: usize, n: i64) -> f64 {
        self.gain * self.components[i].eval_at(n + self.shift)
    }

    pub fn eval(&self, n: i64) -> Vec<f64> {
        (0..self.dim()).map(|i| self.eval_component(i, n)).collect()
    }

    /// Value at any log index. At `-∞_q` this is the declared zero limit, or
    /// the (index-independent) value of a constant generator.
    pub fn value(&self, idx: LogIndex) -> Result<Vec<f64>> {
        match idx {
            LogIndex::At(n) => Ok(self.eval(n)),
            LogIndex::NegInf => {
                if let Some(z) = &self.zero_limit {
                    Ok(z.clone())
                } else if self.components.iter().all(ApComponent::is_constant) {
                    Ok(self.eval(0))
                } else {
                    Err(Error::UndefinedAtZero)
                }
            }
        }
    }

    /// Analytic sup bound `|gain|·(|offset| + Σ|amp|)` of component `i`.
    pub fn sup_bound(&self, i: usize) -> f64 {
        let c = &self.components[i];
        self.gain.abs() * c.terms.iter().fold(c.offset.abs(), |a, t| a + t.amp.abs())
    }

    /// Analytic lower bound `gain·offset - |gain|·Σ|amp|` of component `i`.
    pub fn inf_bound(&self, i: usize) -> f64 {
        let c = &self.components[i];
        let spread: f64 = c.terms.iter().map(|t| t.amp.abs()).sum();
        self.gain * c.offset - self.gain.abs() * spread
    }

    /// Analytic upper bound `gain·offset + |gain|·Σ|amp|` of component `i`.
    pub fn upper_bound(&self, i: usize) -> f64 {
        let c = &self.components[i];
        let spread: f64 = c.terms.iter().map(|t| t.amp.abs()).sum();
        self.gain * c.offset + self.gain.abs() * spread
    }

    /// Largest analytic sup bound over components.
    pub fn max_sup_bound(&self) -> f64 {
        (0..self.dim()).map(|i| self.sup_bound(i)).fold(0.0, f64::max)
    }

    /// Samples over `[lo, hi]`.
    pub fn to_signal(&self, lo: i64, hi: i64) -> Result<LogSignal> {
        LogSignal::from_fn(lo, hi, self.dim(), |n| self.eval(n))
    }

    /// The same signal with the integer shift folded into the phases.
    /// Not bit-identical to `self` under evaluation.
    pub fn absorbed(&self) -> ApGenerator {
        let s = self.shift as f64;
        let components = self
            .components
            .iter()
            .map(|c| ApComponent {
                offset: c.offset,
                terms: c
                    .terms
                    .iter()
                    .map(|t| Term {
                        amp: t.amp,
                        freq: t.freq,
                        phase: t.phase + t.freq * s,
                    })
                    .collect(),
            })
            .collect();
        ApGenerator {
            components,
            shift: 0,
            gain: self.gain,
            zero_limit: self.zero_limit.clone(),
        }
    }
}

/// Integer translation `n ↦ f(n+α)` and its weighted form `n ↦ q^α f(n+α)`.
pub trait Translate: Sized {
    fn translate(&self, alpha: i64) -> Result<Self>;
    fn weighted_translate(&self, alpha: i64, q: f64) -> Result<Self>;
}

impl Translate for ApGenerator {
    fn translate(&self, alpha: i64) -> Result<Self> {
        let mut g = self.clone();
        g.shift += alpha;
        Ok(g)
    }

    fn weighted_translate(&self, alpha: i64, q: f64) -> Result<Self> {
        check_q(q)?;
        let mut g = self.translate(alpha)?;
        g.gain *= qpow(q, alpha);
        Ok(g)
    }
}

impl Translate for LogSignal {
    /// The result lives on the shifted window `[n_min - α, n_max - α]`, which
    /// must overlap the stored one.
    fn translate(&self, alpha: i64) -> Result<Self> {
        let len = self.samples().len() as i64;
        if alpha.abs() >= len {
            return Err(Error::EmptyOverlap);
        }
        Ok(LogSignal::new(self.samples().reindexed(alpha)))
    }

    fn weighted_translate(&self, alpha: i64, q: f64) -> Result<Self> {
        check_q(q)?;
        let w = qpow(q, alpha);
        let shifted = self.translate(alpha)?;
        Ok(LogSignal::new(
            shifted.samples().map_values(|_, v| v.iter().map(|x| w * x).collect())?,
        ))
    }
}

fn check_q(q: f64) -> Result<()> {
    if q.is_finite() && q > 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("base q must exceed 1, got {q}")))
    }
}

/// Anything the analyzer can sample on a log-index range.
pub trait SignalSource {
    fn dim(&self) -> usize;
    fn sample(&self, lo: i64, hi: i64) -> Result<Samples>;
}

impl SignalSource for ApGenerator {
    fn dim(&self) -> usize {
        ApGenerator::dim(self)
    }

    fn sample(&self, lo: i64, hi: i64) -> Result<Samples> {
        Samples::from_fn(lo, hi, self.dim(), |n| self.eval(n))
    }
}

impl SignalSource for LogSignal {
    fn dim(&self) -> usize {
        LogSignal::dim(self)
    }

    fn sample(&self, lo: i64, hi: i64) -> Result<Samples> {
        self.samples().restrict(lo, hi)
    }
}

impl SignalSource for Samples {
    fn dim(&self) -> usize {
        Samples::dim(self)
    }

    fn sample(&self, lo: i64, hi: i64) -> Result<Samples> {
        self.restrict(lo, hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Unweighted,
    Weighted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub tau: i64,
    pub sup_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslationReport {
    pub epsilon: f64,
    pub mode: Mode,
    pub tau_range: (i64, i64),
    pub window: (i64, i64),
    /// ε-translation numbers found in `tau_range`, ascending.
    pub members: Vec<i64>,
    /// Largest gap between consecutive members; `None` stands for ∞ (fewer
    /// than two members).
    pub inclusion_length: Option<i64>,
    pub scan: Vec<ScanRow>,
}

impl TranslationReport {
    pub fn contains(&self, tau: i64) -> bool {
        self.members.binary_search(&tau).is_ok()
    }

    /// Every length-`ℓ` subinterval of `tau_range` holds a member.
    pub fn relatively_dense(&self) -> bool {
        let Some(l) = self.inclusion_length else {
            return false;
        };
        let first = self.members[0];
        let last = *self.members.last().unwrap();
        first - self.tau_range.0 <= l && self.tau_range.1 - last <= l
    }

    /// CSV with columns `tau,sup_diff,member_flag`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("tau,sup_diff,member_flag\n");
        for row in &self.scan {
            let flag = u8::from(row.sup_diff < self.epsilon);
            let _ = writeln!(out, "{},{:e},{}", row.tau, row.sup_diff, flag);
        }
        out
    }
}

/// Largest consecutive gap in a sorted list, `None` for fewer than two entries.
pub fn max_gap(members: &[i64]) -> Option<i64> {
    members.windows(2).map(|w| w[1] - w[0]).max()
}

/// `sup_{n ∈ window} |w·f(n+τ) - f(n)|` for each `τ` in `tau_range`, with
/// `w = q^τ` in weighted mode and `1` otherwise.
pub fn sup_differences<S: SignalSource + ?Sized>(
    f: &S,
    mode: Mode,
    tau_range: (i64, i64),
    window: (i64, i64),
    q: f64,
) -> Result<Vec<ScanRow>> {
    let (tau_lo, tau_hi) = tau_range;
    let (w_lo, w_hi) = window;
    if tau_lo > tau_hi || w_lo > w_hi {
        return Err(Error::InvalidParameter("empty window or tau range".into()));
    }
    if mode == Mode::Weighted {
        check_q(q)?;
    }
    let lo = w_lo + tau_lo.min(0);
    let hi = w_hi + tau_hi.max(0);
    let s = f.sample(lo, hi)?;
    let dim = s.dim();
    let base = &s.data()[((w_lo - lo) as usize) * dim..((w_hi - lo + 1) as usize) * dim];
    let rows = (tau_lo..=tau_hi)
        .map(|tau| {
            let w = match mode {
                Mode::Unweighted => 1.0,
                Mode::Weighted => qpow(q, tau),
            };
            let start = ((w_lo + tau - lo) as usize) * dim;
            let shifted = &s.data()[start..start + base.len()];
            let sup_diff = shifted
                .iter()
                .zip(base)
                .fold(0.0_f64, |m, (a, b)| m.max((w * a - b).abs()));
            ScanRow { tau, sup_diff }
        })
        .collect();
    Ok(rows)
}

/// The ε-translation set `E = {τ ∈ tau_range : sup < ε}` (strict).
pub fn translation_set<S: SignalSource + ?Sized>(
    f: &S,
    epsilon: f64,
    mode: Mode,
    tau_range: (i64, i64),
    window: (i64, i64),
    q: f64,
) -> Result<TranslationReport> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    let scan = sup_differences(f, mode, tau_range, window, q)?;
    Ok(report_from_scan(epsilon, mode, tau_range, window, scan))
}

fn report_from_scan(
    epsilon: f64,
    mode: Mode,
    tau_range: (i64, i64),
    window: (i64, i64),
    scan: Vec<ScanRow>,
) -> TranslationReport {
    let members: Vec<i64> = scan
        .iter()
        .filter(|r| r.sup_diff < epsilon)
        .map(|r| r.tau)
        .collect();
    TranslationReport {
        epsilon,
        mode,
        tau_range,
        window,
        inclusion_length: max_gap(&members),
        members,
        scan,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ApVerdict {
    ApEvidence,
    NoEvidence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonEntry {
    pub report: TranslationReport,
    pub relatively_dense: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApClassification {
    pub entries: Vec<EpsilonEntry>,
    pub verdict: ApVerdict,
    pub note: String,
}

/// Runs [`translation_set`] for each ε of a positive, strictly descending
/// list and checks relative density of each set inside `tau_range`.
pub fn ap_classify<S: SignalSource + ?Sized>(
    f: &S,
    epsilons: &[f64],
    tau_range: (i64, i64),
    window: (i64, i64),
    q: f64,
    mode: Mode,
) -> Result<ApClassification> {
    if epsilons.is_empty() {
        return Err(Error::InvalidParameter("empty epsilon list".into()));
    }
    if epsilons.iter().any(|e| !(*e > 0.0)) || epsilons.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter(
            "epsilons must be positive and strictly descending".into(),
        ));
    }
    let scan = sup_differences(f, mode, tau_range, window, q)?;
    let entries: Vec<EpsilonEntry> = epsilons
        .iter()
        .map(|&eps| {
            let report = report_from_scan(eps, mode, tau_range, window, scan.clone());
            EpsilonEntry {
                relatively_dense: report.relatively_dense(),
                report,
            }
        })
        .collect();
    let verdict = if entries.iter().all(|e| e.relatively_dense) {
        ApVerdict::ApEvidence
    } else {
        ApVerdict::NoEvidence
    };
    Ok(ApClassification {
        entries,
        verdict,
        note: format!(
            "finite-window evidence, not proof: sup over n in [{}, {}], tau in [{}, {}]",
            window.0, window.1, tau_range.0, tau_range.1
        ),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SplitVerdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitReport {
    pub window: (i64, i64),
    /// `sup |φ - p|` over the first, middle and last third of the window.
    pub thirds_sup: [f64; 3],
    /// `|φ - p|` at the last index.
    pub final_residual: f64,
    pub decay_tol: f64,
    pub verdict: SplitVerdict,
}

/// Checks that `φ - p` decays on the window of `φ`.
///
/// Passes iff the per-third sups strictly decrease (a sup that has reached
/// exactly zero may stay zero) and the residual at the last index is below
/// `decay_tol`.
pub fn asymptotic_split_check(phi: &LogSignal, p: &ApGenerator, decay_tol: f64) -> Result<SplitReport> {
    let len = phi.samples().len();
    if len < 9 {
        return Err(Error::WindowTooShort { len, min: 9 });
    }
    if phi.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: phi.dim(),
        });
    }
    let lo = phi.n_min();
    let third = (len / 3) as i64;
    let bounds = [(lo, lo + third), (lo + third, lo + 2 * third), (lo + 2 * third, phi.n_max() + 1)];
    let residual = |n: i64| -> f64 {
        phi.at(n)
            .iter()
            .zip(p.eval(n))
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
    };
    let mut thirds_sup = [0.0; 3];
    for (k, (a, b)) in bounds.iter().enumerate() {
        thirds_sup[k] = (*a..*b).map(residual).fold(0.0, f64::max);
    }
    let decreasing = thirds_sup
        .windows(2)
        .all(|w| w[1] < w[0] || (w[0] == 0.0 && w[1] == 0.0));
    let final_residual = residual(phi.n_max());
    let verdict = if decreasing && final_residual < decay_tol {
        SplitVerdict::Pass
    } else {
        SplitVerdict::Fail
    };
    Ok(SplitReport {
        window: (lo, phi.n_max()),
        thirds_sup,
        final_residual,
        decay_tol,
        verdict,
    })
}
