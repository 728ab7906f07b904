//! High-order Hopfield network on the quantum time scale, in its log form
//!
//! ```text
//! Δx_i(n) = -ĉ_i(n)x_i(n) + Σ_j â_ij(n) f_j(x_j(n-γ_ij(n)))
//!         + Σ_{j,l} b̂_ijl(n) g_j(x_j(n-ω_ijl(n))) g_l(x_l(n-v_ijl(n))) + Î_i(n)
//! ```
//!
//! where the hatted coefficients already carry the `(q-1)q^n` factor. The
//! almost periodic solution is the fixed point of
//!
//! ```text
//! Φ(φ)_i(n) = Σ_{s<n} ∏_{u=s+1}^{n-1} (1 - ĉ_i(u)) · G_i(s; φ)
//! ```
//!
//! which is a contraction on the ball `‖φ‖ ≤ r0` whenever the
//! [`ContractionCertificate`] is feasible. The infinite past is truncated
//! after `T_tail` terms with a geometric tail bound.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::apgen::ApGenerator;
use crate::dynamics::{DelayFn, DynamicSystem};
use crate::error::{Error, Result};
use crate::logmap::{lower, LogSignal};
use crate::qlattice::{qpow, GridFunction};
use crate::samples::Samples;

/// Integer-valued delay sequence: a constant, or a periodic table indexed by
/// `n mod len`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IntGen {
    Const(usize),
    Periodic { periodic: Vec<usize> },
}

impl Default for IntGen {
    fn default() -> Self {
        IntGen::Const(0)
    }
}

impl IntGen {
    pub fn at(&self, n: i64) -> usize {
        match self {
            IntGen::Const(d) => *d,
            IntGen::Periodic { periodic } => {
                let len = periodic.len() as i64;
                periodic[n.rem_euclid(len) as usize]
            }
        }
    }

    pub fn max(&self) -> usize {
        match self {
            IntGen::Const(d) => *d,
            IntGen::Periodic { periodic } => periodic.iter().copied().max().unwrap_or(0),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            IntGen::Periodic { periodic } if periodic.is_empty() => {
                Err(Error::Malformed("empty periodic delay table".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Piecewise-linear table through `(xs[k], ys[k])`, constant outside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

impl Table {
    fn validate(&self) -> Result<()> {
        if self.xs.is_empty() || self.xs.len() != self.ys.len() {
            return Err(Error::Malformed("activation table needs matching, nonempty xs and ys".into()));
        }
        if self.xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Malformed("activation table xs must be strictly increasing".into()));
        }
        if self.xs.iter().chain(&self.ys).any(|v| !v.is_finite()) {
            return Err(Error::Malformed("non-finite activation table entry".into()));
        }
        Ok(())
    }

    pub fn eval(&self, u: f64) -> f64 {
        let n = self.xs.len();
        if u <= self.xs[0] {
            return self.ys[0];
        }
        if u >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        let k = self.xs.partition_point(|&x| x <= u);
        let (x0, x1) = (self.xs[k - 1], self.xs[k]);
        let (y0, y1) = (self.ys[k - 1], self.ys[k]);
        y0 + (y1 - y0) * (u - x0) / (x1 - x0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActivationKind {
    Tanh,
    CustomTable,
}

/// Activation pair `(f_j, g_j)` with declared Lipschitz constants, the bound
/// `|g_j| ≤ N_j` and the values at zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Activation {
    pub kind: ActivationKind,
    /// Table for `f` (and for `g` unless `g_table` is given); custom-table only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Table>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_table: Option<Table>,
    pub lip_f: f64,
    pub lip_g: f64,
    #[serde(rename = "N")]
    pub bound_g: f64,
    pub f0: f64,
    pub g0: f64,
}

impl Activation {
    pub fn tanh() -> Self {
        Self {
            kind: ActivationKind::Tanh,
            table: None,
            g_table: None,
            lip_f: 1.0,
            lip_g: 1.0,
            bound_g: 1.0,
            f0: 0.0,
            g0: 0.0,
        }
    }

    pub fn f(&self, u: f64) -> f64 {
        match self.kind {
            ActivationKind::Tanh => u.tanh(),
            ActivationKind::CustomTable => self.table.as_ref().map_or(0.0, |t| t.eval(u)),
        }
    }

    pub fn g(&self, u: f64) -> f64 {
        match self.kind {
            ActivationKind::Tanh => u.tanh(),
            ActivationKind::CustomTable => self
                .g_table
                .as_ref()
                .or(self.table.as_ref())
                .map_or(0.0, |t| t.eval(u)),
        }
    }

    fn validate(&self, j: usize) -> Result<()> {
        if self.kind == ActivationKind::CustomTable {
            let table = self.table.as_ref().ok_or_else(|| {
                Error::Malformed(format!("activation {j}: custom-table needs a table"))
            })?;
            table.validate()?;
            if let Some(g) = &self.g_table {
                g.validate()?;
            }
        }
        for (name, v) in [("lip_f", self.lip_f), ("lip_g", self.lip_g), ("N", self.bound_g)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "activation {j}: {name} must be finite and nonnegative"
                )));
            }
        }
        if (self.f(0.0) - self.f0).abs() > 1e-12 || (self.g(0.0) - self.g0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "activation {j}: declared f0/g0 do not match the activation at 0"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Delays {
    #[serde(default)]
    pub gamma: Vec<Vec<IntGen>>,
    #[serde(default)]
    pub omega: Vec<Vec<Vec<IntGen>>>,
    #[serde(default)]
    pub v: Vec<Vec<Vec<IntGen>>>,
}

/// Network coefficients (scalar generators on the log index), activations
/// and delays. Empty delay tables mean zero delays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HopfieldDoc", into = "HopfieldDoc")]
pub struct HopfieldSpec {
    m: usize,
    q: f64,
    c_hat: Vec<ApGenerator>,
    a_hat: Vec<Vec<ApGenerator>>,
    b_hat: Vec<Vec<Vec<ApGenerator>>>,
    i_hat: Vec<ApGenerator>,
    activations: Vec<Activation>,
    delays: Delays,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HopfieldDoc {
    pub m: usize,
    pub q: f64,
    pub c_hat: Vec<ApGenerator>,
    pub a_hat: Vec<Vec<ApGenerator>>,
    pub b_hat: Vec<Vec<Vec<ApGenerator>>>,
    #[serde(rename = "I_hat")]
    pub i_hat: Vec<ApGenerator>,
    pub activations: Vec<Activation>,
    #[serde(default)]
    pub delays: Delays,
}

impl TryFrom<HopfieldDoc> for HopfieldSpec {
    type Error = Error;

    fn try_from(d: HopfieldDoc) -> Result<Self> {
        HopfieldSpec::new(d.m, d.q, d.c_hat, d.a_hat, d.b_hat, d.i_hat, d.activations, d.delays)
    }
}

impl From<HopfieldSpec> for HopfieldDoc {
    fn from(s: HopfieldSpec) -> Self {
        Self {
            m: s.m,
            q: s.q,
            c_hat: s.c_hat,
            a_hat: s.a_hat,
            b_hat: s.b_hat,
            i_hat: s.i_hat,
            activations: s.activations,
            delays: s.delays,
        }
    }
}

fn check_len(what: &str, found: usize, m: usize) -> Result<()> {
    if found != m {
        return Err(Error::Malformed(format!("{what}: expected {m} entries, found {found}")));
    }
    Ok(())
}

fn check_scalar(what: &str, g: &ApGenerator) -> Result<()> {
    if g.dim() != 1 {
        return Err(Error::Malformed(format!("{what}: coefficient generators must be scalar")));
    }
    Ok(())
}

impl HopfieldSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        m: usize,
        q: f64,
        c_hat: Vec<ApGenerator>,
        a_hat: Vec<Vec<ApGenerator>>,
        b_hat: Vec<Vec<Vec<ApGenerator>>>,
        i_hat: Vec<ApGenerator>,
        activations: Vec<Activation>,
        mut delays: Delays,
    ) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("network needs at least one neuron".into()));
        }
        if !(q.is_finite() && q > 1.0) {
            return Err(Error::InvalidParameter(format!("base q must exceed 1, got {q}")));
        }
        check_len("c_hat", c_hat.len(), m)?;
        check_len("I_hat", i_hat.len(), m)?;
        check_len("activations", activations.len(), m)?;
        check_len("a_hat", a_hat.len(), m)?;
        check_len("b_hat", b_hat.len(), m)?;
        for g in c_hat.iter().chain(&i_hat) {
            check_scalar("c_hat/I_hat", g)?;
        }
        for row in &a_hat {
            check_len("a_hat row", row.len(), m)?;
            for g in row {
                check_scalar("a_hat", g)?;
            }
        }
        for plane in &b_hat {
            check_len("b_hat plane", plane.len(), m)?;
            for row in plane {
                check_len("b_hat row", row.len(), m)?;
                for g in row {
                    check_scalar("b_hat", g)?;
                }
            }
        }
        for (j, a) in activations.iter().enumerate() {
            a.validate(j)?;
        }
        if delays.gamma.is_empty() {
            delays.gamma = vec![vec![IntGen::default(); m]; m];
        }
        if delays.omega.is_empty() {
            delays.omega = vec![vec![vec![IntGen::default(); m]; m]; m];
        }
        if delays.v.is_empty() {
            delays.v = vec![vec![vec![IntGen::default(); m]; m]; m];
        }
        check_len("gamma", delays.gamma.len(), m)?;
        for row in &delays.gamma {
            check_len("gamma row", row.len(), m)?;
            for d in row {
                d.validate()?;
            }
        }
        for cube in [&delays.omega, &delays.v] {
            check_len("omega/v", cube.len(), m)?;
            for plane in cube {
                check_len("omega/v plane", plane.len(), m)?;
                for row in plane {
                    check_len("omega/v row", row.len(), m)?;
                    for d in row {
                        d.validate()?;
                    }
                }
            }
        }
        Ok(Self {
            m,
            q,
            c_hat,
            a_hat,
            b_hat,
            i_hat,
            activations,
            delays,
        })
    }

    /// Network with constant coefficients and zero delays.
    pub fn constant(
        q: f64,
        c: &[f64],
        a: &[Vec<f64>],
        b: &[Vec<Vec<f64>>],
        input: &[f64],
        activations: Vec<Activation>,
    ) -> Result<Self> {
        let g = ApGenerator::constant;
        Self::new(
            c.len(),
            q,
            c.iter().map(|&v| g(v)).collect(),
            a.iter().map(|r| r.iter().map(|&v| g(v)).collect()).collect(),
            b.iter()
                .map(|p| p.iter().map(|r| r.iter().map(|&v| g(v)).collect()).collect())
                .collect(),
            input.iter().map(|&v| g(v)).collect(),
            activations,
            Delays::default(),
        )
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn activations(&self) -> &[Activation] {
        &self.activations
    }

    pub fn c_hat(&self) -> &[ApGenerator] {
        &self.c_hat
    }

    pub fn i_hat(&self) -> &[ApGenerator] {
        &self.i_hat
    }

    /// Largest delay appearing anywhere in the network.
    pub fn max_delay(&self) -> usize {
        let g = self.delays.gamma.iter().flatten().map(IntGen::max);
        let o = self.delays.omega.iter().flatten().flatten().map(IntGen::max);
        let v = self.delays.v.iter().flatten().flatten().map(IntGen::max);
        g.chain(o).chain(v).max().unwrap_or(0)
    }

    /// `G_i(s)` reading `φ` through `value(j, index)`.
    fn drive(&self, coeffs: &CoeffRow<'_>, s: i64, value: &impl Fn(usize, i64) -> f64, out: &mut [f64]) {
        let m = self.m;
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = coeffs.input[i];
            for j in 0..m {
                let d = self.delays.gamma[i][j].at(s) as i64;
                acc += coeffs.a[i * m + j] * self.activations[j].f(value(j, s - d));
            }
            for j in 0..m {
                for l in 0..m {
                    let b = coeffs.b[(i * m + j) * m + l];
                    if b == 0.0 {
                        continue;
                    }
                    let dw = self.delays.omega[i][j][l].at(s) as i64;
                    let dv = self.delays.v[i][j][l].at(s) as i64;
                    acc += b
                        * self.activations[j].g(value(j, s - dw))
                        * self.activations[l].g(value(l, s - dv));
                }
            }
            *o = acc;
        }
    }

    /// The network as a log-scale [`DynamicSystem`]. Delays are passed to
    /// the right-hand side in the order `γ_ij`, `ω_ijl`, `v_ijl` (row-major).
    pub fn as_system(&self) -> DynamicSystem {
        let spec = Arc::new(self.clone());
        let m = self.m;
        let mut delays: Vec<DelayFn> = Vec::new();
        for i in 0..m {
            for j in 0..m {
                let d = self.delays.gamma[i][j].clone();
                delays.push(Box::new(move |n| d.at(n)));
            }
        }
        for cube in [&self.delays.omega, &self.delays.v] {
            for i in 0..m {
                for j in 0..m {
                    for l in 0..m {
                        let d = cube[i][j][l].clone();
                        delays.push(Box::new(move |n| d.at(n)));
                    }
                }
            }
        }
        let rhs = move |n: i64, x: &[f64], delayed: &[&[f64]]| -> std::result::Result<Vec<f64>, String> {
            let m = spec.m;
            let mut out = vec![0.0; m];
            for (i, o) in out.iter_mut().enumerate() {
                let mut acc = -spec.c_hat[i].eval_component(0, n) * x[i] + spec.i_hat[i].eval_component(0, n);
                for j in 0..m {
                    let xd = delayed[i * m + j][j];
                    acc += spec.a_hat[i][j].eval_component(0, n) * spec.activations[j].f(xd);
                }
                for j in 0..m {
                    for l in 0..m {
                        let w = delayed[m * m + (i * m + j) * m + l][j];
                        let v = delayed[m * m + m * m * m + (i * m + j) * m + l][l];
                        acc += spec.b_hat[i][j][l].eval_component(0, n)
                            * spec.activations[j].g(w)
                            * spec.activations[l].g(v);
                    }
                }
                *o = acc;
            }
            Ok(out)
        };
        DynamicSystem::new(m, rhs).with_delays(delays, self.max_delay())
    }
}

/// Coefficient values at one index.
struct CoeffRow<'a> {
    input: &'a [f64],
    a: &'a [f64],
    b: &'a [f64],
}

/// Coefficient tables over a contiguous index range.
struct CoeffTables {
    lo: i64,
    m: usize,
    c: Vec<f64>,
    input: Vec<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl CoeffTables {
    /// Evaluates every generator on `[lo, hi]` and checks `0 < ĉ_i(n) < 1`.
    fn build(spec: &HopfieldSpec, lo: i64, hi: i64) -> Result<Self> {
        let m = spec.m;
        let len = (hi - lo + 1) as usize;
        let mut t = CoeffTables {
            lo,
            m,
            c: Vec::with_capacity(len * m),
            input: Vec::with_capacity(len * m),
            a: Vec::with_capacity(len * m * m),
            b: Vec::with_capacity(len * m * m * m),
        };
        for n in lo..=hi {
            for i in 0..m {
                let c = spec.c_hat[i].eval_component(0, n);
                if !(c > 0.0 && 1.0 - c > 0.0) {
                    return Err(Error::DecayRegressivity {
                        neuron: i,
                        index: n,
                        value: c,
                    });
                }
                t.c.push(c);
                t.input.push(spec.i_hat[i].eval_component(0, n));
                for j in 0..m {
                    t.a.push(spec.a_hat[i][j].eval_component(0, n));
                    for l in 0..m {
                        t.b.push(spec.b_hat[i][j][l].eval_component(0, n));
                    }
                }
            }
        }
        Ok(t)
    }

    fn c(&self, i: usize, n: i64) -> f64 {
        self.c[(n - self.lo) as usize * self.m + i]
    }

    fn row(&self, n: i64) -> CoeffRow<'_> {
        let k = (n - self.lo) as usize;
        let m = self.m;
        CoeffRow {
            input: &self.input[k * m..(k + 1) * m],
            a: &self.a[k * m * m..(k + 1) * m * m],
            b: &self.b[k * m * m * m..(k + 1) * m * m * m],
        }
    }
}

/// Feasible values of `r0` for the ball inequality, `[lo, hi]` with `hi =
/// None` for an unbounded interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct R0Interval {
    pub lo: f64,
    pub hi: Option<f64>,
}

impl R0Interval {
    pub fn contains(&self, r0: f64) -> bool {
        r0 >= self.lo && self.hi.is_none_or(|h| r0 <= h)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionCertificate {
    pub window: (i64, i64),
    pub r0: f64,
    /// Analytic lower bound `offset - Σ|amp|` of each `ĉ_i`.
    pub c_minus: Vec<f64>,
    /// Minimum of each `ĉ_i` over the window (≥ `c_minus`).
    pub c_minus_window: Vec<f64>,
    pub c_plus: Vec<f64>,
    pub a_plus: Vec<Vec<f64>>,
    pub b_plus: Vec<Vec<Vec<f64>>>,
    pub i_plus: Vec<f64>,
    pub eta: Vec<f64>,
    pub eta_bar: Vec<f64>,
    /// Input bound `max_i Î⁺_i / ĉ⁻_i`.
    pub input_bound: f64,
    /// `max_i η_i/ĉ⁻_i + L`, compared against `r0`.
    pub ball_bound: f64,
    /// `max η̄ / min ĉ⁻`.
    pub ratio: f64,
    pub ball_condition: bool,
    pub contraction_condition: bool,
    pub feasible: bool,
    pub feasible_r0: Option<R0Interval>,
}

/// Coefficients of `η_i(r) = α_i + β_i r + γ_i r²`.
fn eta_polynomial(spec: &HopfieldSpec, a_plus: &[Vec<f64>], b_plus: &[Vec<Vec<f64>>], i: usize) -> (f64, f64, f64) {
    let act = &spec.activations;
    let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
    for j in 0..spec.m {
        let (f0, ef) = (act[j].f0.abs(), act[j].lip_f);
        let (g0, eg) = (act[j].g0.abs(), act[j].lip_g);
        // Σ_l b⁺_ijl(|g_l(0)| + ε_l r) = s0 + s1 r
        let mut s0 = 0.0;
        let mut s1 = 0.0;
        for l in 0..spec.m {
            s0 += b_plus[i][j][l] * act[l].g0.abs();
            s1 += b_plus[i][j][l] * act[l].lip_g;
        }
        // a⁺(|f0| + ε r) + (|g0| + ε_j r)(s0 + s1 r)
        alpha += a_plus[i][j] * f0 + g0 * s0;
        beta += a_plus[i][j] * ef + g0 * s1 + eg * s0;
        gamma += eg * s1;
    }
    (alpha, beta, gamma)
}

/// Builds the contraction certificate for radius `r0`.
///
/// Coefficient bounds come from generator amplitudes, so the certificate is
/// window-independent apart from the regressivity scan and the reported
/// window minima.
pub fn certificate(spec: &HopfieldSpec, r0: f64, window: (i64, i64)) -> Result<ContractionCertificate> {
    if !(r0.is_finite() && r0 > 0.0) {
        return Err(Error::InvalidParameter(format!("r0 must be positive, got {r0}")));
    }
    if window.0 > window.1 {
        return Err(Error::InvalidParameter("empty window".into()));
    }
    let m = spec.m;
    let mut c_minus = Vec::with_capacity(m);
    let mut c_minus_window = Vec::with_capacity(m);
    let mut c_plus = Vec::with_capacity(m);
    for i in 0..m {
        let mut wmin = f64::INFINITY;
        for n in window.0..=window.1 {
            let c = spec.c_hat[i].eval_component(0, n);
            if !(c > 0.0 && 1.0 - c > 0.0) {
                return Err(Error::DecayRegressivity {
                    neuron: i,
                    index: n,
                    value: c,
                });
            }
            wmin = wmin.min(c);
        }
        let lower = spec.c_hat[i].inf_bound(0);
        if !(lower > 0.0) {
            return Err(Error::DecayNotPositive { neuron: i, bound: lower });
        }
        c_minus.push(lower);
        c_minus_window.push(wmin);
        c_plus.push(spec.c_hat[i].upper_bound(0));
    }
    let a_plus: Vec<Vec<f64>> = spec
        .a_hat
        .iter()
        .map(|r| r.iter().map(|g| g.sup_bound(0)).collect())
        .collect();
    let b_plus: Vec<Vec<Vec<f64>>> = spec
        .b_hat
        .iter()
        .map(|p| p.iter().map(|r| r.iter().map(|g| g.sup_bound(0)).collect()).collect())
        .collect();
    let i_plus: Vec<f64> = spec.i_hat.iter().map(|g| g.sup_bound(0)).collect();

    let act = &spec.activations;
    let mut eta = Vec::with_capacity(m);
    let mut eta_bar = Vec::with_capacity(m);
    for i in 0..m {
        let (al, be, ga) = eta_polynomial(spec, &a_plus, &b_plus, i);
        eta.push(al + be * r0 + ga * r0 * r0);
        let mut eb = 0.0;
        for j in 0..m {
            eb += a_plus[i][j] * act[j].lip_f;
            for l in 0..m {
                eb += b_plus[i][j][l] * (act[l].bound_g * act[j].lip_g + act[j].bound_g * act[l].lip_g);
            }
        }
        eta_bar.push(eb);
    }
    let input_bound = (0..m).map(|i| i_plus[i] / c_minus[i]).fold(0.0, f64::max);
    let ball_bound = (0..m).map(|i| eta[i] / c_minus[i]).fold(0.0, f64::max) + input_bound;
    let max_eta_bar = eta_bar.iter().copied().fold(0.0, f64::max);
    let min_c = c_minus.iter().copied().fold(f64::INFINITY, f64::min);
    let ratio = max_eta_bar / min_c;
    let ball_condition = ball_bound <= r0;
    let contraction_condition = max_eta_bar < min_c;
    let feasible_r0 = feasible_r0_interval_with(spec, &c_minus, &a_plus, &b_plus, input_bound);
    Ok(ContractionCertificate {
        window,
        r0,
        c_minus,
        c_minus_window,
        c_plus,
        a_plus,
        b_plus,
        i_plus,
        eta,
        eta_bar,
        input_bound,
        ball_bound,
        ratio,
        ball_condition,
        contraction_condition,
        feasible: ball_condition && contraction_condition,
        feasible_r0,
    })
}

/// Set of `r > 0` with `A r² + B r + C ≤ 0`, as `(lo, hi)`; `hi = ∞` when
/// unbounded.
fn quadratic_le_zero(a: f64, b: f64, c: f64) -> Option<(f64, f64)> {
    if a > 0.0 {
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            return None;
        }
        let sq = disc.sqrt();
        // Stable root pair.
        let t = -0.5 * (b + b.signum() * sq);
        let (r1, r2) = if t == 0.0 {
            (0.0, 0.0)
        } else {
            let (x, y) = (t / a, c / t);
            (x.min(y), x.max(y))
        };
        if r2 <= 0.0 {
            return None;
        }
        Some((r1.max(0.0), r2))
    } else if b < 0.0 {
        Some(((-c / b).max(0.0), f64::INFINITY))
    } else if b == 0.0 {
        (c <= 0.0).then_some((0.0, f64::INFINITY))
    } else {
        let hi = -c / b;
        (hi > 0.0).then_some((0.0, hi))
    }
}

fn feasible_r0_interval_with(
    spec: &HopfieldSpec,
    c_minus: &[f64],
    a_plus: &[Vec<f64>],
    b_plus: &[Vec<Vec<f64>>],
    input_bound: f64,
) -> Option<R0Interval> {
    let mut lo = 0.0_f64;
    let mut hi = f64::INFINITY;
    for i in 0..spec.m {
        let (al, be, ga) = eta_polynomial(spec, a_plus, b_plus, i);
        let c = c_minus[i];
        let (l, h) = quadratic_le_zero(ga / c, be / c - 1.0, al / c + input_bound)?;
        lo = lo.max(l);
        hi = hi.min(h);
    }
    (lo <= hi).then_some(R0Interval {
        lo,
        hi: hi.is_finite().then_some(hi),
    })
}

/// Exact feasible interval of the ball inequality `max_i η_i(r0)/ĉ⁻_i + L ≤ r0`.
pub fn feasible_r0_interval(spec: &HopfieldSpec) -> Result<Option<R0Interval>> {
    // Any r0 and a one-point window give the analytic quantities.
    Ok(certificate(spec, 1.0, (0, 0))?.feasible_r0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub r0: f64,
    pub feasible: bool,
}

/// Evaluates the certificate on `points` log-spaced radii in `[1e-3, 1e3]`.
pub fn r0_grid_scan(spec: &HopfieldSpec, window: (i64, i64), points: usize) -> Result<Vec<GridPoint>> {
    let points = points.max(2);
    (0..points)
        .map(|k| {
            let r0 = 10f64.powf(-3.0 + 6.0 * k as f64 / (points - 1) as f64);
            let cert = certificate(spec, r0, window)?;
            Ok(GridPoint {
                r0,
                feasible: cert.feasible,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpotCheckReport {
    pub seed: u64,
    pub samples: usize,
    /// `(activation index, u, v)` where a declared Lipschitz bound failed.
    pub h1_violations: Vec<(usize, f64, f64)>,
    /// `(activation index, u)` where `|g(u)| > N`.
    pub h2_violations: Vec<(usize, f64)>,
    pub pass: bool,
}

/// Samples activation pairs in `[-radius, radius]` and checks the declared
/// Lipschitz constants and the bound on `g`.
pub fn spot_check(spec: &HopfieldSpec, seed: u64, samples: usize, radius: f64) -> SpotCheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h1 = Vec::new();
    let mut h2 = Vec::new();
    for (j, act) in spec.activations.iter().enumerate() {
        for _ in 0..samples {
            let u: f64 = rng.gen_range(-radius..=radius);
            let v: f64 = rng.gen_range(-radius..=radius);
            let slack = 1e-12 * (1.0 + (u - v).abs());
            let df = (act.f(u) - act.f(v)).abs();
            let dg = (act.g(u) - act.g(v)).abs();
            if df > act.lip_f * (u - v).abs() + slack || dg > act.lip_g * (u - v).abs() + slack {
                h1.push((j, u, v));
            }
            if act.g(u).abs() > act.bound_g + 1e-12 {
                h2.push((j, u));
            }
        }
    }
    SpotCheckReport {
        seed,
        samples,
        pass: h1.is_empty() && h2.is_empty(),
        h1_violations: h1,
        h2_violations: h2,
    }
}

/// Everything `hopfield check` reports: the certificate at `r0`, the exact
/// feasible interval, a grid scan of `r0` and the activation spot checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub certificate: ContractionCertificate,
    pub feasible_r0: Option<R0Interval>,
    pub grid_scan: Vec<GridPoint>,
    pub spot_check: SpotCheckReport,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckOptions {
    pub grid_points: usize,
    pub seed: u64,
    pub spot_samples: usize,
    pub spot_radius: f64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            grid_points: 61,
            seed: 0,
            spot_samples: 1000,
            spot_radius: 10.0,
        }
    }
}

pub fn check_report(spec: &HopfieldSpec, r0: f64, window: (i64, i64), opts: &CheckOptions) -> Result<CheckReport> {
    let cert = certificate(spec, r0, window)?;
    Ok(CheckReport {
        feasible_r0: cert.feasible_r0,
        grid_scan: r0_grid_scan(spec, window, opts.grid_points)?,
        spot_check: spot_check(spec, opts.seed, opts.spot_samples, opts.spot_radius),
        certificate: cert,
    })
}

/// Number of kernel terms `T_tail` such that the dropped part of the
/// infinite-past sum is at most `tail_tol`.
pub fn tail_length(cert: &ContractionCertificate, tail_tol: f64) -> Result<usize> {
    if !(tail_tol > 0.0) {
        return Err(Error::InvalidParameter("tail_tol must be positive".into()));
    }
    let c = cert
        .c_minus
        .iter()
        .zip(&cert.c_minus_window)
        .map(|(a, b)| a.max(*b))
        .fold(f64::INFINITY, f64::min);
    let g_bound = cert
        .eta
        .iter()
        .zip(&cert.i_plus)
        .map(|(e, i)| e + i)
        .fold(0.0, f64::max);
    if g_bound == 0.0 {
        return Ok(1);
    }
    let t = ((tail_tol * c / g_bound).ln() / (1.0 - c).ln()).ceil();
    Ok(if t.is_finite() && t > 1.0 { t as usize } else { 1 })
}

/// `Φ(φ)` on `[out_lo, out_hi]`, reading `φ` on `[out_lo - T - D, out_hi - 1]`.
fn apply_phi(
    spec: &HopfieldSpec,
    tables: &CoeffTables,
    phi: &Samples,
    out_lo: i64,
    out_hi: i64,
    t_tail: usize,
) -> Result<Samples> {
    let m = spec.m;
    let t = t_tail as i64;
    let s_lo = out_lo - t;
    let s_hi = out_hi - 1;
    let value = |j: usize, k: i64| phi.at(k)[j];
    let mut drive = vec![0.0; ((s_hi - s_lo + 1).max(0) as usize) * m];
    for s in s_lo..=s_hi {
        let k = (s - s_lo) as usize * m;
        spec.drive(&tables.row(s), s, &value, &mut drive[k..k + m]);
    }
    let mut data = Vec::with_capacity(((out_hi - out_lo + 1) as usize) * m);
    for n in out_lo..=out_hi {
        for i in 0..m {
            let mut acc = 0.0;
            let mut kernel = 1.0;
            for s in (n - t..n).rev() {
                acc += kernel * drive[(s - s_lo) as usize * m + i];
                kernel *= 1.0 - tables.c(i, s);
            }
            data.push(acc);
        }
    }
    Samples::new(out_lo, out_hi, m, data)
}

/// One application of `Φ` on `window`, truncating the past at `T_tail`
/// terms. `phi` must cover `[window.0 - T_tail - max_delay, window.1 - 1]`
/// and lie in the ball of radius `r0` (up to `tail_tol`).
pub fn phi_apply(
    phi: &LogSignal,
    spec: &HopfieldSpec,
    cert: &ContractionCertificate,
    window: (i64, i64),
    tail_tol: f64,
) -> Result<LogSignal> {
    if !cert.feasible {
        return Err(Error::Infeasible(Box::new(cert.clone())));
    }
    if phi.dim() != spec.m {
        return Err(Error::DimensionMismatch {
            expected: spec.m,
            found: phi.dim(),
        });
    }
    let t_tail = tail_length(cert, tail_tol)?;
    let need_lo = window.0 - t_tail as i64 - spec.max_delay() as i64;
    let need_hi = window.1 - 1;
    let used = phi.samples().restrict(need_lo, need_hi.max(need_lo))?;
    if used.sup_norm() > cert.r0 + tail_tol {
        return Err(Error::InvalidParameter(format!(
            "phi leaves the ball: sup {} > r0 {}",
            used.sup_norm(),
            cert.r0
        )));
    }
    let tables = CoeffTables::build(spec, window.0 - t_tail as i64, window.1)?;
    Ok(LogSignal::new(apply_phi(spec, &tables, &used, window.0, window.1, t_tail)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PicardConfig {
    pub r0: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub window: (i64, i64),
    pub tail_tol: f64,
    /// Constant starting value `φ₀`; zeros when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<Vec<f64>>,
}

impl PicardConfig {
    pub fn new(r0: f64, window: (i64, i64)) -> Self {
        Self {
            r0,
            tol: 1e-11,
            max_iter: 1000,
            window,
            tail_tol: 1e-12,
            start: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceLog {
    /// `‖φ_{k+1} - φ_k‖` over the domain of `φ_{k+1}`.
    pub deltas: Vec<f64>,
    /// `‖φ_{k+1}‖`.
    pub norms: Vec<f64>,
    pub ratio: f64,
    pub t_tail: usize,
    pub planned_iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PicardSolution {
    /// Solution on `[window.0 - max_delay, window.1 + 1]`.
    pub solution: LogSignal,
    pub log: ConvergenceLog,
    pub certificate: ContractionCertificate,
    /// Reported constant `C = 1 + max ĉ⁺ + max η̄` of the residual bound
    /// `C·(tol + tail_tol)`.
    pub residual_constant: f64,
}

/// Iterates `φ_{k+1} = Φ(φ_k)` from a constant start until
/// `‖φ_{k+1} - φ_k‖ < tol`.
///
/// Iterates are exact Picard iterates of the truncated operator on all of
/// `Z`: each one is computed on a domain that shrinks by `T_tail + max_delay`
/// per step, so no boundary value is ever invented. The initial domain is
/// sized from the certificate ratio.
pub fn picard_solve(spec: &HopfieldSpec, cfg: &PicardConfig) -> Result<PicardSolution> {
    let cert = certificate(spec, cfg.r0, cfg.window)?;
    if !cert.feasible {
        return Err(Error::Infeasible(Box::new(cert)));
    }
    if !(cfg.tol > 0.0) || cfg.max_iter == 0 {
        return Err(Error::InvalidParameter("tol and max_iter must be positive".into()));
    }
    let m = spec.m;
    let start = cfg.start.clone().unwrap_or_else(|| vec![0.0; m]);
    if start.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: start.len(),
        });
    }
    let t_tail = tail_length(&cert, cfg.tail_tol)?;
    let d = spec.max_delay() as i64;
    let step = t_tail as i64 + d;
    let out_lo = cfg.window.0 - d;
    let out_hi = cfg.window.1 + 1;

    let start_norm = crate::samples::max_norm(&start);
    let delta0_bound = start_norm + cfg.r0 + cfg.tail_tol;
    let planned = if cert.ratio == 0.0 || delta0_bound < cfg.tol {
        2
    } else {
        let k = ((cfg.tol / delta0_bound).ln() / cert.ratio.ln()).ceil();
        if k.is_finite() && k > 0.0 {
            k as usize + 5
        } else {
            2
        }
    }
    .min(cfg.max_iter);

    let lo0 = out_lo - planned as i64 * step;
    let tables = CoeffTables::build(spec, lo0, out_hi)?;
    let mut phi = Samples::from_fn(lo0, out_hi, m, |_| start.clone())?;
    let mut log = ConvergenceLog {
        deltas: Vec::new(),
        norms: Vec::new(),
        ratio: cert.ratio,
        t_tail,
        planned_iterations: planned,
        converged: false,
    };
    for k in 0..planned {
        let lo = out_lo - (planned - k - 1) as i64 * step;
        let next = apply_phi(spec, &tables, &phi, lo, out_hi, t_tail)?;
        let delta = next.sup_distance(&phi)?;
        log.deltas.push(delta);
        log.norms.push(next.sup_norm());
        phi = next;
        if !delta.is_finite() {
            return Err(Error::Divergence { index: lo });
        }
        if delta < cfg.tol {
            log.converged = true;
            break;
        }
    }
    if !log.converged {
        return Err(Error::NotConverged(Box::new(log)));
    }
    let solution = LogSignal::new(phi.restrict(out_lo, out_hi)?);
    let max_c_plus = cert.c_plus.iter().copied().fold(0.0, f64::max);
    let max_eta_bar = cert.eta_bar.iter().copied().fold(0.0, f64::max);
    Ok(PicardSolution {
        solution,
        log,
        residual_constant: 1.0 + max_c_plus + max_eta_bar,
        certificate: cert,
    })
}

/// `sup_{i, n ∈ window} |Δx_i(n) - RHS_i(n)|`; `sol` must cover
/// `[window.0 - max_delay, window.1 + 1]`.
pub fn residual(sol: &LogSignal, spec: &HopfieldSpec, window: (i64, i64)) -> Result<f64> {
    Ok(residuals(sol, spec, window)?.into_iter().fold(0.0, f64::max))
}

/// Per-index `max_i |Δx_i(n) - RHS_i(n)|` over the window.
pub fn residuals(sol: &LogSignal, spec: &HopfieldSpec, window: (i64, i64)) -> Result<Vec<f64>> {
    let m = spec.m;
    if sol.dim() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: sol.dim(),
        });
    }
    let s = sol.samples();
    s.restrict(window.0 - spec.max_delay() as i64, window.1 + 1)?;
    let tables = CoeffTables::build(spec, window.0, window.1)?;
    let value = |j: usize, k: i64| s.at(k)[j];
    let mut drive = vec![0.0; m];
    let mut out = Vec::with_capacity((window.1 - window.0 + 1) as usize);
    for n in window.0..=window.1 {
        spec.drive(&tables.row(n), n, &value, &mut drive);
        let mut worst = 0.0_f64;
        for i in 0..m {
            let x = s.at(n)[i];
            let dx = s.at(n + 1)[i] - x;
            let rhs = -tables.c(i, n) * x + drive[i];
            worst = worst.max((dx - rhs).abs());
        }
        out.push(worst);
    }
    Ok(out)
}

/// Lowers a log-scale solution to the quantum scale.
pub fn back_to_quantum(sol: &LogSignal, q: f64) -> Result<GridFunction> {
    lower(sol, q)
}

/// Per-index residual of the quantum-scale network
/// `D_q x_i(t) = -c_i(t)x_i(t) + … + I_i(t)`, where each quantum coefficient
/// is the hatted one divided by `(q-1)t`.
pub fn quantum_residuals(x: &GridFunction, spec: &HopfieldSpec, window: (i64, i64)) -> Result<Vec<f64>> {
    let m = spec.m;
    let q = x.lattice().q();
    let s = x.samples();
    s.restrict(window.0 - spec.max_delay() as i64, window.1 + 1)?;
    let tables = CoeffTables::build(spec, window.0, window.1)?;
    let value = |j: usize, k: i64| s.at(k)[j];
    let mut drive = vec![0.0; m];
    let mut out = Vec::with_capacity((window.1 - window.0 + 1) as usize);
    for n in window.0..=window.1 {
        let scale = (q - 1.0) * qpow(q, n);
        spec.drive(&tables.row(n), n, &value, &mut drive);
        let mut worst = 0.0_f64;
        for i in 0..m {
            let xi = s.at(n)[i];
            let dq = (s.at(n + 1)[i] - xi) / scale;
            let rhs = -(tables.c(i, n) / scale) * xi + drive[i] / scale;
            worst = worst.max((dq - rhs).abs());
        }
        out.push(worst);
    }
    Ok(out)
}
