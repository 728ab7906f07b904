use thiserror::Error;

use crate::hopfield::{ContractionCertificate, ConvergenceLog};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("index {index} outside window [{n_min}, {n_max}]")]
    OutOfWindow { index: i64, n_min: i64, n_max: i64 },

    #[error("index {0} has no successor inside the window")]
    NeedsSuccessor(i64),

    #[error("value at t = 0 is undefined: no right limit was supplied")]
    UndefinedAtZero,

    #[error("reversed integration bounds: {a} > {b}")]
    ReversedBounds { a: i64, b: i64 },

    #[error("lower bound -inf_q requires a lattice that includes 0")]
    ZeroNotIncluded,

    #[error("not regressive at index {index}: 1 + mu*p = {factor}")]
    NotRegressive { index: i64, factor: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value at index {index}")]
    NonFinite { index: i64 },

    #[error("malformed samples: {0}")]
    Malformed(String),

    #[error("shifted window does not overlap the stored window")]
    EmptyOverlap,

    #[error("insufficient samples: missing index range [{missing_lo}, {missing_hi}]")]
    InsufficientSamples { missing_lo: i64, missing_hi: i64 },

    #[error("window too short: {len} samples, need at least {min}")]
    WindowTooShort { len: usize, min: usize },

    #[error("index {index} exceeds the |n| <= {limit} overflow guard")]
    OverflowGuard { index: i64, limit: i64 },

    #[error("delayed lookup at index {index} precedes the history start")]
    MissingHistory { index: i64 },

    #[error("trajectory diverged: non-finite state at index {index}")]
    Divergence { index: i64 },

    #[error("right-hand side failed at index {index}: {message}")]
    Rhs { index: i64, message: String },

    #[error("reference is not a trajectory: residual {residual:e} exceeds {tol:e}")]
    NotATrajectory { residual: f64, tol: f64 },

    #[error("neuron {neuron}: decay coefficient violates positive regressivity at index {index} (c = {value})")]
    DecayRegressivity { neuron: usize, index: i64, value: f64 },

    #[error("neuron {neuron}: inf of decay coefficient is not positive (lower bound {bound})")]
    DecayNotPositive { neuron: usize, bound: f64 },

    #[error("contraction certificate is infeasible")]
    Infeasible(Box<ContractionCertificate>),

    #[error("Picard iteration did not converge in {} iterations", .0.deltas.len())]
    NotConverged(Box<ConvergenceLog>),
}
