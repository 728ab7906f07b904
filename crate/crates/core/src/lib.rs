//! Calculus and almost-periodicity analysis on the quantum time scale
//! `q^Z ∪ {0}`, its exact log-index equivalent `Z ∪ {-∞_q}`, and a
//! contraction-mapping solver for high-order Hopfield networks posed on it.
//!
//! Module map:
//!
//! - [`qlattice`]: jump operators, graininess, q-derivative, delta integral,
//!   time-scale exponential and a discrete Gronwall checker.
//! - [`logmap`]: lifting between `q^Z` samples and log-index samples, and the
//!   `(q-1)q^n` right-hand-side transform.
//! - [`apgen`]: closed-form quasi-periodic generators and the
//!   ε-translation-set analyzer (unweighted and `q^τ`-weighted).
//! - [`dynamics`]: exact forward stepping of delayed difference equations and
//!   Lyapunov/stability verification.
//! - [`hopfield`]: contraction certificate and Picard solver for the
//!   high-order Hopfield network.
//!
//! Every finite computation here works on an explicit index window; reports
//! always carry the window they were computed on.

// NaN must fail bounds checks, so `!(x <= b)` is used on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod apgen;
pub mod dynamics;
pub mod error;
pub mod hopfield;
pub mod logmap;
pub mod qlattice;
pub mod samples;
pub mod tol;

pub use error::{Error, Result};
pub use logmap::{LogIndex, LogSignal};
pub use qlattice::{GridFunction, QLattice};
pub use samples::Samples;
pub use tol::Tolerance;
