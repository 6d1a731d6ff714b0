//! Numerical toolkit for the almost Mathieu operator
//!
//! ```text
//! (H u)_n = u_{n+1} + u_{n-1} + 2 λ cos 2π(θ + nα) u_n
//! ```
//!
//! and the Schrödinger cocycles attached to it: continued fractions and
//! resonance bookkeeping, transfer-matrix products, Lyapunov exponents,
//! fibered rotation numbers, exact band structure for rational frequencies,
//! m-functions and the small-divisor cohomological equation, finite-volume
//! localization diagnostics, trigonometric-product estimates, and Aubry
//! duality checks.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arithmetic;
pub mod cocycle;
pub mod duality;
pub mod error;
pub mod fourier;
pub mod hp;
pub mod linalg;
pub mod localization;
pub mod mfunction;
pub mod spectrum;
pub mod trig;

pub use error::{Error, Result};

/// The inverse golden mean (√5 − 1)/2.
pub const GOLDEN: f64 = 0.618_033_988_749_894_8;
