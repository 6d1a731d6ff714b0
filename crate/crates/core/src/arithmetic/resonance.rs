//! Resonance bookkeeping for sites `k` against the denominators `q_n`.
//!
//! The scale of a site is the `n` with `b_n < k ≤ b_{n+1}` where
//! `b_n = max{q_n^{8/9}, q_{n-1}/20}`; the site is resonant when some
//! multiple `ℓ q_n`, `ℓ ≥ 1`, lies within `b_n` of it. All comparisons against
//! `b_n` are done in exact integer arithmetic (`d ≤ q^{8/9}` iff `d⁹ ≤ q⁸`).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::expansion::ContinuedFractionExpansion;
use crate::error::{Error, Result};
use crate::hp::ln_bigint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Resonance {
    Resonant,
    NonResonant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceReport {
    pub k: u64,
    pub n: usize,
    pub q_n: u64,
    pub b_n: f64,
    /// The minimizing `ℓ ≥ 1`.
    pub multiple: u64,
    pub nearest_multiple_distance: u64,
    pub classification: Resonance,
}

/// `x ≤ b_n` for an integer `x ≥ 0`, exactly.
fn le_scale(x: &BigInt, q_n: &BigInt, q_nm1: &BigInt) -> bool {
    x.pow(9) <= q_n.pow(8) || x * 20u32 <= *q_nm1
}

/// `b_n` as a double, for reporting.
pub fn scale_b(cf: &ContinuedFractionExpansion, n: usize) -> f64 {
    let q_nm1 = if n == 0 { 0.0 } else { cf.q(n - 1).to_f64().unwrap_or(f64::INFINITY) };
    let pow = (8.0 / 9.0 * ln_bigint(cf.q(n))).exp();
    pow.max(q_nm1 / 20.0)
}

fn q_prev(cf: &ContinuedFractionExpansion, n: usize) -> BigInt {
    if n == 0 {
        BigInt::zero()
    } else {
        cf.q(n - 1).clone()
    }
}

/// Classification of `k` against the fixed scale `n`.
pub fn classify_resonance_at(k: u64, cf: &ContinuedFractionExpansion, n: usize) -> Result<ResonanceReport> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    if n >= cf.len() {
        return Err(Error::ScaleOutOfRange { k, largest_scale: scale_b(cf, cf.len() - 1) });
    }
    let q_n = cf.q(n).clone();
    let kb = BigInt::from(k);
    let (ell, rem) = kb.div_rem(&q_n);
    // Nearest multiple among ℓ ≥ 1.
    let (multiple, dist) = if ell.is_zero() {
        (BigInt::one(), &q_n - &kb)
    } else if &rem * 2u32 > q_n {
        (&ell + 1u32, &q_n - &rem)
    } else {
        (ell, rem)
    };
    let classification =
        if le_scale(&dist.abs(), &q_n, &q_prev(cf, n)) { Resonance::Resonant } else { Resonance::NonResonant };
    Ok(ResonanceReport {
        k,
        n,
        q_n: q_n.to_u64().unwrap_or(u64::MAX),
        b_n: scale_b(cf, n),
        multiple: multiple.to_u64().unwrap_or(u64::MAX),
        nearest_multiple_distance: dist.abs().to_u64().unwrap_or(u64::MAX),
        classification,
    })
}

/// Finds the scale `n` with `b_n < k ≤ b_{n+1}` and classifies `k` there.
pub fn classify_resonance(k: u64, cf: &ContinuedFractionExpansion) -> Result<ResonanceReport> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    let kb = BigInt::from(k);
    for n in 0..cf.len().saturating_sub(1) {
        let below = !le_scale(&kb, cf.q(n), &q_prev(cf, n));
        let within = le_scale(&kb, cf.q(n + 1), cf.q(n));
        if below && within {
            return classify_resonance_at(k, cf, n);
        }
    }
    Err(Error::ScaleOutOfRange { k, largest_scale: scale_b(cf, cf.len() - 1) })
}
