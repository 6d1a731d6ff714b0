//! Sums `Σ ln|sin 2π(x + k a/2)|` over a full set of residues, with the
//! smallest term removed.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::arithmetic::ContinuedFractionExpansion;
use crate::cocycle::orbit_point;
use crate::error::{Error, Result};
use crate::hp::HpContext;

/// Sines below this are treated as vanishing.
pub const SINE_FLOOR: f64 = 1e-15;

const LN_2: f64 = std::f64::consts::LN_2;

/// `|sin πy|` with `y` reduced to `[0, 1/2]` first.
fn abs_sin_pi(y: f64) -> f64 {
    let r = y.rem_euclid(1.0);
    let r = r.min(1.0 - r);
    (std::f64::consts::PI * r).sin()
}

/// `Σ_{k≠k0} ln s_k` with `k0` the first index of the smallest `s_k`.
/// `s` is indexed from 1 in the reports, so `k0` is returned 1-based.
fn sum_excluding_min(s: &[f64]) -> Result<(f64, usize)> {
    if s.is_empty() {
        return Ok((0.0, 0));
    }
    let mut k0 = 0;
    for (i, v) in s.iter().enumerate() {
        if *v < s[k0] {
            k0 = i;
        }
    }
    let mut sum = 0.0;
    for (i, v) in s.iter().enumerate() {
        if i == k0 {
            continue;
        }
        if *v < SINE_FLOOR {
            return Err(Error::DegenerateNode { index: i + 1 });
        }
        sum += v.ln();
    }
    Ok((sum, k0 + 1))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub p: i64,
    pub q: u64,
    pub sum: f64,
    pub expected: f64,
    pub deviation: f64,
}

/// `Σ_{k=1}^{q−1} ln|sin πkp/q|` against `−(q−1) ln 2 + ln q`.
pub fn sine_identity(p: i64, q: u64) -> Result<IdentityCheck> {
    check_coprime(p, q)?;
    let qi = q as i64;
    let sum: f64 = (1..qi)
        .map(|k| {
            let j = (k * p).rem_euclid(qi);
            let j = j.min(qi - j);
            (std::f64::consts::PI * j as f64 / q as f64).sin().ln()
        })
        .sum();
    let expected = -(q as f64 - 1.0) * LN_2 + (q as f64).ln();
    Ok(IdentityCheck { p, q, sum, expected, deviation: (sum - expected).abs() })
}

/// [`sine_identity`] carried out at `bits` bits; the deviation is the
/// high-precision difference rounded to a double.
pub fn sine_identity_hp(p: i64, q: u64, bits: usize) -> Result<IdentityCheck> {
    check_coprime(p, q)?;
    let mut ctx = HpContext::new(bits);
    let pi = ctx.pi();
    let qf = ctx.i64(q as i64);
    let mut sum = ctx.i64(0);
    let qi = q as i64;
    for k in 1..qi {
        let j = (k * p).rem_euclid(qi);
        let arg = ctx.div(&ctx.mul(&pi, &ctx.i64(j.min(qi - j))), &qf);
        let s = ctx.sin(&arg);
        let l = ctx.ln(&s);
        sum = ctx.add(&sum, &l);
    }
    let ln2 = ctx.ln2();
    let lnq = ctx.ln(&qf);
    let expected = ctx.sub(&lnq, &ctx.mul(&ctx.i64(qi - 1), &ln2));
    let diff = ctx.sub(&sum, &expected);
    Ok(IdentityCheck {
        p,
        q,
        sum: ctx.to_f64(&sum),
        expected: ctx.to_f64(&expected),
        deviation: ctx.to_f64(&diff).abs(),
    })
}

fn check_coprime(p: i64, q: u64) -> Result<()> {
    if q == 0 {
        return Err(Error::InvalidParameter("q must be positive".into()));
    }
    if p.unsigned_abs().gcd(&q) != 1 {
        return Err(Error::InvalidParameter(format!("{p}/{q} is not reduced")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalSum {
    pub x: f64,
    pub p: i64,
    pub q: u64,
    /// 1-based index of the excluded smallest term.
    pub k0: usize,
    pub sum_excluding_min: f64,
    /// `sum_excluding_min + (q − 1) ln 2`.
    pub normalized: f64,
    pub lower: f64,
    pub upper: f64,
    pub lower_pass: bool,
    pub upper_pass: bool,
}

impl RationalSum {
    pub fn bounds_pass(&self) -> bool {
        self.lower_pass && self.upper_pass
    }
}

fn rational_report(x: f64, p: i64, q: u64, sum: f64, k0: usize) -> RationalSum {
    let normalized = sum + (q as f64 - 1.0) * LN_2;
    let lower = (q as f64).ln() + (2.0 / std::f64::consts::PI).ln();
    let upper = (q as f64).ln();
    // one ulp of slack per term on the upper bound, which is attained
    let slack = 4.0 * f64::EPSILON * q as f64 * upper.abs().max(1.0);
    RationalSum {
        x,
        p,
        q,
        k0,
        sum_excluding_min: sum,
        normalized,
        lower,
        upper,
        lower_pass: lower < normalized,
        upper_pass: normalized <= upper + slack,
    }
}

/// `Σ_{k=1, k≠k0}^{q} ln|sin 2π(x + kp/2q)|` and the two-sided bound
/// `ln q + ln(2/π) < Σ + (q − 1) ln 2 ≤ ln q`. Ties for the minimum go to the
/// lowest index.
pub fn log_sin_sum_rational(x: f64, p: i64, q: u64) -> Result<RationalSum> {
    check_coprime(p, q)?;
    if !x.is_finite() {
        return Err(Error::InvalidParameter("x must be finite".into()));
    }
    let two_q = 2 * q as i64;
    let two_x = (2.0 * x).rem_euclid(1.0);
    let s: Vec<f64> = (1..=q as i64)
        .map(|k| {
            let j = (k * p).rem_euclid(two_q) as f64 / q as f64;
            abs_sin_pi(two_x + j)
        })
        .collect();
    let (sum, k0) = sum_excluding_min(&s)?;
    Ok(rational_report(x, p, q, sum, k0))
}

/// [`log_sin_sum_rational`] at `bits` bits of working precision; `x` is
/// taken as the exact value of the double.
pub fn log_sin_sum_rational_hp(x: f64, p: i64, q: u64, bits: usize) -> Result<RationalSum> {
    check_coprime(p, q)?;
    if !x.is_finite() {
        return Err(Error::InvalidParameter("x must be finite".into()));
    }
    let mut ctx = HpContext::new(bits);
    let pi = ctx.pi();
    let two_q = 2 * q as i64;
    let two_x = ctx.f64((2.0 * x).rem_euclid(1.0));
    let qf = ctx.i64(q as i64);
    let mut terms = Vec::with_capacity(q as usize);
    for k in 1..=q as i64 {
        let j = (k * p).rem_euclid(two_q);
        let y = ctx.add(&two_x, &ctx.div(&ctx.i64(j), &qf));
        // |sin πy| = sin π‖y‖
        let r = ctx.torus_norm(&y);
        let s = ctx.sin(&ctx.mul(&pi, &r));
        terms.push(s);
    }
    let mut k0 = 0;
    for i in 1..terms.len() {
        if terms[i] < terms[k0] {
            k0 = i;
        }
    }
    let floor = ctx.f64(SINE_FLOOR);
    let mut sum = ctx.i64(0);
    for (i, t) in terms.iter().enumerate() {
        if i == k0 {
            continue;
        }
        if *t < floor {
            return Err(Error::DegenerateNode { index: i + 1 });
        }
        let l = ctx.ln(t);
        sum = ctx.add(&sum, &l);
    }
    let sum = ctx.to_f64(&sum);
    Ok(rational_report(x, p, q, sum, k0 + 1))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrrationalSum {
    pub x: f64,
    pub n: usize,
    pub q_n: u64,
    pub k0: usize,
    pub sum_excluding_min: f64,
    /// `|Σ + (q_n − 1) ln 2|`.
    pub deviation: f64,
    /// `deviation / ln q_n`; zero when `q_n = 1`.
    pub empirical_c: f64,
}

fn denominator(cf: &ContinuedFractionExpansion, n: usize) -> Result<u64> {
    if n >= cf.len() {
        return Err(Error::ScaleOutOfRange { k: n as u64, largest_scale: cf.len() as f64 });
    }
    cf.q(n).to_u64().ok_or_else(|| Error::InvalidParameter(format!("q_{n} does not fit in 64 bits")))
}

fn irrational_report(x: f64, n: usize, q_n: u64, s: &[f64]) -> Result<IrrationalSum> {
    let (sum, k0) = sum_excluding_min(s)?;
    let deviation = (sum + (q_n as f64 - 1.0) * LN_2).abs();
    let lnq = (q_n as f64).ln();
    Ok(IrrationalSum {
        x,
        n,
        q_n,
        k0,
        sum_excluding_min: sum,
        deviation,
        empirical_c: if q_n > 1 { deviation / lnq } else { 0.0 },
    })
}

/// `Σ_{k=1, k≠k0}^{q_n} ln|sin 2π(x + kα/2)|` and its distance from
/// `−(q_n − 1) ln 2`, with `α` the value of `cf`.
pub fn log_sin_sum_irrational(x: f64, cf: &ContinuedFractionExpansion, n: usize) -> Result<IrrationalSum> {
    let q_n = denominator(cf, n)?;
    let alpha = cf.value_f64();
    let two_x = (2.0 * x).rem_euclid(1.0);
    let s: Vec<f64> = (1..=q_n as i64).map(|k| abs_sin_pi(orbit_point(two_x, alpha, k))).collect();
    irrational_report(x, n, q_n, &s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftedSum {
    pub base: IrrationalSum,
    pub r: usize,
    pub ell: u64,
    /// `ln q_n + C (Δ_n + (ℓ − 1) Δ_r) q_n ln q_n` at the supplied `C`.
    pub bound: f64,
    pub c: f64,
    pub pass: bool,
    /// Smallest `C` that makes the bound hold.
    pub empirical_c: f64,
}

/// The shifted sum `Σ_{k≠k0} ln|sin 2π(x + (k + ℓ_k q_r)α/2)|` against
/// `ln q_n + C(Δ_n + (ℓ − 1)Δ_r) q_n ln q_n`. Requires `r ≥ n`,
/// `ℓ < q_{r+1}/(10 q_n)` and `|ℓ_k| ≤ ℓ − 1`.
pub fn shifted_sum_check(
    x: f64,
    cf: &ContinuedFractionExpansion,
    n: usize,
    r: usize,
    ell: u64,
    ell_ks: &[i64],
    c: f64,
) -> Result<ShiftedSum> {
    if r < n {
        return Err(Error::PreconditionViolated(format!("r = {r} < n = {n}")));
    }
    if r + 1 >= cf.len() {
        return Err(Error::ScaleOutOfRange { k: r as u64 + 1, largest_scale: cf.len() as f64 });
    }
    let q_n = denominator(cf, n)?;
    if ell == 0 {
        return Err(Error::PreconditionViolated("ℓ must be positive".into()));
    }
    if BigInt::from(10u32) * ell * cf.q(n) >= *cf.q(r + 1) {
        return Err(Error::PreconditionViolated(format!("ℓ = {ell} is not below q_{{r+1}}/(10 q_n)")));
    }
    if ell_ks.len() as u64 != q_n {
        return Err(Error::InvalidParameter(format!("need {q_n} shifts, got {}", ell_ks.len())));
    }
    if let Some(bad) = ell_ks.iter().find(|l| l.unsigned_abs() + 1 > ell) {
        return Err(Error::PreconditionViolated(format!("|ℓ_k| = {} exceeds ℓ − 1", bad.unsigned_abs())));
    }
    let q_r = denominator(cf, r)? as i64;
    let alpha = cf.value_f64();
    let two_x = (2.0 * x).rem_euclid(1.0);
    let s: Vec<f64> = ell_ks
        .iter()
        .enumerate()
        .map(|(i, &l)| abs_sin_pi(orbit_point(two_x, alpha, i as i64 + 1 + l * q_r)))
        .collect();
    let base = irrational_report(x, n, q_n, &s)?;
    let delta_n = cf.error_f64(n).unwrap_or(0.0);
    let delta_r = cf.error_f64(r).unwrap_or(0.0);
    let lnq = (q_n as f64).ln();
    let scale = (delta_n + (ell as f64 - 1.0) * delta_r) * q_n as f64 * lnq;
    let bound = lnq + c * scale;
    let empirical_c = if base.deviation <= lnq {
        0.0
    } else if scale > 0.0 {
        (base.deviation - lnq) / scale
    } else {
        f64::INFINITY
    };
    Ok(ShiftedSum { pass: base.deviation < bound, base, r, ell, bound, c, empirical_c })
}

/// Partial sum `−ln 2 − Σ_{k=1}^{n} cos(kx)/k` of the Fourier series of
/// `ln|sin(x/2)|`.
pub fn ln_sin_partial_sum(x: f64, n: u64) -> f64 {
    -LN_2 - (1..=n).map(|k| (k as f64 * x).cos() / k as f64).sum::<f64>()
}
