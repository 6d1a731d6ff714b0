//! Inputs to the continued-fraction expander.
//!
//! Accepted textual forms (see [`RealInput::from_str`]):
//!
//! * `2/7`, `-3/4`, `5` : exact rationals
//! * `3.14159265` : decimal constant, known to ±½ unit in the last digit
//! * `surd:P,Q,D,R` : the quadratic irrational (P + Q√D)/R
//! * `golden`, `silver`, `sqrt2`, `pi` : named constants
//! * `cf:a0;a1,a2,...` : an irrational whose expansion starts with the given
//!   partial quotients and whose tail is unknown

use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// π to 100 decimal places.
pub const PI_100: &str =
    "3.1415926535897932384626433832795028841971693993751058209749445923078164062862089986280348253421170679";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RealInput {
    Rational(BigRational),
    /// (p + q√d)/r with d > 0 not a perfect square and r ≠ 0.
    Surd {
        p: BigInt,
        q: BigInt,
        d: BigInt,
        r: BigInt,
    },
    /// A real known only to lie in the closed interval [lo, hi].
    Interval {
        lo: BigRational,
        hi: BigRational,
    },
    /// Leading partial quotients `[a0; a1, a2, ...]` of an irrational.
    Terms {
        a0: BigInt,
        terms: Vec<BigInt>,
    },
}

impl RealInput {
    pub fn rational(p: i64, q: i64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidParameter("zero denominator".into()));
        }
        Ok(Self::Rational(BigRational::new(p.into(), q.into())))
    }

    pub fn golden() -> Self {
        Self::Surd { p: BigInt::from(-1), q: BigInt::one(), d: BigInt::from(5), r: BigInt::from(2) }
    }

    pub fn surd(p: i64, q: i64, d: i64, r: i64) -> Result<Self> {
        Self::surd_big(p.into(), q.into(), d.into(), r.into())
    }

    pub fn surd_big(p: BigInt, q: BigInt, d: BigInt, r: BigInt) -> Result<Self> {
        if r.is_zero() {
            return Err(Error::InvalidParameter("surd denominator is zero".into()));
        }
        if d.is_negative() {
            return Err(Error::InvalidParameter("surd radicand is negative".into()));
        }
        let s = d.sqrt();
        if &s * &s == d || q.is_zero() {
            // Degenerates to a rational.
            return Ok(Self::Rational(BigRational::new(p + q * s, r)));
        }
        Ok(Self::Surd { p, q, d, r })
    }

    /// The exact rational value of an `f64`, widened by half an ulp on each side.
    pub fn from_f64(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::InvalidParameter(format!("non-finite input {x}")));
        }
        let exact = BigRational::from_float(x).expect("finite float");
        let ulp = if x == 0.0 { f64::MIN_POSITIVE } else { (x.abs().next_up() - x.abs()).max(f64::MIN_POSITIVE) };
        let half = BigRational::from_float(ulp / 2.0).expect("finite ulp");
        Ok(Self::Interval { lo: &exact - &half, hi: &exact + &half })
    }

    /// The exact value of an `f64`, no widening.
    pub fn exact_f64(x: f64) -> Result<Self> {
        BigRational::from_float(x)
            .map(Self::Rational)
            .ok_or_else(|| Error::InvalidParameter(format!("non-finite input {x}")))
    }

    pub fn from_terms(a0: i64, terms: &[u64]) -> Self {
        Self::Terms { a0: a0.into(), terms: terms.iter().map(|&a| BigInt::from(a)).collect() }
    }

    pub fn is_exact_rational(&self) -> bool {
        matches!(self, Self::Rational(_))
    }

    /// Midpoint approximation, for display and double-precision consumers.
    pub fn approx_f64(&self) -> f64 {
        match self {
            Self::Rational(r) => ratio_f64(r),
            Self::Interval { lo, hi } => ratio_f64(&((lo + hi) / BigRational::from_integer(2.into()))),
            Self::Surd { p, q, d, r } => {
                (p.to_f64().unwrap_or(f64::NAN)
                    + q.to_f64().unwrap_or(f64::NAN) * d.to_f64().unwrap_or(f64::NAN).sqrt())
                    / r.to_f64().unwrap_or(f64::NAN)
            }
            Self::Terms { a0, terms } => {
                let mut x = 0.0;
                for a in terms.iter().rev() {
                    x = 1.0 / (a.to_f64().unwrap_or(f64::INFINITY) + x);
                }
                a0.to_f64().unwrap_or(f64::NAN) + x
            }
        }
    }
}

pub(crate) fn ratio_f64(r: &BigRational) -> f64 {
    // to_f64 on BigRational overflows for large numerators; scale by bits.
    let n = r.numer();
    let d = r.denom();
    if n.is_zero() {
        return 0.0;
    }
    let nb = n.bits() as i64;
    let db = d.bits() as i64;
    let shift = 60 - (nb - db);
    let scaled = if shift >= 0 { (n << shift as usize) / d } else { n / (d << (-shift) as usize) };
    scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(-(shift.clamp(-1_000_000, 1_000_000) as i32))
}

fn parse_int(s: &str) -> Result<BigInt> {
    let t = s.trim();
    if t.is_empty() || t.len() > 10_000 {
        return Err(Error::Parse(format!("bad integer {s:?}")));
    }
    BigInt::from_str(t).map_err(|_| Error::Parse(format!("bad integer {s:?}")))
}

fn parse_decimal(s: &str) -> Result<RealInput> {
    let t = s.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::Parse(format!("bad decimal {s:?}")));
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse(format!("bad decimal {s:?}")));
    }
    if body.len() > 10_000 {
        return Err(Error::Parse("decimal too long".into()));
    }
    let digits = format!("{int_part}{frac_part}");
    let mut mant = BigInt::from_str(if digits.is_empty() { "0" } else { &digits })
        .map_err(|_| Error::Parse(format!("bad decimal {s:?}")))?;
    if neg {
        mant = -mant;
    }
    let scale = BigInt::from(10u8).pow(frac_part.len() as u32);
    let centre = BigRational::new(mant, scale.clone());
    if frac_part.is_empty() {
        return Ok(RealInput::Rational(centre));
    }
    let half_unit = BigRational::new(BigInt::one(), scale * 2);
    Ok(RealInput::Interval { lo: &centre - &half_unit, hi: &centre + &half_unit })
}

impl FromStr for RealInput {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t {
            "golden" => return Ok(Self::golden()),
            "silver" => return Self::surd(-1, 1, 2, 1),
            "sqrt2" => return Self::surd(0, 1, 2, 1),
            "pi" => return parse_decimal(PI_100),
            _ => {}
        }
        if let Some(rest) = t.strip_prefix("surd:") {
            let parts: Vec<&str> = rest.split(',').collect();
            if parts.len() != 4 {
                return Err(Error::Parse(format!("surd needs P,Q,D,R: {s:?}")));
            }
            let v = parts.iter().map(|p| parse_int(p)).collect::<Result<Vec<_>>>()?;
            return Self::surd_big(v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone());
        }
        if let Some(rest) = t.strip_prefix("cf:") {
            let (head, tail) = rest.split_once(';').unwrap_or((rest, ""));
            let a0 = parse_int(head)?;
            let terms = if tail.trim().is_empty() {
                Vec::new()
            } else {
                tail.split(',').map(parse_int).collect::<Result<Vec<_>>>()?
            };
            if terms.iter().any(|a| a.sign() != Sign::Plus) {
                return Err(Error::Parse("partial quotients must be positive".into()));
            }
            return Ok(Self::Terms { a0, terms });
        }
        if let Some((n, d)) = t.split_once('/') {
            let n = parse_int(n)?;
            let d = parse_int(d)?;
            if d.is_zero() {
                return Err(Error::Parse("zero denominator".into()));
            }
            return Ok(Self::Rational(BigRational::new(n, d)));
        }
        parse_decimal(t)
    }
}

/// floor((P + √D)/Q) for non-square D > 0, Q ≠ 0.
pub(crate) fn surd_floor(p: &BigInt, d: &BigInt, q: &BigInt) -> BigInt {
    let s = d.sqrt();
    if q.is_positive() {
        (p + &s).div_floor(q)
    } else {
        let qa = -q;
        -((p + &s).div_floor(&qa) + BigInt::one())
    }
}
