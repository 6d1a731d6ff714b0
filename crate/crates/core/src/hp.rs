//! Thin helpers over `astro-float` for the few places that need more than
//! double precision (convergent errors, trigonometric-product identities).

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::{BigInt, Sign};
use num_rational::BigRational;

pub const DEFAULT_PRECISION_BITS: usize = 256;

const RM: RoundingMode = RoundingMode::ToEven;

/// Working context: precision in bits plus the constants cache.
pub struct HpContext {
    pub bits: usize,
    consts: Consts,
}

impl std::fmt::Debug for HpContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HpContext").field("bits", &self.bits).finish()
    }
}

impl HpContext {
    pub fn new(bits: usize) -> Self {
        Self { bits: bits.max(64), consts: Consts::new().expect("astro-float constants cache") }
    }

    pub fn int(&self, n: &BigInt) -> BigFloat {
        // Exact when the integer fits in the working precision.
        let bits = (n.bits() as usize).max(self.bits);
        let (sign, mag) = n.to_bytes_be();
        let mut hex = String::with_capacity(2 * mag.len() + 1);
        if sign == Sign::Minus {
            hex.push('-');
        }
        for byte in &mag {
            hex.push_str(&format!("{byte:02x}"));
        }
        if mag.is_empty() {
            hex.push('0');
        }
        let mut cc = Consts::new().expect("astro-float constants cache");
        BigFloat::parse(&hex, Radix::Hex, bits + 64, RM, &mut cc)
    }

    pub fn rational(&self, r: &BigRational) -> BigFloat {
        self.int(r.numer()).div(&self.int(r.denom()), self.bits, RM)
    }

    pub fn f64(&self, x: f64) -> BigFloat {
        BigFloat::from_f64(x, self.bits)
    }

    pub fn i64(&self, x: i64) -> BigFloat {
        BigFloat::from_i64(x, self.bits)
    }

    pub fn pi(&mut self) -> BigFloat {
        self.consts.pi(self.bits, RM)
    }

    pub fn ln2(&mut self) -> BigFloat {
        self.consts.ln_2(self.bits, RM)
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.bits, RM)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.bits, RM)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.bits, RM)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.bits, RM)
    }

    pub fn sin(&mut self, a: &BigFloat) -> BigFloat {
        a.sin(self.bits, RM, &mut self.consts)
    }

    pub fn ln(&mut self, a: &BigFloat) -> BigFloat {
        a.ln(self.bits, RM, &mut self.consts)
    }

    /// Distance to the nearest integer.
    pub fn torus_norm(&self, a: &BigFloat) -> BigFloat {
        let half = BigFloat::from_f64(0.5, self.bits);
        let shifted = a.add(&half, self.bits, RM);
        let nearest = shifted.floor();
        let d = a.sub(&nearest, self.bits, RM);
        d.abs()
    }

    pub fn to_f64(&mut self, a: &BigFloat) -> f64 {
        to_f64(a, &mut self.consts)
    }
}

/// Decimal round trip; adequate for reporting, not for further arithmetic.
pub fn to_f64(a: &BigFloat, cc: &mut Consts) -> f64 {
    if a.is_zero() {
        return 0.0;
    }
    if a.is_nan() {
        return f64::NAN;
    }
    if a.is_inf_pos() {
        return f64::INFINITY;
    }
    if a.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    let mut b = a.clone();
    // 128 bits rounds correctly to 53 and keeps formatting cheap.
    let _ = b.set_precision(128, RM);
    match b.format(Radix::Dec, RM, cc) {
        Ok(s) => s.parse::<f64>().unwrap_or(f64::NAN),
        Err(_) => f64::NAN,
    }
}

/// Natural logarithm of a (possibly enormous) positive integer, in f64.
pub fn ln_bigint(n: &BigInt) -> f64 {
    debug_assert!(n.sign() == Sign::Plus);
    let bits = n.bits();
    if bits <= 1000 {
        let f: f64 = num_traits::ToPrimitive::to_f64(n).unwrap_or(f64::INFINITY);
        if f.is_finite() {
            return f.ln();
        }
    }
    let shift = bits - 64;
    let top: BigInt = n >> shift;
    let top = num_traits::ToPrimitive::to_f64(&top).unwrap_or(f64::NAN);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_conversion_is_exact() {
        let mut ctx = HpContext::new(256);
        let n = BigInt::parse_bytes(b"123456789012345678901234567890", 10).unwrap();
        let f = ctx.int(&n);
        let back = ctx.to_f64(&f);
        assert!((back - 1.2345678901234568e29).abs() / 1e29 < 1e-15);
        let neg = ctx.int(&BigInt::from(-42));
        assert_eq!(ctx.to_f64(&neg), -42.0);
    }

    #[test]
    fn transcendental_sanity() {
        let mut ctx = HpContext::new(256);
        let pi = ctx.pi();
        let half_pi = ctx.div(&pi, &ctx.i64(2));
        let s = ctx.sin(&half_pi);
        assert!((ctx.to_f64(&s) - 1.0).abs() < 1e-15);
        let ln2 = ctx.ln2();
        assert!((ctx.to_f64(&ln2) - std::f64::consts::LN_2).abs() < 1e-16);
        let t = ctx.torus_norm(&ctx.f64(2.75));
        assert_eq!(ctx.to_f64(&t), 0.25);
    }

    #[test]
    fn ln_of_huge_integers() {
        let n = BigInt::from(1u8) << 5000usize;
        assert!((ln_bigint(&n) - 5000.0 * std::f64::consts::LN_2).abs() < 1e-9);
        assert!((ln_bigint(&BigInt::from(89)) - 89f64.ln()).abs() < 1e-15);
    }
}
