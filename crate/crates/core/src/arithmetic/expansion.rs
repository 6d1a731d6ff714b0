use astro_float::BigFloat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::real::{ratio_f64, surd_floor, RealInput};
use crate::error::{Error, Result};
use crate::hp::{ln_bigint, HpContext};

/// Why the expansion stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    /// The input is rational and the expansion is complete.
    Exact,
    /// `max_terms` partial quotients were produced.
    MaxTerms,
    /// The next partial quotient could not be certified from the input.
    PrecisionExhausted,
}

/// Certified enclosure of Δ_n = |q_n α − p_n|.
#[derive(Debug, Clone)]
pub struct ErrorBound {
    pub lo: BigFloat,
    pub hi: BigFloat,
}

/// Partial quotients `a_0, a_1, ...` (with `a_n ≥ 1` for `n ≥ 1`), the exact
/// convergents `p_n/q_n`, and enclosures of the errors `Δ_n`.
#[derive(Debug, Clone)]
pub struct ContinuedFractionExpansion {
    pub input: RealInput,
    pub partial_quotients: Vec<BigInt>,
    pub convergents: Vec<(BigInt, BigInt)>,
    /// `errors[n]` encloses Δ_n; may be one shorter than `convergents` when
    /// the tail beyond the last certified term is unknown.
    pub errors: Vec<ErrorBound>,
    pub precision_bits: usize,
    pub termination: Termination,
}

/// Complete quotient of the expansion at the current step.
enum Quotient {
    Exact(BigRational),
    /// (P + √D)/Q with Q | D − P².
    Surd {
        p: BigInt,
        q: BigInt,
        d: BigInt,
    },
    Interval {
        lo: BigRational,
        hi: Option<BigRational>,
    },
    Terms {
        next: usize,
    },
}

fn floor_rat(r: &BigRational) -> BigInt {
    r.numer().div_floor(r.denom())
}

/// Rational enclosure of √d using `bits` fractional bits.
fn sqrt_bounds(d: &BigInt, bits: usize) -> (BigRational, BigRational) {
    let scale = BigInt::one() << bits;
    let s = (d * &scale * &scale).sqrt();
    let lo = BigRational::new(s.clone(), scale.clone());
    let hi = BigRational::new(s + 1, scale);
    (lo, hi)
}

/// Evaluates `[a_start; a_{start+1}, ..., a_end, tail]`, `tail = None` meaning ∞.
fn eval_terms(terms: &[BigInt], tail: Option<&BigRational>) -> BigRational {
    let mut x: Option<BigRational> = tail.cloned();
    for a in terms.iter().rev() {
        let a = BigRational::from_integer(a.clone());
        x = Some(match x {
            None => a,
            Some(t) => a + t.recip(),
        });
    }
    x.expect("non-empty term list")
}

impl ContinuedFractionExpansion {
    /// Expands `x` into at most `max_terms` partial quotients (counting `a_0`).
    pub fn expand(x: &RealInput, max_terms: usize, precision_bits: usize) -> Result<Self> {
        if max_terms == 0 {
            return Err(Error::InvalidParameter("max_terms must be at least 1".into()));
        }
        let bits = precision_bits.max(64);
        let mut quotient = match x {
            RealInput::Rational(r) => Quotient::Exact(r.clone()),
            RealInput::Surd { p, q, d, r } => {
                let (mut p, mut q, mut r) = (p.clone(), q.clone(), r.clone());
                if q.is_negative() {
                    p = -p;
                    q = -q;
                    r = -r;
                }
                let mut dd = &q * &q * d;
                let (mut pp, mut qq) = (p, r);
                if !(&dd - &pp * &pp).is_multiple_of(&qq) {
                    let qa = qq.abs();
                    pp *= &qa;
                    dd *= &qq * &qq;
                    qq *= &qa;
                }
                Quotient::Surd { p: pp, q: qq, d: dd }
            }
            RealInput::Interval { lo, hi } => {
                if lo > hi {
                    return Err(Error::InvalidParameter("interval with lo > hi".into()));
                }
                if lo == hi {
                    Quotient::Exact(lo.clone())
                } else {
                    Quotient::Interval { lo: lo.clone(), hi: Some(hi.clone()) }
                }
            }
            RealInput::Terms { terms, .. } => {
                if terms.iter().any(|a| !a.is_positive()) {
                    return Err(Error::InvalidParameter("partial quotients must be positive".into()));
                }
                Quotient::Terms { next: 0 }
            }
        };

        let all_terms: Vec<BigInt> = match x {
            RealInput::Terms { a0, terms } => std::iter::once(a0.clone()).chain(terms.iter().cloned()).collect(),
            _ => Vec::new(),
        };

        let ctx = HpContext::new(bits);
        let mut pqs: Vec<BigInt> = Vec::new();
        let mut convergents: Vec<(BigInt, BigInt)> = Vec::new();
        let mut errors = Vec::new();
        let (mut p_prev, mut q_prev) = (BigInt::zero(), BigInt::one());
        let mut termination = Termination::MaxTerms;

        while pqs.len() < max_terms {
            // Certify the next partial quotient.
            let a = match &quotient {
                Quotient::Exact(r) => floor_rat(r),
                Quotient::Surd { p, q, d } => surd_floor(p, d, q),
                Quotient::Interval { lo, hi } => {
                    let Some(hi) = hi else {
                        termination = Termination::PrecisionExhausted;
                        break;
                    };
                    let (fl, fh) = (floor_rat(lo), floor_rat(hi));
                    if fl != fh {
                        termination = Termination::PrecisionExhausted;
                        break;
                    }
                    fl
                }
                Quotient::Terms { next } => match all_terms.get(*next) {
                    Some(a) => a.clone(),
                    None => {
                        termination = Termination::PrecisionExhausted;
                        break;
                    }
                },
            };
            if !pqs.is_empty() && !a.is_positive() {
                // Interval rounding can only produce this through a bug.
                termination = Termination::PrecisionExhausted;
                break;
            }
            let (p_cur, q_cur) = convergents.last().cloned().unwrap_or((BigInt::one(), BigInt::zero()));
            let p_new = &a * &p_cur + &p_prev;
            let q_new = &a * &q_cur + &q_prev;
            p_prev = p_cur;
            q_prev = q_cur;
            pqs.push(a.clone());
            convergents.push((p_new, q_new.clone()));

            // Advance to the next complete quotient and bound Δ_n.
            let (next_quotient, x_bounds, finished) = match quotient {
                Quotient::Exact(r) => {
                    let frac = r - BigRational::from_integer(a.clone());
                    if frac.is_zero() {
                        (Quotient::Exact(BigRational::zero()), None, true)
                    } else {
                        let nx = frac.recip();
                        (Quotient::Exact(nx.clone()), Some((nx.clone(), Some(nx))), false)
                    }
                }
                Quotient::Surd { p, q, d } => {
                    let p2 = &a * &q - &p;
                    let q2 = (&d - &p2 * &p2) / &q;
                    let (s_lo, s_hi) = sqrt_bounds(&d, bits);
                    let pr = BigRational::from_integer(p2.clone());
                    let qr = BigRational::from_integer(q2.clone());
                    let b1 = (&pr + &s_lo) / &qr;
                    let b2 = (&pr + &s_hi) / &qr;
                    let (lo, hi) = if b1 <= b2 { (b1, b2) } else { (b2, b1) };
                    (Quotient::Surd { p: p2, q: q2, d }, Some((lo, Some(hi))), false)
                }
                Quotient::Interval { lo, hi } => {
                    let ar = BigRational::from_integer(a.clone());
                    let hi = hi.expect("checked above");
                    let f_lo = lo - &ar;
                    let f_hi = hi - &ar;
                    if f_lo.is_zero() && f_hi.is_zero() {
                        (Quotient::Exact(BigRational::zero()), None, true)
                    } else {
                        let nlo = f_hi.recip();
                        let nhi = if f_lo.is_zero() { None } else { Some(f_lo.recip()) };
                        let nq = if nhi.as_ref() == Some(&nlo) {
                            Quotient::Exact(nlo.clone())
                        } else {
                            Quotient::Interval { lo: nlo.clone(), hi: nhi.clone() }
                        };
                        (nq, Some((nlo, nhi)), false)
                    }
                }
                Quotient::Terms { next } => {
                    let rest = &all_terms[next + 1..];
                    let bounds = if rest.is_empty() {
                        // Tail x_{n+1} ∈ (1, ∞): Δ_n is not enclosed.
                        Some((BigRational::one(), None))
                    } else {
                        let one = BigRational::one();
                        let b1 = eval_terms(rest, Some(&one));
                        let b2 = eval_terms(rest, None);
                        let (lo, hi) = if b1 <= b2 { (b1, b2) } else { (b2, b1) };
                        Some((lo, Some(hi)))
                    };
                    (Quotient::Terms { next: next + 1 }, bounds, false)
                }
            };

            let q_n = &q_new;
            let q_nm1 = &q_prev;
            match (finished, x_bounds) {
                (true, _) => {
                    let zero = ctx.i64(0);
                    errors.push(ErrorBound { lo: zero.clone(), hi: zero });
                }
                (false, Some((lo, Some(hi)))) => {
                    let qn = BigRational::from_integer(q_n.clone());
                    let qm = BigRational::from_integer(q_nm1.clone());
                    let d_lo = (&qn * &hi + &qm).recip();
                    let d_hi = (&qn * &lo + &qm).recip();
                    errors.push(ErrorBound { lo: ctx.rational(&d_lo), hi: ctx.rational(&d_hi) });
                }
                _ => {}
            }
            quotient = next_quotient;
            if finished {
                termination = Termination::Exact;
                break;
            }
        }

        Ok(Self { input: x.clone(), partial_quotients: pqs, convergents, errors, precision_bits: bits, termination })
    }

    /// Expansion of a double, widened by half an ulp.
    pub fn of_f64(x: f64, max_terms: usize) -> Result<Self> {
        Self::expand(&RealInput::from_f64(x)?, max_terms, crate::hp::DEFAULT_PRECISION_BITS)
    }

    pub fn golden(max_terms: usize) -> Self {
        Self::expand(&RealInput::golden(), max_terms, crate::hp::DEFAULT_PRECISION_BITS).expect("golden mean expands")
    }

    pub fn len(&self) -> usize {
        self.convergents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.convergents.is_empty()
    }

    pub fn is_rational_complete(&self) -> bool {
        self.termination == Termination::Exact
    }

    pub fn q(&self, n: usize) -> &BigInt {
        &self.convergents[n].1
    }

    pub fn p(&self, n: usize) -> &BigInt {
        &self.convergents[n].0
    }

    /// Denominators that fit in a `u64`, in order.
    pub fn denominators_u64(&self) -> Vec<u64> {
        self.convergents.iter().map_while(|(_, q)| q.to_u64()).collect()
    }

    /// Convergents that fit in machine integers, as `(p, q)`.
    pub fn convergents_i64(&self) -> Vec<(i64, u64)> {
        self.convergents.iter().map_while(|(p, q)| Some((p.to_i64()?, q.to_u64()?))).collect()
    }

    pub fn value_f64(&self) -> f64 {
        match &self.input {
            RealInput::Terms { .. } => self
                .convergents
                .last()
                .map(|(p, q)| ratio_f64(&BigRational::new(p.clone(), q.clone())))
                .unwrap_or(f64::NAN),
            other => other.approx_f64(),
        }
    }

    /// Midpoint of the Δ_n enclosure, in double precision (may underflow to 0).
    pub fn error_f64(&self, n: usize) -> Option<f64> {
        let e = self.errors.get(n)?;
        let mut ctx = HpContext::new(self.precision_bits);
        let mid = ctx.mul(&ctx.add(&e.lo, &e.hi), &ctx.f64(0.5));
        Some(ctx.to_f64(&mid))
    }

    /// ln Δ_n, finite even when Δ_n underflows a double.
    pub fn error_ln(&self, n: usize) -> Option<f64> {
        let e = self.errors.get(n)?;
        if e.hi.is_zero() {
            return Some(f64::NEG_INFINITY);
        }
        let mut ctx = HpContext::new(self.precision_bits);
        let mid = ctx.mul(&ctx.add(&e.lo, &e.hi), &ctx.f64(0.5));
        let l = ctx.ln(&mid);
        Some(ctx.to_f64(&l))
    }

    pub fn ln_q(&self, n: usize) -> f64 {
        ln_bigint(self.q(n))
    }

    /// Serializable summary `{"partial_quotients", "convergents", "precision_bits"}`.
    pub fn to_json(&self) -> ExpansionJson {
        ExpansionJson {
            partial_quotients: self.partial_quotients.clone(),
            convergents: self.convergents.iter().map(|(p, q)| [p.clone(), q.clone()]).collect(),
            precision_bits: self.precision_bits,
        }
    }
}

/// Wire form of an expansion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpansionJson {
    #[serde(with = "bigint_seq")]
    pub partial_quotients: Vec<BigInt>,
    #[serde(with = "bigint_pairs")]
    pub convergents: Vec<[BigInt; 2]>,
    pub precision_bits: usize,
}

impl ExpansionJson {
    /// Rebuilds an expansion, rejecting documents whose convergents do not
    /// follow from the partial quotients.
    pub fn into_expansion(self) -> Result<ContinuedFractionExpansion> {
        let Some((a0, rest)) = self.partial_quotients.split_first() else {
            return Err(Error::Parse("empty partial quotient list".into()));
        };
        if rest.iter().any(|a| !a.is_positive()) {
            return Err(Error::Parse("partial quotients after a_0 must be positive".into()));
        }
        if self.precision_bits == 0 || self.precision_bits > 1 << 16 {
            return Err(Error::Parse("precision_bits out of range".into()));
        }
        let input = RealInput::Terms { a0: a0.clone(), terms: rest.to_vec() };
        let cf = ContinuedFractionExpansion::expand(&input, self.partial_quotients.len(), self.precision_bits)?;
        if cf.convergents.len() != self.convergents.len()
            || cf.convergents.iter().zip(&self.convergents).any(|((p, q), [pp, qq])| p != pp || q != qq)
        {
            return Err(Error::Parse("convergents inconsistent with partial quotients".into()));
        }
        Ok(cf)
    }
}

// JSON numbers cannot hold arbitrary integers losslessly in every consumer;
// integers that fit in i64 are written as numbers, larger ones as strings.
mod bigint_seq {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::JsonInt;

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(JsonInt::from).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let v: Vec<JsonInt> = Vec::deserialize(d)?;
        v.into_iter().map(|j| j.into_bigint().map_err(serde::de::Error::custom)).collect()
    }
}

mod bigint_pairs {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::JsonInt;

    pub fn serialize<S: Serializer>(v: &[[BigInt; 2]], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|[p, q]| [JsonInt::from(p), JsonInt::from(q)]).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<[BigInt; 2]>, D::Error> {
        let v: Vec<[JsonInt; 2]> = Vec::deserialize(d)?;
        v.into_iter()
            .map(|[p, q]| {
                Ok([
                    p.into_bigint().map_err(serde::de::Error::custom)?,
                    q.into_bigint().map_err(serde::de::Error::custom)?,
                ])
            })
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum JsonInt {
    Small(i64),
    Big(String),
}

impl From<&BigInt> for JsonInt {
    fn from(b: &BigInt) -> Self {
        match b.to_i64() {
            Some(v) => Self::Small(v),
            None => Self::Big(b.to_string()),
        }
    }
}

impl JsonInt {
    fn into_bigint(self) -> std::result::Result<BigInt, String> {
        match self {
            Self::Small(v) => Ok(v.into()),
            Self::Big(s) => {
                if s.len() > 100_000 {
                    return Err("integer string too long".into());
                }
                s.parse().map_err(|_| format!("not an integer: {s:?}"))
            }
        }
    }
}

/// Distance from `x` to the nearest integer, in [0, 1/2].
pub fn torus_norm(x: f64) -> f64 {
    (x - x.round()).abs()
}

/// ‖k·x‖ with the product formed without losing the low-order bits of `k·x`.
pub fn torus_norm_multiple(k: i64, x: f64) -> f64 {
    let kf = k as f64;
    let prod = kf * x;
    let err = kf.mul_add(x, -prod);
    let r = prod - prod.round();
    torus_norm(r + err)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q_list(cf: &ContinuedFractionExpansion) -> Vec<u64> {
        cf.denominators_u64()
    }

    #[test]
    fn golden_mean_is_all_ones_with_fibonacci_denominators() {
        let cf = ContinuedFractionExpansion::golden(20);
        assert_eq!(cf.partial_quotients[0], BigInt::zero());
        assert!(cf.partial_quotients[1..].iter().all(|a| a.is_one()));
        assert_eq!(&q_list(&cf)[..8], &[1, 1, 2, 3, 5, 8, 13, 21]);
        assert_eq!(cf.termination, Termination::MaxTerms);
    }

    #[test]
    fn rational_terminates_on_itself() {
        let cf = ContinuedFractionExpansion::expand(&RealInput::rational(2, 7).unwrap(), 50, 256).unwrap();
        assert_eq!(cf.termination, Termination::Exact);
        assert_eq!(cf.convergents.last().unwrap(), &(BigInt::from(2), BigInt::from(7)));
        assert_eq!(cf.partial_quotients, vec![BigInt::from(0), BigInt::from(3), BigInt::from(2)]);
        // Δ of the final convergent is exactly zero.
        assert!(cf.errors.last().unwrap().hi.is_zero());
    }

    #[test]
    fn pi_from_a_hundred_digit_constant() {
        let x: RealInput = "pi".parse().unwrap();
        let cf = ContinuedFractionExpansion::expand(&x, 4, 256).unwrap();
        let conv = cf.convergents_i64();
        assert_eq!(conv, vec![(3, 1), (22, 7), (333, 106), (355, 113)]);
        // A 100-digit constant certifies far more than a double would.
        let long = ContinuedFractionExpansion::expand(&x, 1000, 256).unwrap();
        assert_eq!(long.termination, Termination::PrecisionExhausted);
        assert!(long.len() > 80, "{} terms", long.len());
        assert_eq!(long.partial_quotients[4], BigInt::from(292));
    }

    #[test]
    fn double_input_certifies_a_short_prefix() {
        let cf = ContinuedFractionExpansion::of_f64(crate::GOLDEN, 100).unwrap();
        assert_eq!(cf.termination, Termination::PrecisionExhausted);
        assert!(cf.len() > 30 && cf.len() < 45, "{}", cf.len());
        assert!(cf.partial_quotients[1..].iter().all(|a| a.is_one()));
    }

    #[test]
    fn terms_input_leaves_last_error_open() {
        let x = RealInput::from_terms(0, &[2, 3, 4]);
        let cf = ContinuedFractionExpansion::expand(&x, 10, 128).unwrap();
        assert_eq!(cf.len(), 4);
        assert_eq!(cf.errors.len(), 3);
        assert_eq!(cf.termination, Termination::PrecisionExhausted);
    }

    #[test]
    fn json_round_trip_and_rejection() {
        let cf = ContinuedFractionExpansion::golden(12);
        let s = serde_json::to_string(&cf.to_json()).unwrap();
        assert!(s.starts_with("{\"partial_quotients\":[0,1,1"));
        let back: ExpansionJson = serde_json::from_str(&s).unwrap();
        let rebuilt = back.into_expansion().unwrap();
        assert_eq!(rebuilt.convergents, cf.convergents);

        let bad = r#"{"partial_quotients":[0,1,1],"convergents":[[0,1],[1,1],[1,3]],"precision_bits":64}"#;
        let parsed: ExpansionJson = serde_json::from_str(bad).unwrap();
        assert!(parsed.into_expansion().is_err());
        let unknown = r#"{"partial_quotients":[0],"convergents":[[0,1]],"precision_bits":64,"x":1}"#;
        assert!(serde_json::from_str::<ExpansionJson>(unknown).is_err());
    }

    #[test]
    fn torus_norm_basics() {
        assert_eq!(torus_norm(0.75), 0.25);
        assert_eq!(torus_norm(3.0), 0.0);
        assert_eq!(torus_norm(-0.2), 0.2);
        // q_5 = 8: ‖8·golden‖ is Δ_5, inside (1/(q_5 + q_6), 1/q_6).
        let cf = ContinuedFractionExpansion::golden(10);
        let d = torus_norm_multiple(8, crate::GOLDEN);
        let delta = cf.error_f64(5).unwrap();
        assert!((d - delta).abs() < 1e-15);
        assert!(d < 1.0 / 13.0 && d > 1.0 / 21.0);
    }
}
