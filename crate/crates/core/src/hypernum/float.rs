//! Binary floating point of configurable precision.
//!
//! A [`Float`] is `mantissa · 2^exponent` with an odd (or zero) mantissa and a
//! working precision in bits. Every arithmetic result is rounded to nearest,
//! ties to even, at the larger precision of its operands. Integer constants
//! built with [`Float::from_i64`] are *exact* (precision 0) and adopt the
//! precision of whatever they are combined with, so generic code can write
//! `S::from_i64(2) * x` without lowering the precision of `x`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Scalar;
use crate::error::{Error, Result};

pub const DEFAULT_BITS: u32 = 256;
pub const MIN_BITS: u32 = 53;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FloatContext {
    bits: u32,
}

impl FloatContext {
    pub fn new(bits: u32) -> Result<Self> {
        if bits < MIN_BITS {
            return Err(Error::InvalidArgument(format!(
                "float precision must be at least {MIN_BITS} bits, got {bits}"
            )));
        }
        Ok(Self { bits })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }
}

impl Default for FloatContext {
    fn default() -> Self {
        Self { bits: DEFAULT_BITS }
    }
}

#[derive(Clone, Debug)]
pub struct Float {
    mant: BigInt,
    exp: i64,
    /// 0 marks an exact value.
    prec: u32,
}

impl Float {
    fn exact(mant: BigInt, exp: i64) -> Self {
        let mut f = Float { mant, exp, prec: 0 };
        f.normalize();
        f
    }

    fn normalize(&mut self) {
        match self.mant.trailing_zeros() {
            None => self.exp = 0,
            Some(0) => {}
            Some(tz) => {
                self.mant >>= tz;
                self.exp += tz as i64;
            }
        }
    }

    /// Rounds `mant · 2^exp` to `prec` bits. `sticky` records that the true
    /// value lies strictly above `|mant| · 2^exp` in magnitude; callers that
    /// set it supply at least `prec + 2` bits.
    fn rounded(mant: BigInt, exp: i64, prec: u32, sticky: bool) -> Self {
        if prec == 0 {
            debug_assert!(!sticky);
            return Float::exact(mant, exp);
        }
        let (sign, mag) = mant.into_parts();
        let bits = mag.bits();
        if bits <= prec as u64 {
            debug_assert!(!sticky);
            let mut f = Float {
                mant: BigInt::from_biguint(sign, mag),
                exp,
                prec,
            };
            f.normalize();
            return f;
        }
        let shift = bits - prec as u64;
        let q = &mag >> shift;
        let rem = &mag - (&q << shift);
        let half = BigUint::one() << (shift - 1);
        let up = match rem.cmp(&half) {
            Ordering::Greater => true,
            Ordering::Equal => sticky || q.is_odd(),
            Ordering::Less => false,
        };
        let q = if up { q + 1u32 } else { q };
        let mut f = Float {
            mant: BigInt::from_biguint(sign, q),
            exp: exp + shift as i64,
            prec,
        };
        f.normalize();
        f
    }

    /// `num / den` rounded to `prec` bits.
    fn ratio(num: &BigInt, den: &BigInt, prec: u32) -> Self {
        assert!(!den.is_zero(), "Float division by zero");
        if num.is_zero() {
            return Float { mant: BigInt::zero(), exp: 0, prec };
        }
        let negative = num.is_negative() != den.is_negative();
        let n = num.magnitude();
        let d = den.magnitude();
        let s = (prec as i64 + 3) + d.bits() as i64 - n.bits() as i64;
        let (n, d) = if s >= 0 {
            (n << s as u64, d.clone())
        } else {
            (n.clone(), d << (-s) as u64)
        };
        let (q, r) = n.div_rem(&d);
        let sign = if negative { Sign::Minus } else { Sign::Plus };
        Float::rounded(BigInt::from_biguint(sign, q), -s, prec, !r.is_zero())
    }

    /// Rounds an exact rational to `bits` bits.
    pub fn from_rational_bits(r: &BigRational, bits: u32) -> Self {
        Float::ratio(r.numer(), r.denom(), bits)
    }

    /// Working precision in bits; `None` for exact values.
    pub fn precision(&self) -> Option<u32> {
        (self.prec != 0).then_some(self.prec)
    }

    /// The represented value as an exact rational.
    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.mant << self.exp as u64)
        } else {
            BigRational::new(self.mant.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    fn combined(&self, other: &Float) -> u32 {
        self.prec.max(other.prec)
    }

    fn aligned_sum(&self, other: &Float, negate_other: bool) -> (BigInt, i64) {
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &other.mant << (other.exp - e) as u64;
        if negate_other {
            (a - b, e)
        } else {
            (a + b, e)
        }
    }

    fn decimal_digits(&self) -> usize {
        let bits = if self.prec == 0 {
            self.mant.bits() as u32
        } else {
            self.prec
        };
        ((bits as f64) * std::f64::consts::LOG10_2).ceil() as usize + 1
    }
}

fn round_half_even(num: &BigUint, den: &BigUint) -> BigUint {
    let (q, r) = num.div_rem(den);
    let twice = &r << 1u32;
    match twice.cmp(den) {
        Ordering::Greater => q + 1u32,
        Ordering::Equal if q.is_odd() => q + 1u32,
        _ => q,
    }
}

impl fmt::Display for Float {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.mant.is_zero() {
            return write!(f, "0");
        }
        let digits = self.decimal_digits();
        let mag = self.mant.magnitude();
        let log2 = (mag.bits() as i64 - 1 + self.exp) as f64;
        let mut k = (log2 * std::f64::consts::LOG10_2).floor() as i64;
        let ten = BigUint::from(10u32);
        let lower = num_traits::pow(ten.clone(), digits - 1);
        let upper = &lower * &ten;
        let q = loop {
            let p = digits as i64 - 1 - k;
            let mut num = mag.clone();
            let mut den = BigUint::one();
            if self.exp >= 0 {
                num <<= self.exp as u64;
            } else {
                den <<= (-self.exp) as u64;
            }
            if p >= 0 {
                num *= num_traits::pow(ten.clone(), p as usize);
            } else {
                den *= num_traits::pow(ten.clone(), (-p) as usize);
            }
            let q = round_half_even(&num, &den);
            if q >= upper {
                k += 1;
            } else if q < lower {
                k -= 1;
            } else {
                break q;
            }
        };
        let s = q.to_string();
        let sign = if self.mant.is_negative() { "-" } else { "" };
        write!(f, "{sign}{}.{}e{k}", &s[..1], &s[1..])
    }
}

impl PartialEq for Float {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_value(other) == Ordering::Equal
    }
}

impl PartialOrd for Float {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_value(other))
    }
}

impl Float {
    fn cmp_value(&self, other: &Float) -> Ordering {
        let (d, _) = self.aligned_sum(other, true);
        d.sign().cmp(&Sign::NoSign)
    }
}

impl Add for Float {
    type Output = Float;
    fn add(self, rhs: Float) -> Float {
        let prec = self.combined(&rhs);
        let (m, e) = self.aligned_sum(&rhs, false);
        Float::rounded(m, e, prec, false)
    }
}

impl Sub for Float {
    type Output = Float;
    fn sub(self, rhs: Float) -> Float {
        let prec = self.combined(&rhs);
        let (m, e) = self.aligned_sum(&rhs, true);
        Float::rounded(m, e, prec, false)
    }
}

impl Mul for Float {
    type Output = Float;
    fn mul(self, rhs: Float) -> Float {
        let prec = self.combined(&rhs);
        Float::rounded(self.mant * rhs.mant, self.exp + rhs.exp, prec, false)
    }
}

impl Div for Float {
    type Output = Float;
    fn div(self, rhs: Float) -> Float {
        let prec = match self.combined(&rhs) {
            0 => DEFAULT_BITS,
            p => p,
        };
        let q = Float::ratio(&self.mant, &rhs.mant, prec);
        Float {
            exp: q.exp + self.exp - rhs.exp,
            ..q
        }
    }
}

impl Neg for Float {
    type Output = Float;
    fn neg(self) -> Float {
        Float {
            mant: -self.mant,
            ..self
        }
    }
}

impl Scalar for Float {
    type Context = FloatContext;
    const EXACT: bool = false;

    fn from_i64(n: i64) -> Self {
        Float::exact(BigInt::from(n), 0)
    }

    fn from_bigint(n: &BigInt) -> Self {
        Float::exact(n.clone(), 0)
    }

    fn from_rational(r: &BigRational, ctx: &FloatContext) -> Self {
        Float::from_rational_bits(r, ctx.bits)
    }

    fn context(&self) -> FloatContext {
        FloatContext {
            bits: if self.prec == 0 { DEFAULT_BITS } else { self.prec },
        }
    }

    fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    fn abs(&self) -> Self {
        Float {
            mant: self.mant.abs(),
            ..self.clone()
        }
    }

    fn sign(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    fn sqrt(&self) -> Option<Self> {
        if self.mant.is_negative() {
            return None;
        }
        let prec = if self.prec == 0 { DEFAULT_BITS } else { self.prec };
        if self.mant.is_zero() {
            return Some(Float { mant: BigInt::zero(), exp: 0, prec });
        }
        let mut m = self.mant.magnitude().clone();
        let mut e = self.exp;
        if e.rem_euclid(2) == 1 {
            m <<= 1u32;
            e -= 1;
        }
        let want = 2 * (prec as i64 + 2);
        let mut s = (want - m.bits() as i64 + 1).max(0);
        if s % 2 == 1 {
            s += 1;
        }
        m <<= s as u64;
        e -= s;
        let r = m.sqrt();
        let sticky = &r * &r != m;
        Some(Float::rounded(BigInt::from(r), e / 2, prec, sticky))
    }

    fn to_f64(&self) -> f64 {
        if self.mant.is_zero() {
            return 0.0;
        }
        let mag = self.mant.magnitude();
        let shift = mag.bits().saturating_sub(64);
        let top = (mag >> shift).to_f64().unwrap_or(f64::NAN);
        let e = (self.exp + shift as i64).clamp(-4000, 4000) as i32;
        // split the scaling so intermediate powers stay finite
        let v = top * 2f64.powi(e / 2) * 2f64.powi(e - e / 2);
        if self.mant.is_negative() {
            -v
        } else {
            v
        }
    }

    fn to_integer(&self) -> Option<BigInt> {
        (self.exp >= 0).then(|| &self.mant << self.exp as u64)
    }
}
