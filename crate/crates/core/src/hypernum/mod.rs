//! Scalar arithmetic tower and terminating hypergeometric series.
//!
//! Two backends implement [`Scalar`]: [`BigRational`] (exact) and [`Float`]
//! (binary floating point, default 256-bit mantissa). Everything downstream is
//! generic over the backend.

mod float;
mod rational;

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;

pub use float::{Float, FloatContext, DEFAULT_BITS, MIN_BITS};
pub use rational::{format_rational, parse_rational};

use crate::error::{Error, Result};

/// A real number in one of the supported backends.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Construction parameters for values that need rounding.
    type Context: Clone + fmt::Debug + Default + Send + Sync;

    /// True when arithmetic never rounds.
    const EXACT: bool;

    fn from_i64(n: i64) -> Self;
    fn from_bigint(n: &BigInt) -> Self;
    fn from_rational(r: &BigRational, ctx: &Self::Context) -> Self;
    fn context(&self) -> Self::Context;

    fn is_zero(&self) -> bool;
    fn abs(&self) -> Self;
    /// −1, 0 or +1.
    fn sign(&self) -> i32;
    /// `None` when negative, or when the root is not representable exactly.
    fn sqrt(&self) -> Option<Self>;
    fn to_f64(&self) -> f64;
    /// `Some` iff the value is an integer.
    fn to_integer(&self) -> Option<BigInt>;

    fn zero() -> Self {
        Self::from_i64(0)
    }

    fn one() -> Self {
        Self::from_i64(1)
    }

    fn is_positive(&self) -> bool {
        self.sign() > 0
    }

    /// `Some(n)` iff the value is the integer `−n` with `n ≥ 0`.
    fn non_positive_integer(&self) -> Option<usize> {
        let k = self.to_integer()?;
        if k.is_positive() {
            return None;
        }
        usize::try_from(-k).ok()
    }
}

/// `(−1)^n` in the backend.
pub fn sign_power<S: Scalar>(n: usize) -> S {
    S::from_i64(if n.is_multiple_of(2) { 1 } else { -1 })
}

/// `x^n` by repeated squaring.
pub fn powi<S: Scalar>(x: &S, mut n: usize) -> S {
    let mut base = x.clone();
    let mut acc = S::one();
    while n > 0 {
        if n & 1 == 1 {
            acc = acc * base.clone();
        }
        base = base.clone() * base;
        n >>= 1;
    }
    acc
}

/// Rising factorial `(a)_n = a(a+1)⋯(a+n−1)`, with `(a)_0 = 1`.
pub fn pochhammer<S: Scalar>(a: &S, n: usize) -> S {
    (0..n).fold(S::one(), |acc, j| acc * (a.clone() + S::from_i64(j as i64)))
}

pub fn factorial<S: Scalar>(n: usize) -> S {
    pochhammer(&S::one(), n)
}

/// Generalized binomial coefficient `C(a + k, k) = (a+1)_k / k!`.
pub fn binomial_shifted<S: Scalar>(a: &S, k: usize) -> S {
    pochhammer(&(a.clone() + S::one()), k) / factorial(k)
}

pub fn binomial<S: Scalar>(n: usize, k: usize) -> S {
    if k > n {
        return S::zero();
    }
    binomial_shifted(&S::from_i64((n - k) as i64), k)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesOrder {
    F21,
    F32,
    Other { upper: usize, lower: usize },
}

/// A hypergeometric series that terminates because its first upper
/// parameter is a non-positive integer `−n`.
#[derive(Clone, Debug)]
pub struct HypTerminating<S> {
    upper: Vec<S>,
    lower: Vec<S>,
    z: S,
    length: usize,
}

impl<S: Scalar> HypTerminating<S> {
    pub fn new(upper: Vec<S>, lower: Vec<S>, z: S) -> Result<Self> {
        let first = upper.first().ok_or_else(|| {
            Error::InvalidArgument("a terminating series needs an upper parameter".into())
        })?;
        let n = first.non_positive_integer().ok_or_else(|| {
            Error::InvalidArgument(format!(
                "first upper parameter {first} is not a non-positive integer"
            ))
        })?;
        for (idx, c) in lower.iter().enumerate() {
            for j in 0..n {
                if (c.clone() + S::from_i64(j as i64)).is_zero() {
                    return Err(Error::DenominatorZero {
                        parameter: idx,
                        index: j,
                    });
                }
            }
        }
        Ok(Self {
            upper,
            lower,
            z,
            length: n + 1,
        })
    }

    /// Gauss series `2F1(a, b; c; z)` with `a = −n`.
    pub fn f21(a: S, b: S, c: S, z: S) -> Result<Self> {
        Self::new(vec![a, b], vec![c], z)
    }

    /// `3F2(a, b, c; d, e; z)` with `a = −n`.
    pub fn f32(a: S, b: S, c: S, d: S, e: S, z: S) -> Result<Self> {
        Self::new(vec![a, b, c], vec![d, e], z)
    }

    pub fn order(&self) -> SeriesOrder {
        match (self.upper.len(), self.lower.len()) {
            (2, 1) => SeriesOrder::F21,
            (3, 2) => SeriesOrder::F32,
            (upper, lower) => SeriesOrder::Other { upper, lower },
        }
    }

    /// Number of terms, `n + 1`.
    pub fn len(&self) -> usize {
        self.length
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Sums the series through the term-ratio recurrence
    /// `t_{j+1} = t_j · z · ∏(a+j) / (∏(c+j) · (j+1))`.
    pub fn eval(&self) -> S {
        let mut term = S::one();
        let mut sum = S::one();
        for j in 0..self.length - 1 {
            let jj = S::from_i64(j as i64);
            let num = self
                .upper
                .iter()
                .fold(self.z.clone(), |acc, a| acc * (a.clone() + jj.clone()));
            let den = self
                .lower
                .iter()
                .fold(S::from_i64(j as i64 + 1), |acc, c| acc * (c.clone() + jj.clone()));
            term = term * num / den;
            sum = sum + term.clone();
        }
        sum
    }
}

/// Evaluates a terminating series. Convenience for [`HypTerminating::eval`].
pub fn eval_terminating<S: Scalar>(h: &HypTerminating<S>) -> S {
    h.eval()
}

/// Right-hand side of the Pfaff transformation
/// `2F1(a, b; c; z) = (1−z)^{−b} 2F1(c−a, b; c; z/(z−1))` for `b = −n`.
///
/// Both sides are evaluated with `b` as the terminating parameter.
pub fn pfaff_transform_rhs<S: Scalar>(a: &S, b: &S, c: &S, z: &S) -> Result<S> {
    let n = b.non_positive_integer().ok_or_else(|| {
        Error::InvalidArgument(format!("Pfaff transformation needs b a non-positive integer, got {b}"))
    })?;
    let one_minus_z = S::one() - z.clone();
    if one_minus_z.is_zero() {
        return Err(Error::InvalidArgument("Pfaff transformation undefined at z = 1".into()));
    }
    let w = z.clone() / (z.clone() - S::one());
    let series = HypTerminating::f21(b.clone(), c.clone() - a.clone(), c.clone(), w)?;
    Ok(powi(&one_minus_z, n) * series.eval())
}

/// Left-hand side matching [`pfaff_transform_rhs`]: `2F1(a, b; c; z)` summed
/// over the range set by `b`.
pub fn pfaff_transform_lhs<S: Scalar>(a: &S, b: &S, c: &S, z: &S) -> Result<S> {
    Ok(HypTerminating::f21(b.clone(), a.clone(), c.clone(), z.clone())?.eval())
}

fn gamma_pole_check<S: Scalar>(args: &[S]) -> Result<()> {
    match args.iter().find(|x| x.non_positive_integer().is_some()) {
        Some(x) => Err(Error::GammaPole(x.to_string())),
        None => Ok(()),
    }
}

/// Right-hand side of the terminating Thomae relation
/// `3F2(a,b,c; d,e; 1) = Γ(d)Γ(s−c) / (Γ(s)Γ(d−c)) · 3F2(e−a, e−b, c; s, e; 1)`
/// with `s = d+e−a−b` and `c = −n`.
///
/// The Gamma quotient is reduced to `(s)_n / (d)_n` before evaluation.
pub fn thomae_transform_rhs<S: Scalar>(a: &S, b: &S, c: &S, d: &S, e: &S) -> Result<S> {
    let n = c.non_positive_integer().ok_or_else(|| {
        Error::InvalidArgument(format!("Thomae relation needs c a non-positive integer, got {c}"))
    })?;
    let s = d.clone() + e.clone() - a.clone() - b.clone();
    gamma_pole_check(&[
        d.clone(),
        s.clone() - c.clone(),
        s.clone(),
        d.clone() - c.clone(),
    ])?;
    let series = HypTerminating::f32(
        c.clone(),
        e.clone() - a.clone(),
        e.clone() - b.clone(),
        s.clone(),
        e.clone(),
        S::one(),
    )?;
    Ok(pochhammer(&s, n) / pochhammer(d, n) * series.eval())
}

/// Left-hand side matching [`thomae_transform_rhs`]: `3F2(a,b,c; d,e; 1)`
/// summed over the range set by `c`.
pub fn thomae_transform_lhs<S: Scalar>(a: &S, b: &S, c: &S, d: &S, e: &S) -> Result<S> {
    Ok(HypTerminating::f32(c.clone(), a.clone(), b.clone(), d.clone(), e.clone(), S::one())?.eval())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    fn int(n: i64) -> Q {
        Q::from_i64(n)
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer(&q(7, 3), 0), int(1));
        assert_eq!(pochhammer(&int(1), 5), int(120));
        assert_eq!(pochhammer(&int(3), 4), int(360));
        assert_eq!(pochhammer(&int(-2), 3), int(0));
    }

    #[test]
    fn zero_upper_parameter_gives_one() {
        let h = HypTerminating::f21(int(0), q(5, 7), q(-3, 2), q(9, 4)).unwrap();
        assert_eq!(h.len(), 1);
        assert_eq!(h.eval(), int(1));
    }

    #[test]
    fn two_term_krawtchouk_series() {
        // 2F1(−1, −x; −N; 1/p) = 1 − x/(Np)
        let (n_pts, p) = (5, q(2, 7));
        for x in 0..=n_pts {
            let h = HypTerminating::f21(int(-1), int(-x), int(-n_pts), int(1) / p.clone()).unwrap();
            assert_eq!(h.order(), SeriesOrder::F21);
            assert_eq!(h.eval(), int(1) - int(x) / (int(n_pts) * p.clone()));
        }
    }

    #[test]
    fn two_term_hahn_series() {
        let (alpha, beta, n_pts) = (q(1, 3), q(-1, 2), 4);
        for x in 0..=n_pts {
            let h = HypTerminating::f32(
                int(-1),
                alpha.clone() + beta.clone() + int(2),
                int(-x),
                alpha.clone() + int(1),
                int(-n_pts),
                int(1),
            )
            .unwrap();
            let expected = int(1)
                - int(x) * (alpha.clone() + beta.clone() + int(2))
                    / ((alpha.clone() + int(1)) * int(n_pts));
            assert_eq!(h.eval(), expected);
        }
    }

    #[test]
    fn denominator_zero_is_reported() {
        // −N = −2 with n = 3 runs into (−2)_3 = 0
        let err = HypTerminating::f21(int(-3), int(-1), int(-2), int(1)).unwrap_err();
        assert_eq!(err, Error::DenominatorZero { parameter: 0, index: 2 });
        // n ≤ N is fine
        assert!(HypTerminating::f21(int(-2), int(-1), int(-2), int(1)).is_ok());
    }

    #[test]
    fn non_terminating_is_rejected() {
        assert!(matches!(
            HypTerminating::f21(q(1, 2), int(1), int(1), int(1)),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn pfaff_examples() {
        assert_eq!(pfaff_transform_rhs(&q(3, 5), &int(0), &q(-1, 3), &int(7)).unwrap(), int(1));
        let lhs = pfaff_transform_lhs(&int(-1), &int(-1), &int(-2), &int(2)).unwrap();
        let rhs = pfaff_transform_rhs(&int(-1), &int(-1), &int(-2), &int(2)).unwrap();
        assert_eq!(lhs, int(0));
        assert_eq!(rhs, int(0));
        assert!(matches!(
            pfaff_transform_rhs(&int(1), &int(-1), &int(2), &int(1)),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn pfaff_exhaustive_small_integer_grid() {
        let zs = [q(1, 2), q(-1, 2), int(2), int(-2), int(3)];
        let mut checked = 0;
        for a in -6..=6 {
            for b in -6..=0 {
                for c in -6..=6 {
                    for z in &zs {
                        let (a, b, c) = (int(a), int(b), int(c));
                        let Ok(lhs) = pfaff_transform_lhs(&a, &b, &c, z) else {
                            assert!(pfaff_transform_rhs(&a, &b, &c, z).is_err());
                            continue;
                        };
                        let rhs = pfaff_transform_rhs(&a, &b, &c, z).unwrap();
                        assert_eq!(lhs, rhs, "a={a} b={b} c={c} z={z}");
                        checked += 1;
                    }
                }
            }
        }
        assert!(checked > 2000);
    }

    #[test]
    fn thomae_trivial_and_pole() {
        let v = thomae_transform_rhs(&q(1, 3), &q(2, 5), &int(0), &q(7, 2), &q(-5, 3)).unwrap();
        assert_eq!(v, int(1));
        // d = 0 is a pole of Γ(d)
        assert!(matches!(
            thomae_transform_rhs(&q(1, 3), &q(2, 5), &int(-2), &int(0), &q(1, 2)),
            Err(Error::GammaPole(_))
        ));
    }

    #[test]
    fn float_backend_agrees_with_rational() {
        let ctx = FloatContext::default();
        let fl = |r: &Q| Float::from_rational(r, &ctx);
        let (a, b, c, z) = (q(3, 7), int(-5), q(-13, 2), q(5, 3));
        let exact = pfaff_transform_lhs(&a, &b, &c, &z).unwrap();
        let approx = pfaff_transform_rhs(&fl(&a), &fl(&b), &fl(&c), &fl(&z)).unwrap();
        let rel = ((approx - fl(&exact)) / fl(&exact)).abs().to_f64();
        assert!(rel < 1e-70, "{rel}");
    }

    fn small_rational() -> impl Strategy<Value = Q> {
        (-40i64..=40, 1i64..=9).prop_map(|(n, d)| q(n, d))
    }

    proptest! {
        #[test]
        fn pfaff_random_rationals(a in small_rational(), n in 0usize..7, c in small_rational(), z in small_rational()) {
            let b = int(-(n as i64));
            prop_assume!(z != int(1));
            if let Ok(lhs) = pfaff_transform_lhs(&a, &b, &c, &z) {
                prop_assert_eq!(lhs, pfaff_transform_rhs(&a, &b, &c, &z).unwrap());
            }
        }

        #[test]
        fn thomae_random_rationals(
            a in small_rational(), b in small_rational(), n in 0usize..6,
            d in small_rational(), e in small_rational(),
        ) {
            let c = int(-(n as i64));
            if let (Ok(lhs), Ok(rhs)) = (
                thomae_transform_lhs(&a, &b, &c, &d, &e),
                thomae_transform_rhs(&a, &b, &c, &d, &e),
            ) {
                prop_assert_eq!(lhs, rhs);
            }
        }

        #[test]
        fn rational_addition_is_exact(a in small_rational(), b in small_rational()) {
            prop_assert_eq!((a.clone() + b.clone()) - b, a);
        }
    }
}
