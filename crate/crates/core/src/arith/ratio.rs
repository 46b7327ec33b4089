//! Arbitrary-precision rationals with an overflow-checked `i64` fast path.
//!
//! Values are kept canonical: lowest terms, positive denominator, and the
//! small representation whenever numerator and denominator both fit in `i64`.
//! Structural equality is therefore numeric equality.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{AcsError, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Ratio(Repr);

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Small(i64, i64),
    Big(BigRational),
}

fn gcd_i128(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

impl Ratio {
    pub fn zero() -> Self {
        Ratio(Repr::Small(0, 1))
    }

    pub fn one() -> Self {
        Ratio(Repr::Small(1, 1))
    }

    pub fn from_int(n: i64) -> Self {
        Ratio(Repr::Small(n, 1))
    }

    /// `num / den`; `den` must be non-zero.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_i128(num as i128, den as i128)
    }

    pub fn from_bigs(num: BigInt, den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(AcsError::DivisionByZero);
        }
        Ok(Self::from_big(BigRational::new(num, den)))
    }

    fn from_i128(mut n: i128, mut d: i128) -> Self {
        debug_assert!(d != 0);
        if d < 0 {
            n = -n;
            d = -d;
        }
        let g = gcd_i128(n, d);
        if g > 1 {
            n /= g;
            d /= g;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) => Ratio(Repr::Small(n, d)),
            _ => Ratio(Repr::Big(BigRational::new_raw(
                BigInt::from(n),
                BigInt::from(d),
            ))),
        }
    }

    fn from_big(r: BigRational) -> Self {
        // BigRational::new already reduced; demote if it fits.
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) => Ratio(Repr::Small(n, d)),
            _ => Ratio(Repr::Big(r)),
        }
    }

    fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(r) => r.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(r) => r.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    pub fn is_one(&self) -> bool {
        matches!(self.0, Repr::Small(1, 1))
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(r) => r.is_integer(),
        }
    }

    pub fn signum(&self) -> i32 {
        match &self.0 {
            Repr::Small(n, _) => n.signum() as i32,
            Repr::Big(r) => {
                if r.is_positive() {
                    1
                } else if r.is_negative() {
                    -1
                } else {
                    0
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn abs(&self) -> Ratio {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Result<Ratio> {
        match &self.0 {
            Repr::Small(0, _) => Err(AcsError::DivisionByZero),
            Repr::Small(n, d) => Ok(Self::from_i128(*d as i128, *n as i128)),
            Repr::Big(r) => Ok(Self::from_big(r.recip())),
        }
    }

    pub fn pow(&self, e: u32) -> Ratio {
        let mut acc = Ratio::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(n, d) => *n as f64 / *d as f64,
            Repr::Big(r) => r.to_f64().unwrap_or(f64::NAN),
        }
    }

    pub fn factorial(n: u32) -> Ratio {
        let mut acc = BigInt::one();
        for i in 2..=n {
            acc *= i;
        }
        Self::from_big(BigRational::from_integer(acc))
    }

    /// Greatest common divisor of two rationals: gcd of numerators over lcm
    /// of denominators. Always non-negative.
    pub fn gcd(&self, other: &Ratio) -> Ratio {
        let n = self.numer().gcd(&other.numer());
        let d = self.denom().lcm(&other.denom());
        Self::from_big(BigRational::new(n, d))
    }
}

impl Default for Ratio {
    fn default() -> Self {
        Ratio::zero()
    }
}

impl From<i64> for Ratio {
    fn from(n: i64) -> Self {
        Ratio::from_int(n)
    }
}

impl From<BigInt> for Ratio {
    fn from(n: BigInt) -> Self {
        Ratio::from_big(BigRational::from_integer(n))
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
        }
    }
}

impl fmt::Debug for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Ratio {
    type Err = AcsError;

    /// Accepts `"n"` or `"n/d"` with arbitrary-precision decimal integers.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || AcsError::InvalidArgument(format!("not a rational number: `{s}`"));
        let s = s.trim();
        match s.split_once('/') {
            Some((n, d)) => {
                let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
                let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
                Ratio::from_bigs(n, d)
            }
            None => Ok(Ratio::from(BigInt::from_str(s).map_err(|_| bad())?)),
        }
    }
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                ((*a as i128) * (*d as i128)).cmp(&((*c as i128) * (*b as i128)))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl<'a> Add<&'a Ratio> for &'a Ratio {
    type Output = Ratio;
    fn add(self, rhs: &Ratio) -> Ratio {
        match (&self.0, &rhs.0) {
            (Repr::Small(0, _), _) => rhs.clone(),
            (_, Repr::Small(0, _)) => self.clone(),
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                if b == d {
                    return Ratio::from_i128(a + c, b);
                }
                Ratio::from_i128(a * d + c * b, b * d)
            }
            _ => Ratio::from_big(self.to_big() + rhs.to_big()),
        }
    }
}

impl<'a> Sub<&'a Ratio> for &'a Ratio {
    type Output = Ratio;
    fn sub(self, rhs: &Ratio) -> Ratio {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Ratio> for &'a Ratio {
    type Output = Ratio;
    fn mul(self, rhs: &Ratio) -> Ratio {
        match (&self.0, &rhs.0) {
            (Repr::Small(0, _), _) | (_, Repr::Small(0, _)) => Ratio::zero(),
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                Ratio::from_i128((*a as i128) * (*c as i128), (*b as i128) * (*d as i128))
            }
            _ => Ratio::from_big(self.to_big() * rhs.to_big()),
        }
    }
}

impl<'a> Div<&'a Ratio> for &'a Ratio {
    type Output = Ratio;
    /// Panics on division by zero; use [`Ratio::recip`] for a checked path.
    fn div(self, rhs: &Ratio) -> Ratio {
        self * &rhs.recip().expect("rational division by zero")
    }
}

impl Neg for &Ratio {
    type Output = Ratio;
    fn neg(self) -> Ratio {
        match &self.0 {
            Repr::Small(n, d) => match n.checked_neg() {
                Some(m) => Ratio(Repr::Small(m, *d)),
                None => Ratio::from_i128(-(*n as i128), *d as i128),
            },
            Repr::Big(r) => Ratio::from_big(-r.clone()),
        }
    }
}

impl Neg for Ratio {
    type Output = Ratio;
    fn neg(self) -> Ratio {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Ratio> for Ratio {
            type Output = Ratio;
            fn $m(self, rhs: Ratio) -> Ratio {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Ratio> for Ratio {
            type Output = Ratio;
            fn $m(self, rhs: &Ratio) -> Ratio {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl AddAssign<&Ratio> for Ratio {
    fn add_assign(&mut self, rhs: &Ratio) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Ratio> for Ratio {
    fn sub_assign(&mut self, rhs: &Ratio) {
        *self = &*self - rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form() {
        assert_eq!(Ratio::new(2, 4), Ratio::new(1, 2));
        assert_eq!(Ratio::new(3, -6), Ratio::new(-1, 2));
        assert_eq!(Ratio::new(0, 5), Ratio::zero());
        assert_eq!(Ratio::new(-4, -2).to_string(), "2");
    }

    #[test]
    fn overflow_promotes_to_big_and_back() {
        let big = Ratio::from_int(i64::MAX);
        let sq = &big * &big;
        assert!(matches!(sq.0, Repr::Big(_)));
        let back = &sq / &big;
        assert_eq!(back, big);
        assert!(matches!(back.0, Repr::Small(..)));
        let neg_min = -Ratio::from_int(i64::MIN);
        assert_eq!(neg_min.to_string(), "9223372036854775808");
    }

    #[test]
    fn parse_and_print() {
        let r: Ratio = "-12/8".parse().unwrap();
        assert_eq!(r.to_string(), "-3/2");
        let h: Ratio = "123456789012345678901234567890".parse().unwrap();
        assert_eq!(h.to_string(), "123456789012345678901234567890");
        assert!("1/0".parse::<Ratio>().is_err());
        assert!("abc".parse::<Ratio>().is_err());
    }

    #[test]
    fn ordering_and_factorial() {
        assert!(Ratio::new(1, 3) < Ratio::new(1, 2));
        assert_eq!(Ratio::factorial(5), Ratio::from_int(120));
        assert_eq!(Ratio::new(4, 9).gcd(&Ratio::new(2, 3)), Ratio::new(2, 9));
    }
}
