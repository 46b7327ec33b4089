//! Polynomial fractions kept in lowest terms with a monic denominator.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::gcd::poly_gcd;
use super::mpoly::{MPoly, Var};
use super::ratio::Ratio;
use crate::error::{AcsError, Result};

/// `num / den` with `gcd(num, den) = 1` and the leading coefficient of `den`
/// equal to 1. Polynomials are fractions with `den = 1`, which is also the
/// fast path for every operation.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct RFrac {
    num: MPoly,
    den: MPoly,
}

impl RFrac {
    pub fn zero() -> RFrac {
        RFrac {
            num: MPoly::zero(),
            den: MPoly::one(),
        }
    }

    pub fn one() -> RFrac {
        RFrac::from_poly(MPoly::one())
    }

    pub fn int(n: i64) -> RFrac {
        RFrac::from_poly(MPoly::int(n))
    }

    pub fn constant(c: Ratio) -> RFrac {
        RFrac::from_poly(MPoly::constant(c))
    }

    pub fn from_poly(p: MPoly) -> RFrac {
        RFrac {
            num: p,
            den: MPoly::one(),
        }
    }

    pub fn new(num: MPoly, den: MPoly) -> Result<RFrac> {
        if den.is_zero() {
            return Err(AcsError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(RFrac::zero());
        }
        if let Some(c) = den.constant_value() {
            let inv = c.recip()?;
            return Ok(RFrac::from_poly(num.scale(&inv)));
        }
        let g = poly_gcd(&num, &den);
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g)?.expect("gcd divides numerator"),
                den.div_exact(&g)?.expect("gcd divides denominator"),
            )
        };
        let lc = den.leading().expect("denominator is non-zero").1.clone();
        if !lc.is_one() {
            let inv = lc.recip()?;
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        if den.is_one() {
            return Ok(RFrac::from_poly(num));
        }
        Ok(RFrac { num, den })
    }

    /// Builds a fraction from a numerator and non-zero denominator already
    /// known to be coprime; only the normalization of the denominator remains.
    fn from_coprime(mut num: MPoly, mut den: MPoly) -> RFrac {
        if num.is_zero() {
            return RFrac::zero();
        }
        let lc = den.leading().expect("denominator is non-zero").1.clone();
        if !lc.is_one() {
            let inv = lc.recip().expect("leading coefficient is non-zero");
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        if den.is_one() {
            return RFrac::from_poly(num);
        }
        RFrac { num, den }
    }

    pub fn num(&self) -> &MPoly {
        &self.num
    }

    pub fn den(&self) -> &MPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }

    /// The polynomial value, if the denominator is trivial.
    pub fn as_poly(&self) -> Option<&MPoly> {
        self.is_poly().then_some(&self.num)
    }

    pub fn constant_value(&self) -> Option<Ratio> {
        if self.is_poly() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn has_simplex_vars(&self) -> bool {
        self.num.has_simplex_vars() || self.den.has_simplex_vars()
    }

    pub fn scale(&self, c: &Ratio) -> RFrac {
        if c.is_zero() {
            return RFrac::zero();
        }
        RFrac {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn recip(&self) -> Result<RFrac> {
        RFrac::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, rhs: &RFrac) -> Result<RFrac> {
        if rhs.is_zero() {
            return Err(AcsError::DivisionByZero);
        }
        if rhs.is_poly() {
            if let Some(c) = rhs.num.constant_value() {
                return Ok(self.scale(&c.recip()?));
            }
        }
        RFrac::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }

    /// Formal partial derivative (quotient rule).
    pub fn derive(&self, v: Var) -> RFrac {
        if self.is_poly() {
            return RFrac::from_poly(self.num.derive(v));
        }
        let dn = self.num.derive(v);
        let dd = self.den.derive(v);
        if dd.is_zero() {
            return RFrac::new(dn, self.den.clone()).expect("denominator is non-zero");
        }
        let num = &(&dn * &self.den) - &(&self.num * &dd);
        RFrac::new(num, &self.den * &self.den).expect("denominator is non-zero")
    }

    /// Substitutes polynomials for some variables.
    pub fn substitute<F>(&self, f: F) -> Result<RFrac>
    where
        F: Fn(Var) -> Option<MPoly>,
    {
        if self.is_poly() {
            return Ok(RFrac::from_poly(self.num.substitute(&f)));
        }
        RFrac::new(self.num.substitute(&f), self.den.substitute(&f))
    }

    pub fn eval_vars(&self, values: &[(Var, Ratio)]) -> Result<RFrac> {
        self.substitute(|v| {
            values
                .iter()
                .find(|(w, _)| *w == v)
                .map(|(_, r)| MPoly::constant(r.clone()))
        })
    }

    pub fn restrict_t0(&self) -> Result<RFrac> {
        if self.is_poly() {
            return Ok(RFrac::from_poly(self.num.restrict_t0()));
        }
        RFrac::new(self.num.restrict_t0(), self.den.restrict_t0())
    }
}

impl Add for &RFrac {
    type Output = RFrac;
    fn add(self, rhs: &RFrac) -> RFrac {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_poly() && rhs.is_poly() {
            return RFrac::from_poly(&self.num + &rhs.num);
        }
        if rhs.is_poly() {
            return RFrac::from_coprime(&self.num + &(&rhs.num * &self.den), self.den.clone());
        }
        if self.is_poly() {
            return RFrac::from_coprime(&(&self.num * &rhs.den) + &rhs.num, rhs.den.clone());
        }
        let g = poly_gcd(&self.den, &rhs.den);
        if g.is_one() {
            let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
            return RFrac::from_coprime(num, &self.den * &rhs.den);
        }
        let b = quo(&self.den, &g);
        let d = quo(&rhs.den, &g);
        let num = &(&self.num * &d) + &(&rhs.num * &b);
        if num.is_zero() {
            return RFrac::zero();
        }
        let g2 = poly_gcd(&num, &g);
        RFrac::from_coprime(quo(&num, &g2), &quo(&self.den, &g2) * &d)
    }
}

impl Neg for &RFrac {
    type Output = RFrac;
    fn neg(self) -> RFrac {
        RFrac {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Neg for RFrac {
    type Output = RFrac;
    fn neg(self) -> RFrac {
        -&self
    }
}

impl Sub for &RFrac {
    type Output = RFrac;
    fn sub(self, rhs: &RFrac) -> RFrac {
        self + &(-rhs)
    }
}

impl Mul for &RFrac {
    type Output = RFrac;
    fn mul(self, rhs: &RFrac) -> RFrac {
        if self.is_zero() || rhs.is_zero() {
            return RFrac::zero();
        }
        if self.is_poly() && rhs.is_poly() {
            return RFrac::from_poly(&self.num * &rhs.num);
        }
        let g1 = poly_gcd(&self.num, &rhs.den);
        let g2 = poly_gcd(&rhs.num, &self.den);
        let num = &quo(&self.num, &g1) * &quo(&rhs.num, &g2);
        let den = &quo(&self.den, &g2) * &quo(&rhs.den, &g1);
        RFrac::from_coprime(num, den)
    }
}

fn quo(p: &MPoly, g: &MPoly) -> MPoly {
    if g.is_one() {
        return p.clone();
    }
    p.div_exact(g)
        .expect("non-zero divisor")
        .expect("gcd divides")
}

macro_rules! forward_owned_frac {
    ($tr:ident, $m:ident) => {
        impl $tr<RFrac> for RFrac {
            type Output = RFrac;
            fn $m(self, rhs: RFrac) -> RFrac {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned_frac!(Add, add);
forward_owned_frac!(Sub, sub);
forward_owned_frac!(Mul, mul);

impl From<MPoly> for RFrac {
    fn from(p: MPoly) -> Self {
        RFrac::from_poly(p)
    }
}

impl From<Ratio> for RFrac {
    fn from(c: Ratio) -> Self {
        RFrac::constant(c)
    }
}

impl fmt::Display for RFrac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_poly() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RFrac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RFrac({self})")
    }
}
