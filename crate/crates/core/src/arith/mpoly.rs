//! Sparse multivariate polynomials over the rationals.
//!
//! Variables live in one global, fixed order: chart coordinates `x1..x6`
//! first, then simplex coordinates `t1..t4`. Every polynomial therefore
//! shares a variable set and combining two of them never needs re-indexing.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ratio::Ratio;
use crate::error::{AcsError, Result};

pub const MAX_CHART: usize = 6;
pub const MAX_SIMPLEX: usize = 4;
pub const NVARS: usize = MAX_CHART + MAX_SIMPLEX;

/// A polynomial variable: chart coordinate `x_{i+1}` or simplex coordinate `t_{i+1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Var {
    X(u8),
    T(u8),
}

impl Var {
    pub fn slot(self) -> usize {
        match self {
            Var::X(i) => {
                assert!(
                    (i as usize) < MAX_CHART,
                    "chart variable index out of range"
                );
                i as usize
            }
            Var::T(i) => {
                assert!(
                    (i as usize) < MAX_SIMPLEX,
                    "simplex variable index out of range"
                );
                MAX_CHART + i as usize
            }
        }
    }

    pub fn from_slot(slot: usize) -> Var {
        if slot < MAX_CHART {
            Var::X(slot as u8)
        } else {
            Var::T((slot - MAX_CHART) as u8)
        }
    }

    pub fn parse(name: &str) -> Result<Var> {
        let bad = || AcsError::InvalidArgument(format!("unknown variable `{name}`"));
        let (kind, idx) = name.split_at(1.min(name.len()));
        let idx: usize = idx.parse().map_err(|_| bad())?;
        match kind {
            "x" if (1..=MAX_CHART).contains(&idx) => Ok(Var::X((idx - 1) as u8)),
            "t" if (1..=MAX_SIMPLEX).contains(&idx) => Ok(Var::T((idx - 1) as u8)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X(i) => write!(f, "x{}", i + 1),
            Var::T(i) => write!(f, "t{}", i + 1),
        }
    }
}

/// Exponent vector over the global variable order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Mono(pub [u16; NVARS]);

impl Mono {
    pub fn one() -> Mono {
        Mono([0; NVARS])
    }

    pub fn var(v: Var, e: u16) -> Mono {
        let mut m = Mono::one();
        m.0[v.slot()] = e;
        m
    }

    pub fn exp(&self, v: Var) -> u16 {
        self.0[v.slot()]
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let mut out = [0u16; NVARS];
        for (k, o) in out.iter_mut().enumerate() {
            *o = self.0[k]
                .checked_add(other.0[k])
                .expect("monomial exponent overflow");
        }
        Mono(out)
    }

    pub fn divides(&self, other: &Mono) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Mono) -> Mono {
        let mut out = [0u16; NVARS];
        for (k, o) in out.iter_mut().enumerate() {
            *o = other.0[k] - self.0[k];
        }
        Mono(out)
    }

    pub fn has_simplex(&self) -> bool {
        self.0[MAX_CHART..].iter().any(|&e| e != 0)
    }
}

/// A polynomial with rational coefficients, stored as sorted `(monomial, coefficient)`
/// pairs with no zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MPoly {
    terms: Vec<(Mono, Ratio)>,
}

impl MPoly {
    pub fn zero() -> MPoly {
        MPoly { terms: Vec::new() }
    }

    pub fn one() -> MPoly {
        MPoly::constant(Ratio::one())
    }

    pub fn constant(c: Ratio) -> MPoly {
        if c.is_zero() {
            MPoly::zero()
        } else {
            MPoly {
                terms: vec![(Mono::one(), c)],
            }
        }
    }

    pub fn int(n: i64) -> MPoly {
        MPoly::constant(Ratio::from_int(n))
    }

    pub fn var(v: Var) -> MPoly {
        MPoly {
            terms: vec![(Mono::var(v, 1), Ratio::one())],
        }
    }

    pub fn x(i: usize) -> MPoly {
        MPoly::var(Var::X(i as u8))
    }

    pub fn t(i: usize) -> MPoly {
        MPoly::var(Var::T(i as u8))
    }

    pub fn monomial(m: Mono, c: Ratio) -> MPoly {
        MPoly::constant(c).mul_mono(&m)
    }

    /// Builds a polynomial from arbitrary terms, merging duplicates and dropping zeros.
    pub fn from_terms<I: IntoIterator<Item = (Mono, Ratio)>>(it: I) -> MPoly {
        let mut v: Vec<(Mono, Ratio)> = it.into_iter().collect();
        v.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(Mono, Ratio)> = Vec::with_capacity(v.len());
        for (m, c) in v {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc += &c,
                _ => out.push((m, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        MPoly { terms: out }
    }

    pub fn terms(&self) -> &[(Mono, Ratio)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    /// The value of a constant polynomial.
    pub fn constant_value(&self) -> Option<Ratio> {
        match self.terms.as_slice() {
            [] => Some(Ratio::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    /// Coefficient of the constant monomial.
    pub fn constant_term(&self) -> Ratio {
        match self.terms.first() {
            Some((m, c)) if m.is_one() => c.clone(),
            _ => Ratio::zero(),
        }
    }

    /// Greatest term in the lexicographic order (x1 most significant).
    pub fn leading(&self) -> Option<&(Mono, Ratio)> {
        self.terms.last()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|(m, _)| m.total_degree())
            .max()
            .unwrap_or(0)
    }

    pub fn degree_in(&self, v: Var) -> u16 {
        self.terms.iter().map(|(m, _)| m.exp(v)).max().unwrap_or(0)
    }

    pub fn has_simplex_vars(&self) -> bool {
        self.terms.iter().any(|(m, _)| m.has_simplex())
    }

    /// Variables that occur with positive exponent, in global order.
    pub fn vars(&self) -> Vec<Var> {
        (0..NVARS)
            .filter(|&s| self.terms.iter().any(|(m, _)| m.0[s] > 0))
            .map(Var::from_slot)
            .collect()
    }

    pub fn scale(&self, c: &Ratio) -> MPoly {
        if c.is_zero() {
            return MPoly::zero();
        }
        MPoly {
            terms: self.terms.iter().map(|(m, k)| (*m, k * c)).collect(),
        }
    }

    pub fn mul_mono(&self, mono: &Mono) -> MPoly {
        MPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.mul(mono), k.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> MPoly {
        let mut acc = MPoly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Formal partial derivative.
    pub fn derive(&self, v: Var) -> MPoly {
        let s = v.slot();
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.0[s] > 0)
            .map(|(m, c)| {
                let mut m2 = *m;
                let e = m2.0[s];
                m2.0[s] -= 1;
                (m2, c * &Ratio::from_int(e as i64))
            })
            .collect();
        // Lowering one exponent of the same slot preserves relative order.
        MPoly { terms }
    }

    /// Substitutes each variable `v` for which `f(v)` is `Some(p)` by `p`.
    pub fn substitute<F>(&self, f: F) -> MPoly
    where
        F: Fn(Var) -> Option<MPoly>,
    {
        let subs: Vec<Option<MPoly>> = (0..NVARS).map(|s| f(Var::from_slot(s))).collect();
        if subs.iter().all(Option::is_none) {
            return self.clone();
        }
        let mut acc: Vec<(Mono, Ratio)> = Vec::new();
        for (m, c) in &self.terms {
            let mut kept = *m;
            let mut factor = MPoly::constant(c.clone());
            for (s, sub) in subs.iter().enumerate() {
                if let Some(p) = sub {
                    let e = m.0[s];
                    if e > 0 {
                        kept.0[s] = 0;
                        factor = &factor * &p.pow(e as u32);
                    }
                }
            }
            acc.extend(factor.terms.into_iter().map(|(fm, fc)| (fm.mul(&kept), fc)));
        }
        MPoly::from_terms(acc)
    }

    /// Substitutes rational values for some variables.
    pub fn eval_vars(&self, values: &[(Var, Ratio)]) -> MPoly {
        self.substitute(|v| {
            values
                .iter()
                .find(|(w, _)| *w == v)
                .map(|(_, r)| MPoly::constant(r.clone()))
        })
    }

    /// Sets every simplex variable to zero.
    pub fn restrict_t0(&self) -> MPoly {
        MPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| !m.has_simplex())
                .cloned()
                .collect(),
        }
    }

    /// Exact division; `None` if `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &MPoly) -> Result<Option<MPoly>> {
        let (lm, lc) = divisor.leading().ok_or(AcsError::DivisionByZero)?.clone();
        let mut rem = self.clone();
        let mut quot: Vec<(Mono, Ratio)> = Vec::new();
        while let Some((rm, rc)) = rem.leading().cloned() {
            if !lm.divides(&rm) {
                return Ok(None);
            }
            let qm = lm.quotient_of(&rm);
            let qc = &rc / &lc;
            rem = &rem - &divisor.mul_mono(&qm).scale(&qc);
            quot.push((qm, qc));
        }
        Ok(Some(MPoly::from_terms(quot)))
    }

    /// Gcd of all coefficients (non-negative rational); zero for the zero polynomial.
    pub fn content(&self) -> Ratio {
        self.terms.iter().fold(Ratio::zero(), |g, (_, c)| g.gcd(c))
    }
}

impl Add for &MPoly {
    type Output = MPoly;
    fn add(self, rhs: &MPoly) -> MPoly {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let (a, b) = (&self.terms, &rhs.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = &a[i].1 + &b[j].1;
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        MPoly { terms: out }
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        MPoly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

impl Sub for &MPoly {
    type Output = MPoly;
    fn sub(self, rhs: &MPoly) -> MPoly {
        self + &(-rhs)
    }
}

impl Mul for &MPoly {
    type Output = MPoly;
    fn mul(self, rhs: &MPoly) -> MPoly {
        if self.is_zero() || rhs.is_zero() {
            return MPoly::zero();
        }
        if rhs.is_constant() {
            return self.scale(&rhs.terms[0].1);
        }
        if self.is_constant() {
            return rhs.scale(&self.terms[0].1);
        }
        let mut prods = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                prods.push((ma.mul(mb), ca * cb));
            }
        }
        MPoly::from_terms(prods)
    }
}

macro_rules! forward_owned_poly {
    ($tr:ident, $m:ident) => {
        impl $tr<MPoly> for MPoly {
            type Output = MPoly;
            fn $m(self, rhs: MPoly) -> MPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned_poly!(Add, add);
forward_owned_poly!(Sub, sub);
forward_owned_poly!(Mul, mul);

impl Neg for MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        -&self
    }
}

impl From<Ratio> for MPoly {
    fn from(c: Ratio) -> Self {
        MPoly::constant(c)
    }
}

/// Parses the display syntax: a signed sum of `c*x1^2*t1`-style terms.
impl FromStr for MPoly {
    type Err = AcsError;

    fn from_str(text: &str) -> Result<MPoly> {
        let bad = |why: &str| {
            AcsError::InvalidArgument(format!("cannot parse polynomial `{text}`: {why}"))
        };
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad("empty"));
        }
        let mut terms = Vec::new();
        let mut start = 0;
        let bytes = compact.as_bytes();
        for i in 1..=bytes.len() {
            let split = i == bytes.len()
                || ((bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'^');
            if split {
                terms.push(&compact[start..i]);
                start = i;
            }
        }
        let mut out = MPoly::zero();
        for term in terms {
            let (neg, body) = match term.as_bytes()[0] {
                b'-' => (true, &term[1..]),
                b'+' => (false, &term[1..]),
                _ => (false, term),
            };
            if body.is_empty() {
                return Err(bad("dangling sign"));
            }
            let mut coeff = Ratio::one();
            let mut mono = Mono::one();
            for factor in body.split('*') {
                if factor.starts_with(['x', 't']) {
                    let (name, exp) = factor.split_once('^').unwrap_or((factor, "1"));
                    let v = Var::parse(name)?;
                    let e: u16 = exp.parse().map_err(|_| bad("bad exponent"))?;
                    mono = mono.mul(&Mono::var(v, e));
                } else {
                    let c: Ratio = factor.parse().map_err(|_| bad("bad coefficient"))?;
                    coeff = &coeff * &c;
                }
            }
            if neg {
                coeff = -coeff;
            }
            out = &out + &MPoly::monomial(mono, coeff);
        }
        Ok(out)
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Highest term first reads naturally.
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.signum() < 0;
            let abs = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let mut factors: Vec<String> = Vec::new();
            for s in 0..NVARS {
                match m.0[s] {
                    0 => {}
                    1 => factors.push(Var::from_slot(s).to_string()),
                    e => factors.push(format!("{}^{}", Var::from_slot(s), e)),
                }
            }
            if factors.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{abs}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MPoly({self})")
    }
}
