//! Trivialized vector bundles: sections, endomorphism fields and metrics.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebroid::VectorField;
use crate::arith::{RFrac, Ratio, Var};
use crate::error::{AcsError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleSpec {
    pub rank: usize,
}

impl BundleSpec {
    pub fn new(rank: usize) -> Result<BundleSpec> {
        if rank == 0 {
            return Err(AcsError::InvalidArgument(
                "bundle rank must be positive".into(),
            ));
        }
        Ok(BundleSpec { rank })
    }
}

/// A section of `E` in the frame `ε₁..ε_r`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ESection(Vec<RFrac>);

impl ESection {
    pub fn new(coeffs: Vec<RFrac>) -> ESection {
        ESection(coeffs)
    }

    pub fn zero(r: usize) -> ESection {
        ESection(vec![RFrac::zero(); r])
    }

    pub fn unit(r: usize, idx: usize) -> ESection {
        let mut s = ESection::zero(r);
        s.0[idx] = RFrac::one();
        s
    }

    pub fn coeffs(&self) -> &[RFrac] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(RFrac::is_zero)
    }

    pub fn add(&self, o: &ESection) -> ESection {
        ESection(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &ESection) -> ESection {
        ESection(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, f: &RFrac) -> ESection {
        ESection(self.0.iter().map(|c| c * f).collect())
    }

    /// Componentwise action of a vector field.
    pub fn apply_field(&self, v: &VectorField) -> ESection {
        ESection(self.0.iter().map(|c| v.apply(c)).collect())
    }
}

impl fmt::Display for ESection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A section of `End(E)` as an `r × r` matrix; entry `(β, α)` is the
/// `ε_β` coefficient of the image of `ε_α`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EndMat {
    r: usize,
    data: Vec<RFrac>,
}

impl EndMat {
    pub fn zero(r: usize) -> EndMat {
        EndMat {
            r,
            data: vec![RFrac::zero(); r * r],
        }
    }

    pub fn identity(r: usize) -> EndMat {
        EndMat::from_fn(r, |i, j| if i == j { RFrac::one() } else { RFrac::zero() })
    }

    pub fn from_fn<F: FnMut(usize, usize) -> RFrac>(r: usize, mut f: F) -> EndMat {
        let mut data = Vec::with_capacity(r * r);
        for i in 0..r {
            for j in 0..r {
                data.push(f(i, j));
            }
        }
        EndMat { r, data }
    }

    pub fn from_ints(rows: &[&[i64]]) -> EndMat {
        let r = rows.len();
        assert!(
            rows.iter().all(|row| row.len() == r),
            "matrix must be square"
        );
        EndMat::from_fn(r, |i, j| RFrac::int(rows[i][j]))
    }

    pub fn from_rows(rows: Vec<Vec<RFrac>>) -> Result<EndMat> {
        let r = rows.len();
        if r == 0 || rows.iter().any(|row| row.len() != r) {
            return Err(AcsError::DimensionMismatch(
                "endomorphism must be a non-empty square matrix".into(),
            ));
        }
        Ok(EndMat {
            r,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> Vec<Vec<RFrac>> {
        self.data.chunks(self.r).map(<[RFrac]>::to_vec).collect()
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    pub fn get(&self, i: usize, j: usize) -> &RFrac {
        &self.data[i * self.r + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: RFrac) {
        self.data[i * self.r + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(RFrac::is_zero)
    }

    pub fn entries(&self) -> &[RFrac] {
        &self.data
    }

    pub fn map<F: Fn(&RFrac) -> RFrac>(&self, f: F) -> EndMat {
        EndMat {
            r: self.r,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn try_map<F: Fn(&RFrac) -> Result<RFrac>>(&self, f: F) -> Result<EndMat> {
        Ok(EndMat {
            r: self.r,
            data: self.data.iter().map(f).collect::<Result<_>>()?,
        })
    }

    pub fn add(&self, o: &EndMat) -> EndMat {
        debug_assert_eq!(self.r, o.r);
        EndMat {
            r: self.r,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &EndMat) -> EndMat {
        debug_assert_eq!(self.r, o.r);
        EndMat {
            r: self.r,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn neg(&self) -> EndMat {
        self.map(|c| -c)
    }

    pub fn scale(&self, f: &RFrac) -> EndMat {
        if f.is_zero() {
            return EndMat::zero(self.r);
        }
        if f.is_one() {
            return self.clone();
        }
        self.map(|c| c * f)
    }

    pub fn scale_ratio(&self, c: &Ratio) -> EndMat {
        self.map(|e| e.scale(c))
    }

    pub fn mul(&self, o: &EndMat) -> EndMat {
        debug_assert_eq!(self.r, o.r);
        let r = self.r;
        let mut out = EndMat::zero(r);
        for i in 0..r {
            for l in 0..r {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..r {
                    let b = o.get(l, j);
                    if !b.is_zero() {
                        let idx = i * r + j;
                        out.data[idx] = &out.data[idx] + &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn commutator(&self, o: &EndMat) -> EndMat {
        self.mul(o).sub(&o.mul(self))
    }

    pub fn transpose(&self) -> EndMat {
        EndMat::from_fn(self.r, |i, j| self.get(j, i).clone())
    }

    pub fn trace(&self) -> RFrac {
        (0..self.r).fold(RFrac::zero(), |acc, i| &acc + self.get(i, i))
    }

    pub fn apply(&self, s: &ESection) -> ESection {
        debug_assert_eq!(self.r, s.rank());
        ESection::new(
            (0..self.r)
                .map(|i| {
                    (0..self.r).fold(RFrac::zero(), |acc, j| {
                        let a = self.get(i, j);
                        if a.is_zero() {
                            acc
                        } else {
                            &acc + &(a * &s.coeffs()[j])
                        }
                    })
                })
                .collect(),
        )
    }

    /// Entrywise action of a vector field.
    pub fn apply_field(&self, v: &VectorField) -> EndMat {
        if v.is_zero() {
            return EndMat::zero(self.r);
        }
        self.map(|c| v.apply(c))
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.r).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Determinant by cofactor expansion along the first row.
    pub fn det(&self) -> RFrac {
        det_of(&self.data, self.r)
    }

    /// Adjugate, so that `A · adj(A) = det(A) · I`.
    pub fn adjugate(&self) -> EndMat {
        let r = self.r;
        if r == 1 {
            return EndMat::identity(1);
        }
        EndMat::from_fn(r, |i, j| {
            // cofactor (j, i)
            let minor: Vec<RFrac> = (0..r)
                .filter(|&a| a != j)
                .flat_map(|a| (0..r).filter(|&b| b != i).map(move |b| (a, b)))
                .map(|(a, b)| self.get(a, b).clone())
                .collect();
            let m = det_of(&minor, r - 1);
            if (i + j) % 2 == 0 {
                m
            } else {
                -m
            }
        })
    }

    pub fn inverse(&self) -> Result<EndMat> {
        let d = self.det();
        if d.is_zero() {
            return Err(AcsError::SingularMetric);
        }
        let inv = d.recip()?;
        Ok(self.adjugate().scale(&inv))
    }

    /// Substitutes chart variables by a rational point.
    pub fn eval_at(&self, point: &[Ratio]) -> Result<EndMat> {
        let values: Vec<(Var, Ratio)> = point
            .iter()
            .enumerate()
            .map(|(i, c)| (Var::X(i as u8), c.clone()))
            .collect();
        self.try_map(|e| e.eval_vars(&values))
    }
}

fn det_of(data: &[RFrac], r: usize) -> RFrac {
    match r {
        0 => RFrac::one(),
        1 => data[0].clone(),
        2 => &(&data[0] * &data[3]) - &(&data[1] * &data[2]),
        _ => {
            let mut acc = RFrac::zero();
            for j in 0..r {
                let a = &data[j];
                if a.is_zero() {
                    continue;
                }
                let minor: Vec<RFrac> = (1..r)
                    .flat_map(|row| (0..r).filter(|&c| c != j).map(move |c| (row, c)))
                    .map(|(row, c)| data[row * r + c].clone())
                    .collect();
                let term = a * &det_of(&minor, r - 1);
                acc = if j % 2 == 0 {
                    &acc + &term
                } else {
                    &acc - &term
                };
            }
            acc
        }
    }
}

impl fmt::Debug for EndMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for EndMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.data.chunks(self.r).enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            for (j, c) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{c}")?;
            }
        }
        write!(f, "]")
    }
}

impl Serialize for EndMat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for EndMat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<RFrac>>::deserialize(d)?;
        EndMat::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

/// A symmetric, non-degenerate bilinear form `h(s, t) = sᵀ H t` on `E`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Metric {
    h: EndMat,
    inv: EndMat,
}

impl Metric {
    pub fn new(h: EndMat) -> Result<Metric> {
        if !h.is_symmetric() {
            return Err(AcsError::InvalidArgument(
                "metric matrix is not symmetric".into(),
            ));
        }
        let inv = h.inverse()?;
        Ok(Metric { h, inv })
    }

    pub fn identity(r: usize) -> Metric {
        Metric::new(EndMat::identity(r)).expect("identity is a metric")
    }

    pub fn matrix(&self) -> &EndMat {
        &self.h
    }

    pub fn inverse(&self) -> &EndMat {
        &self.inv
    }

    pub fn rank(&self) -> usize {
        self.h.rank()
    }

    pub fn pair(&self, s: &ESection, t: &ESection) -> RFrac {
        let ht = self.h.apply(t);
        s.coeffs()
            .iter()
            .zip(ht.coeffs())
            .fold(RFrac::zero(), |acc, (a, b)| &acc + &(a * b))
    }

    /// `φ*` with `h(φ s, t) = h(s, φ* t)`, i.e. `H⁻¹ φᵀ H`.
    pub fn adjoint_of(&self, phi: &EndMat) -> EndMat {
        self.inv.mul(&phi.transpose().mul(&self.h))
    }

    /// Sylvester's criterion at one rational chart point.
    pub fn is_positive_at(&self, point: &[Ratio]) -> Result<bool> {
        let h = self.h.eval_at(point)?;
        let r = h.rank();
        for k in 1..=r {
            let minor: Vec<RFrac> = (0..k)
                .flat_map(|i| (0..k).map(move |j| (i, j)))
                .map(|(i, j)| h.get(i, j).clone())
                .collect();
            let d = det_of(&minor, k);
            match d.constant_value() {
                Some(c) if c.is_positive() => {}
                Some(_) => return Ok(false),
                None => {
                    return Err(AcsError::InvalidArgument(
                        "metric entries not determined by the chart point".into(),
                    ))
                }
            }
        }
        Ok(true)
    }
}

impl Serialize for Metric {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.h.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Metric {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Metric::new(EndMat::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::MPoly;

    fn x() -> RFrac {
        RFrac::from_poly(MPoly::x(0))
    }

    #[test]
    fn composition_is_associative() {
        let a = EndMat::from_ints(&[&[1, 2], &[3, 4]]);
        let b = EndMat::from_ints(&[&[0, -1], &[5, 2]]);
        let c = EndMat::from_fn(2, |i, j| if i == j { x() } else { RFrac::int(1) });
        assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
    }

    #[test]
    fn trace_of_commutator_vanishes() {
        let a = EndMat::from_ints(&[&[1, 2, 0], &[3, 4, 1], &[0, 1, 1]]);
        let b = EndMat::from_fn(3, |i, j| RFrac::from_poly(MPoly::x(0).pow((i + j) as u32)));
        assert!(a.commutator(&b).trace().is_zero());
        assert_eq!(EndMat::identity(4).trace(), RFrac::int(4));
    }

    #[test]
    fn inverse_via_adjugate() {
        let a = EndMat::from_ints(&[&[2, 1, 0], &[1, 2, 0], &[0, 0, 1]]);
        assert_eq!(a.det(), RFrac::int(3));
        assert_eq!(a.mul(&a.inverse().unwrap()), EndMat::identity(3));
        let f = EndMat::from_fn(2, |i, j| if i == j { &x() + &RFrac::one() } else { x() });
        assert_eq!(f.inverse().unwrap().mul(&f), EndMat::identity(2));
        let sing = EndMat::from_ints(&[&[1, 2], &[2, 4]]);
        assert_eq!(sing.inverse(), Err(AcsError::SingularMetric));
        let four = EndMat::from_ints(&[&[1, 2, 0, 1], &[0, 1, 3, 0], &[2, 0, 1, 1], &[1, 1, 1, 2]]);
        assert_eq!(
            four.mul(&four.adjugate()),
            EndMat::identity(4).scale(&four.det())
        );
    }

    #[test]
    fn metric_validation() {
        assert!(Metric::new(EndMat::from_ints(&[&[1, 2], &[0, 1]])).is_err());
        assert_eq!(
            Metric::new(EndMat::from_ints(&[&[1, 1], &[1, 1]])),
            Err(AcsError::SingularMetric)
        );
        let h = Metric::new(EndMat::from_ints(&[&[2, 1], &[1, 2]])).unwrap();
        assert!(h.is_positive_at(&[]).unwrap());
        let indefinite = Metric::new(EndMat::from_ints(&[&[1, 0], &[0, -1]])).unwrap();
        assert!(!indefinite.is_positive_at(&[]).unwrap());
    }

    #[test]
    fn metric_adjoint_of_endomorphism() {
        let h = Metric::new(EndMat::from_ints(&[&[1, 0, 0], &[0, 2, 0], &[0, 0, 3]])).unwrap();
        let phi = EndMat::from_ints(&[&[0, 1, 2], &[-1, 0, 1], &[3, 1, 1]]);
        let s = ESection::new(vec![RFrac::int(1), x(), RFrac::int(-2)]);
        let t = ESection::new(vec![RFrac::int(2), RFrac::int(1), x()]);
        assert_eq!(
            h.pair(&phi.apply(&s), &t),
            h.pair(&s, &h.adjoint_of(&phi).apply(&t))
        );
    }

    #[test]
    fn end_json_round_trip() {
        let a = EndMat::from_fn(2, |i, j| {
            if i == j {
                x()
            } else {
                RFrac::int(i as i64 - j as i64)
            }
        });
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(serde_json::from_str::<EndMat>(&s).unwrap(), a);
        assert!(serde_json::from_str::<EndMat>("[[1, 2]]").is_err());
        assert!(serde_json::from_str::<Metric>("[[1, 2], [3, 4]]").is_err());
    }
}
