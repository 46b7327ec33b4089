//! Chevalley–Eilenberg cochains of an algebroid over a point.
//!
//! A `k`-cochain is stored as its values on the increasing frame tuples
//! `(e_{i₁}, …, e_{i_k})`, `i₁ < … < i_k`, in lexicographic order. Ranks are
//! computed by fraction-free (Bareiss) elimination over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebroid::AlgebroidSpec;
use crate::arith::Ratio;
use crate::connection::Setting;
use crate::error::{AcsError, Result};
use crate::forms::{combinations, dense_on_frame, FormExpr};

#[derive(Clone, Debug)]
pub struct CEComplex {
    n: usize,
    top: usize,
    bases: Vec<Vec<Vec<usize>>>,
    /// `d[k]` maps degree `k` to `k + 1`; rows index the target basis.
    d: Vec<Vec<Vec<Ratio>>>,
}

/// Outcome of an exactness query on a closed cochain.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Exactness {
    Exact {
        primitive: Vec<Ratio>,
    },
    /// `rank [d | ω] = rank d + 1`: `ω` lies outside the image.
    NotExact {
        rank_d: usize,
        rank_augmented: usize,
    },
}

impl Exactness {
    pub fn is_exact(&self) -> bool {
        matches!(self, Exactness::Exact { .. })
    }
}

pub fn build_complex(alg: &AlgebroidSpec, top: Option<usize>) -> Result<CEComplex> {
    if !alg.is_point() || alg.simplex_arity() != 0 {
        return Err(AcsError::InvalidArgument(
            "cochain complexes are built only over a point".into(),
        ));
    }
    if !alg.has_constant_structure() {
        return Err(AcsError::InvalidArgument(
            "structure functions must be constant".into(),
        ));
    }
    let n = alg.rank();
    let top = top.unwrap_or(n).min(n);
    let bases: Vec<Vec<Vec<usize>>> = (0..=top + 1)
        .map(|k| combinations(n, k.min(n + 1)))
        .collect();
    let c = |i: usize, j: usize, m: usize| alg.structure(i, j, m).constant_term();
    let mut d = Vec::with_capacity(top + 1);
    for k in 0..=top {
        let source = &bases[k];
        let target = &bases[k + 1];
        let mut mat = vec![vec![Ratio::zero(); source.len()]; target.len()];
        for (row, jj) in target.iter().enumerate() {
            for p in 0..jj.len() {
                for q in (p + 1)..jj.len() {
                    let outer = if (p + q) % 2 == 0 { 1 } else { -1 };
                    let rest: Vec<usize> = jj
                        .iter()
                        .enumerate()
                        .filter(|(l, _)| *l != p && *l != q)
                        .map(|(_, &v)| v)
                        .collect();
                    for m in 0..n {
                        let cm = c(jj[p], jj[q], m);
                        if cm.is_zero() || rest.contains(&m) {
                            continue;
                        }
                        let pos = rest.iter().filter(|&&v| v < m).count();
                        let mut idx = rest.clone();
                        idx.insert(pos, m);
                        let col = source
                            .binary_search(&idx)
                            .expect("basis contains every sorted tuple");
                        let s = if pos % 2 == 0 { outer } else { -outer };
                        let term = &Ratio::from_int(s) * &cm;
                        mat[row][col] = &mat[row][col] + &term;
                    }
                }
            }
        }
        d.push(mat);
    }
    Ok(CEComplex { n, top, bases, d })
}

impl CEComplex {
    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn dim(&self, k: usize) -> usize {
        self.bases.get(k).map_or(0, Vec::len)
    }

    pub fn basis(&self, k: usize) -> &[Vec<usize>] {
        &self.bases[k]
    }

    /// Matrix of `d: C^k → C^{k+1}`.
    pub fn differential(&self, k: usize) -> &[Vec<Ratio>] {
        &self.d[k]
    }

    pub fn apply_d(&self, k: usize, v: &[Ratio]) -> Result<Vec<Ratio>> {
        self.check_degree(k)?;
        self.check_len(k, v)?;
        Ok(mat_vec(&self.d[k], v))
    }

    fn check_degree(&self, k: usize) -> Result<()> {
        if k > self.top {
            return Err(AcsError::InvalidArgument(format!(
                "degree {k} above the bound {}",
                self.top
            )));
        }
        Ok(())
    }

    fn check_len(&self, k: usize, v: &[Ratio]) -> Result<()> {
        if v.len() != self.dim(k) {
            return Err(AcsError::DimensionMismatch(format!(
                "a {k}-cochain has {} coefficients, got {}",
                self.dim(k),
                v.len()
            )));
        }
        Ok(())
    }

    pub fn rank_d(&self, k: usize) -> usize {
        rank(&self.d[k])
    }

    /// `dim ker d_k − rank d_{k−1}`.
    pub fn betti(&self, k: usize) -> Result<usize> {
        self.check_degree(k)?;
        let image = if k == 0 { 0 } else { self.rank_d(k - 1) };
        Ok(self.dim(k) - self.rank_d(k) - image)
    }

    pub fn betti_numbers(&self) -> Vec<usize> {
        (0..=self.top)
            .map(|k| self.betti(k).expect("degree within bound"))
            .collect()
    }

    /// First non-zero entry of some `d_{k+1} ∘ d_k`, if any.
    pub fn d_squared_witness(&self) -> Option<String> {
        for k in 0..self.top {
            let prod = mat_mul(&self.d[k + 1], &self.d[k]);
            for (r, row) in prod.iter().enumerate() {
                for (c, v) in row.iter().enumerate() {
                    if !v.is_zero() {
                        return Some(format!(
                            "(d∘d)[{:?}][{:?}] = {v} in degree {k}",
                            one_based(&self.bases[k + 2][r]),
                            one_based(&self.bases[k][c])
                        ));
                    }
                }
            }
        }
        None
    }

    pub fn is_closed(&self, k: usize, form: &[Ratio]) -> Result<bool> {
        Ok(self.apply_d(k, form)?.iter().all(Ratio::is_zero))
    }

    /// Solves `d x = ω` for a closed `k`-cochain `ω`.
    pub fn is_exact(&self, k: usize, form: &[Ratio]) -> Result<Exactness> {
        self.check_degree(k)?;
        self.check_len(k, form)?;
        if k < self.top || self.dim(k + 1) > 0 {
            let dw = mat_vec(&self.d[k], form);
            if let Some(i) = dw.iter().position(|v| !v.is_zero()) {
                return Err(AcsError::NotClosed(format!(
                    "dω on {:?} is {}",
                    one_based(&self.bases[k + 1][i]),
                    dw[i]
                )));
            }
        }
        if k == 0 {
            return Ok(if form.iter().all(Ratio::is_zero) {
                Exactness::Exact {
                    primitive: Vec::new(),
                }
            } else {
                Exactness::NotExact {
                    rank_d: 0,
                    rank_augmented: 1,
                }
            });
        }
        Ok(solve(&self.d[k - 1], form))
    }

    /// Whether two closed `k`-cochains differ by an exact one.
    pub fn class_equal(&self, k: usize, a: &[Ratio], b: &[Ratio]) -> Result<bool> {
        self.check_len(k, a)?;
        self.check_len(k, b)?;
        let diff: Vec<Ratio> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        Ok(self.is_exact(k, &diff)?.is_exact())
    }
}

fn one_based(idx: &[usize]) -> Vec<usize> {
    idx.iter().map(|i| i + 1).collect()
}

/// Dense cochain of a scalar form over a point algebroid.
pub fn dense_form(form: &FormExpr, set: &Setting) -> Result<Vec<Ratio>> {
    dense_on_frame(form, set)?
        .into_iter()
        .map(|f| {
            f.constant_value().ok_or_else(|| {
                AcsError::InvalidArgument(format!("coefficient {f} is not constant"))
            })
        })
        .collect()
}

fn mat_vec(m: &[Vec<Ratio>], v: &[Ratio]) -> Vec<Ratio> {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(Ratio::zero(), |acc, (a, b)| &acc + &(a * b))
        })
        .collect()
}

fn mat_mul(a: &[Vec<Ratio>], b: &[Vec<Ratio>]) -> Vec<Vec<Ratio>> {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|c| {
                    row.iter()
                        .zip(b)
                        .fold(Ratio::zero(), |acc, (x, brow)| &acc + &(x * &brow[c]))
                })
                .collect()
        })
        .collect()
}

/// Clears denominators row by row.
fn integer_rows(m: &[Vec<Ratio>]) -> Vec<Vec<BigInt>> {
    m.iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, v| acc.lcm(&v.denom()));
            row.iter().map(|v| v.numer() * (&l / v.denom())).collect()
        })
        .collect()
}

/// Fraction-free row echelon form in place; returns the pivot columns.
fn bareiss(m: &mut [Vec<BigInt>], cols: usize) -> Vec<usize> {
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in (r + 1)..rows {
            for j in (c + 1)..cols {
                let v = (&m[r][c] * &m[i][j] - &m[i][c] * &m[r][j]) / &prev;
                m[i][j] = v;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    pivots
}

fn rank(m: &[Vec<Ratio>]) -> usize {
    let cols = m.first().map_or(0, Vec::len);
    let mut a = integer_rows(m);
    bareiss(&mut a, cols).len()
}

fn solve(m: &[Vec<Ratio>], rhs: &[Ratio]) -> Exactness {
    let cols = m.first().map_or(0, Vec::len);
    let aug: Vec<Vec<Ratio>> = m
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            row.iter()
                .cloned()
                .chain(std::iter::once(b.clone()))
                .collect()
        })
        .collect();
    let mut a = integer_rows(&aug);
    let pivots = bareiss(&mut a, cols + 1);
    let rank_augmented = pivots.len();
    if pivots.last() == Some(&cols) {
        return Exactness::NotExact {
            rank_d: rank_augmented - 1,
            rank_augmented,
        };
    }
    // back substitution with free variables set to zero
    let mut x = vec![Ratio::zero(); cols];
    for (r, &c) in pivots.iter().enumerate().rev() {
        let mut acc = big_ratio(&a[r][cols]);
        for j in (c + 1)..cols {
            if !a[r][j].is_zero() {
                acc = &acc - &(&big_ratio(&a[r][j]) * &x[j]);
            }
        }
        x[c] = &acc / &big_ratio(&a[r][c]);
    }
    Exactness::Exact { primitive: x }
}

fn big_ratio(v: &BigInt) -> Ratio {
    Ratio::from_bigs(v.clone(), BigInt::one()).expect("unit denominator")
}
