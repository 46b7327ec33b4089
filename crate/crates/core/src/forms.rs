//! ℝ-linear forms as evaluable terms.
//!
//! Forms take sections of the setting's algebroid and return either a
//! function or an `End(E)` field. Products use the shuffle convention
//! `(α∧β)(a₁..a_{p+q}) = Σ_σ sgn σ · α(a_{σ(1)}..)·β(..a_{σ(p+q)})` over
//! `(p, q)`-shuffles, without factorial normalization.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::algebroid::{Section, VectorField};
use crate::arith::{simplex_integrate_frac, MPoly, RFrac, Ratio, Var};
use crate::bundle::EndMat;
use crate::connection::{conn_matrix, curvature_matrix, ConnectionExpr, Setting};
use crate::error::{AcsError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Scalar,
    End,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum FormExpr {
    ConstFn(RFrac),
    ConstEnd(EndMat),
    /// `λ = plus − minus`.
    Diff {
        plus: Box<ConnectionExpr>,
        minus: Box<ConnectionExpr>,
    },
    Curv(Box<ConnectionExpr>),
    Wedge(Box<FormExpr>, Box<FormExpr>),
    Power {
        form: Box<FormExpr>,
        p: usize,
    },
    TraceStar(Box<FormExpr>),
    /// `d^∇̄` on End-valued forms (the anchor on scalar forms).
    CovDiff {
        connection: Box<ConnectionExpr>,
        form: Box<FormExpr>,
    },
    ScalarDiff(Box<FormExpr>),
    /// Pullback of a form on `Tℝᵏ × A` along the face `σ_j^{k−1}`.
    SigmaPullback {
        form: Box<FormExpr>,
        j: usize,
        k: usize,
    },
    /// `[λ, λ](a, b) = [λ(a), λ(b)]` for an End-valued 1-form.
    LieBracketForm(Box<FormExpr>),
    Sum(Vec<FormExpr>),
    Scale {
        c: Ratio,
        form: Box<FormExpr>,
    },
    /// `∫_{Δᵏ}` of a form on `Tℝᵏ × A`, a form on `A`.
    SimplexIntegral {
        form: Box<FormExpr>,
        k: usize,
    },
    Ref(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FormValue {
    Scalar(RFrac),
    End(EndMat),
}

impl FormValue {
    pub fn kind(&self) -> Kind {
        match self {
            FormValue::Scalar(_) => Kind::Scalar,
            FormValue::End(_) => Kind::End,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FormValue::Scalar(f) => f.is_zero(),
            FormValue::End(m) => m.is_zero(),
        }
    }

    pub fn zero_like(&self) -> FormValue {
        match self {
            FormValue::Scalar(_) => FormValue::Scalar(RFrac::zero()),
            FormValue::End(m) => FormValue::End(EndMat::zero(m.rank())),
        }
    }

    pub fn into_scalar(self, what: &str) -> Result<RFrac> {
        match self {
            FormValue::Scalar(f) => Ok(f),
            FormValue::End(_) => Err(AcsError::KindMismatch(format!(
                "{what}: expected a scalar value"
            ))),
        }
    }

    pub fn into_end(self, what: &str) -> Result<EndMat> {
        match self {
            FormValue::End(m) => Ok(m),
            FormValue::Scalar(_) => Err(AcsError::KindMismatch(format!(
                "{what}: expected an End(E) value"
            ))),
        }
    }

    pub fn add(&self, o: &FormValue) -> Result<FormValue> {
        match (self, o) {
            (FormValue::Scalar(a), FormValue::Scalar(b)) => Ok(FormValue::Scalar(a + b)),
            (FormValue::End(a), FormValue::End(b)) if a.rank() == b.rank() => {
                Ok(FormValue::End(a.add(b)))
            }
            _ => Err(AcsError::KindMismatch(
                "sum of values of different kinds".into(),
            )),
        }
    }

    pub fn neg(&self) -> FormValue {
        match self {
            FormValue::Scalar(a) => FormValue::Scalar(-a),
            FormValue::End(m) => FormValue::End(m.neg()),
        }
    }

    pub fn scale_ratio(&self, c: &Ratio) -> FormValue {
        match self {
            FormValue::Scalar(a) => FormValue::Scalar(a.scale(c)),
            FormValue::End(m) => FormValue::End(m.scale_ratio(c)),
        }
    }

    /// Product of values: multiplication, scaling or composition.
    pub fn mul(&self, o: &FormValue) -> FormValue {
        match (self, o) {
            (FormValue::Scalar(a), FormValue::Scalar(b)) => FormValue::Scalar(a * b),
            (FormValue::Scalar(a), FormValue::End(m))
            | (FormValue::End(m), FormValue::Scalar(a)) => FormValue::End(m.scale(a)),
            (FormValue::End(a), FormValue::End(b)) => FormValue::End(a.mul(b)),
        }
    }

    pub fn apply_field(&self, v: &VectorField) -> FormValue {
        match self {
            FormValue::Scalar(a) => FormValue::Scalar(v.apply(a)),
            FormValue::End(m) => FormValue::End(m.apply_field(v)),
        }
    }

    pub fn try_map(&self, f: impl Fn(&RFrac) -> Result<RFrac>) -> Result<FormValue> {
        Ok(match self {
            FormValue::Scalar(a) => FormValue::Scalar(f(a)?),
            FormValue::End(m) => FormValue::End(m.try_map(f)?),
        })
    }
}

impl std::fmt::Display for FormValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FormValue::Scalar(a) => write!(f, "{a}"),
            FormValue::End(m) => write!(f, "{m}"),
        }
    }
}

fn boxed(f: FormExpr) -> Box<FormExpr> {
    Box::new(f)
}

impl FormExpr {
    pub fn diff(plus: ConnectionExpr, minus: ConnectionExpr) -> FormExpr {
        FormExpr::Diff {
            plus: Box::new(plus),
            minus: Box::new(minus),
        }
    }

    pub fn curv(c: ConnectionExpr) -> FormExpr {
        FormExpr::Curv(Box::new(c))
    }

    pub fn wedge(a: FormExpr, b: FormExpr) -> FormExpr {
        FormExpr::Wedge(boxed(a), boxed(b))
    }

    pub fn power(a: FormExpr, p: usize) -> FormExpr {
        FormExpr::Power { form: boxed(a), p }
    }

    pub fn trace(a: FormExpr) -> FormExpr {
        FormExpr::TraceStar(boxed(a))
    }

    pub fn cov_diff(c: ConnectionExpr, a: FormExpr) -> FormExpr {
        FormExpr::CovDiff {
            connection: Box::new(c),
            form: boxed(a),
        }
    }

    pub fn d(a: FormExpr) -> FormExpr {
        FormExpr::ScalarDiff(boxed(a))
    }

    pub fn sigma(a: FormExpr, j: usize, k: usize) -> FormExpr {
        FormExpr::SigmaPullback {
            form: boxed(a),
            j,
            k,
        }
    }

    pub fn bracket(a: FormExpr) -> FormExpr {
        FormExpr::LieBracketForm(boxed(a))
    }

    pub fn scale(c: Ratio, a: FormExpr) -> FormExpr {
        FormExpr::Scale { c, form: boxed(a) }
    }

    pub fn integral(a: FormExpr, k: usize) -> FormExpr {
        FormExpr::SimplexIntegral { form: boxed(a), k }
    }

    pub fn sum(terms: Vec<FormExpr>) -> FormExpr {
        FormExpr::Sum(terms)
    }

    pub fn sub(a: FormExpr, b: FormExpr) -> FormExpr {
        FormExpr::Sum(vec![a, FormExpr::scale(Ratio::from_int(-1), b)])
    }

    /// Degree and value kind.
    pub fn signature(&self) -> Result<(usize, Kind)> {
        Ok(match self {
            FormExpr::ConstFn(_) => (0, Kind::Scalar),
            FormExpr::ConstEnd(_) => (0, Kind::End),
            FormExpr::Diff { .. } => (1, Kind::End),
            FormExpr::Curv(_) => (2, Kind::End),
            FormExpr::Wedge(a, b) => {
                let (p, ka) = a.signature()?;
                let (q, kb) = b.signature()?;
                let kind = if ka == Kind::Scalar && kb == Kind::Scalar {
                    Kind::Scalar
                } else {
                    Kind::End
                };
                (p + q, kind)
            }
            FormExpr::Power { form, p } => {
                if *p == 0 {
                    return Err(AcsError::InvalidArgument("power must be positive".into()));
                }
                let (d, k) = form.signature()?;
                (d * p, k)
            }
            FormExpr::TraceStar(a) => match a.signature()? {
                (d, Kind::End) => (d, Kind::Scalar),
                _ => return Err(AcsError::KindMismatch("trace of a scalar form".into())),
            },
            FormExpr::CovDiff { form, .. } => {
                let (d, k) = form.signature()?;
                (d + 1, k)
            }
            FormExpr::ScalarDiff(a) => match a.signature()? {
                (d, Kind::Scalar) => (d + 1, Kind::Scalar),
                _ => {
                    return Err(AcsError::KindMismatch(
                        "scalar differential of an End-valued form".into(),
                    ))
                }
            },
            FormExpr::SigmaPullback { form, .. } => form.signature()?,
            FormExpr::LieBracketForm(a) => match a.signature()? {
                (1, Kind::End) => (2, Kind::End),
                _ => {
                    return Err(AcsError::KindMismatch(
                        "[λ, λ] needs an End-valued 1-form".into(),
                    ))
                }
            },
            FormExpr::Sum(terms) => {
                let first = terms
                    .first()
                    .ok_or_else(|| AcsError::InvalidArgument("empty sum of forms".into()))?
                    .signature()?;
                for t in &terms[1..] {
                    if t.signature()? != first {
                        return Err(AcsError::KindMismatch(
                            "sum of forms of different degree or kind".into(),
                        ));
                    }
                }
                first
            }
            FormExpr::Scale { form, .. } => form.signature()?,
            FormExpr::SimplexIntegral { form, k } => {
                let (d, kind) = form.signature()?;
                if d < *k {
                    return Err(AcsError::InvalidArgument(format!(
                        "cannot integrate a {d}-form over a {k}-simplex"
                    )));
                }
                (d - k, kind)
            }
            FormExpr::Ref(name) => return Err(AcsError::UnresolvedRef(name.clone())),
        })
    }

    pub fn degree(&self) -> Result<usize> {
        Ok(self.signature()?.0)
    }

    pub fn has_nontensorial_part(&self) -> bool {
        match self {
            FormExpr::ConstFn(_) | FormExpr::ConstEnd(_) | FormExpr::Ref(_) => false,
            FormExpr::Diff { plus, minus } => {
                plus.has_nontensorial_part() || minus.has_nontensorial_part()
            }
            FormExpr::Curv(c) => c.has_nontensorial_part(),
            FormExpr::Wedge(a, b) => a.has_nontensorial_part() || b.has_nontensorial_part(),
            FormExpr::CovDiff { connection, form } => {
                connection.has_nontensorial_part() || form.has_nontensorial_part()
            }
            FormExpr::Sum(t) => t.iter().any(Self::has_nontensorial_part),
            FormExpr::Power { form, .. }
            | FormExpr::SigmaPullback { form, .. }
            | FormExpr::Scale { form, .. }
            | FormExpr::SimplexIntegral { form, .. } => form.has_nontensorial_part(),
            FormExpr::TraceStar(a) | FormExpr::ScalarDiff(a) | FormExpr::LieBracketForm(a) => {
                a.has_nontensorial_part()
            }
        }
    }
}

/// Signed ordered partitions of `0..n` into consecutive blocks of the
/// given sizes, each block increasing. The sign is that of the permutation
/// obtained by concatenating the blocks.
pub fn shuffles(n: usize, sizes: &[usize]) -> Vec<(i32, Vec<Vec<usize>>)> {
    assert_eq!(sizes.iter().sum::<usize>(), n);
    let mut out = Vec::new();
    let remaining: Vec<usize> = (0..n).collect();
    shuffle_rec(&remaining, sizes, 1, &mut Vec::new(), &mut out);
    out
}

fn shuffle_rec(
    remaining: &[usize],
    sizes: &[usize],
    sign: i32,
    blocks: &mut Vec<Vec<usize>>,
    out: &mut Vec<(i32, Vec<Vec<usize>>)>,
) {
    let Some((&size, rest)) = sizes.split_first() else {
        out.push((sign, blocks.clone()));
        return;
    };
    for positions in combinations(remaining.len(), size) {
        // inversions: for each chosen position p, the unchosen ones before it
        let inv: usize = positions.iter().enumerate().map(|(idx, &p)| p - idx).sum();
        let s = if inv % 2 == 0 { sign } else { -sign };
        let block: Vec<usize> = positions.iter().map(|&p| remaining[p]).collect();
        let left: Vec<usize> = remaining
            .iter()
            .enumerate()
            .filter(|(i, _)| !positions.contains(i))
            .map(|(_, &v)| v)
            .collect();
        blocks.push(block);
        shuffle_rec(&left, rest, s, blocks, out);
        blocks.pop();
    }
}

/// Increasing `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

fn pick(args: &[Section], idx: &[usize]) -> Vec<Section> {
    idx.iter().map(|&i| args[i].clone()).collect()
}

/// Evaluates a form on sections of the setting's algebroid.
pub fn form_eval(form: &FormExpr, set: &Setting, args: &[Section]) -> Result<FormValue> {
    let (deg, _) = form.signature()?;
    if args.len() != deg {
        return Err(AcsError::Arity {
            expected: deg,
            got: args.len(),
        });
    }
    for a in args {
        set.alg.check_section(a)?;
    }
    eval_inner(form, set, args)
}

fn eval_inner(form: &FormExpr, set: &Setting, args: &[Section]) -> Result<FormValue> {
    match form {
        FormExpr::ConstFn(f) => Ok(FormValue::Scalar(f.clone())),
        FormExpr::ConstEnd(m) => {
            if m.rank() != set.rank {
                return Err(AcsError::DimensionMismatch(
                    "constant endomorphism has the wrong rank".into(),
                ));
            }
            Ok(FormValue::End(m.clone()))
        }
        FormExpr::Diff { plus, minus } => {
            let p = conn_matrix(plus, set, &args[0])?;
            let m = conn_matrix(minus, set, &args[0])?;
            Ok(FormValue::End(p.sub(&m)))
        }
        FormExpr::Curv(c) => Ok(FormValue::End(curvature_matrix(
            c, set, &args[0], &args[1],
        )?)),
        FormExpr::Wedge(a, b) => {
            let p = a.degree()?;
            let q = b.degree()?;
            let mut acc: Option<FormValue> = None;
            for (sign, blocks) in shuffles(p + q, &[p, q]) {
                let va = eval_inner(a, set, &pick(args, &blocks[0]))?;
                if va.is_zero() {
                    acc.get_or_insert_with(|| va.zero_like());
                    continue;
                }
                let vb = eval_inner(b, set, &pick(args, &blocks[1]))?;
                let term = va.mul(&vb);
                let term = if sign < 0 { term.neg() } else { term };
                acc = Some(match acc {
                    None => term,
                    Some(x) => x.add(&term)?,
                });
            }
            finish_sum(acc, form, set)
        }
        FormExpr::Power { form: inner, p } => eval_power(inner, *p, set, args),
        FormExpr::TraceStar(a) => {
            let m = eval_inner(a, set, args)?.into_end("trace")?;
            Ok(FormValue::Scalar(m.trace()))
        }
        FormExpr::CovDiff {
            connection,
            form: inner,
        } => {
            let covariant = |a: &Section, v: FormValue| -> Result<FormValue> {
                let rho = v.apply_field(&set.alg.anchor_field(a));
                match &v {
                    FormValue::Scalar(_) => Ok(rho),
                    FormValue::End(m) => Ok(FormValue::End(
                        rho.into_end("cov diff")?
                            .add(&conn_matrix(connection, set, a)?.commutator(m)),
                    )),
                }
            };
            exterior_derivative(inner, set, args, covariant)
        }
        FormExpr::ScalarDiff(inner) => exterior_derivative(inner, set, args, |a, v| {
            Ok(v.apply_field(&set.alg.anchor_field(a)))
        }),
        FormExpr::SigmaPullback { form: inner, j, k } => eval_sigma(inner, *j, *k, set, args),
        FormExpr::LieBracketForm(l) => {
            let a = eval_inner(l, set, &args[..1])?.into_end("[λ, λ]")?;
            let b = eval_inner(l, set, &args[1..])?.into_end("[λ, λ]")?;
            Ok(FormValue::End(a.commutator(&b)))
        }
        FormExpr::Sum(terms) => {
            let mut acc: Option<FormValue> = None;
            for t in terms {
                let v = eval_inner(t, set, args)?;
                acc = Some(match acc {
                    None => v,
                    Some(x) => x.add(&v)?,
                });
            }
            acc.ok_or_else(|| AcsError::InvalidArgument("empty sum of forms".into()))
        }
        FormExpr::Scale { c, form: inner } => Ok(eval_inner(inner, set, args)?.scale_ratio(c)),
        FormExpr::SimplexIntegral { form: inner, k } => {
            if set.arity() != 0 {
                return Err(AcsError::InvalidArgument(
                    "simplex integrals are evaluated over the base algebroid".into(),
                ));
            }
            if *k == 0 {
                return eval_inner(inner, set, args);
            }
            let prod = set.with_arity(*k)?;
            let mut full: Vec<Section> = (0..*k).map(|s| prod.alg.dt(s)).collect();
            full.extend(args.iter().map(|a| a.lift(*k)));
            let v = eval_inner(inner, &prod, &full)?;
            v.try_map(|f| simplex_integrate_frac(f, *k))
        }
        FormExpr::Ref(name) => Err(AcsError::UnresolvedRef(name.clone())),
    }
}

fn finish_sum(acc: Option<FormValue>, form: &FormExpr, set: &Setting) -> Result<FormValue> {
    match acc {
        Some(v) => Ok(v),
        None => Ok(match form.signature()?.1 {
            Kind::Scalar => FormValue::Scalar(RFrac::zero()),
            Kind::End => FormValue::End(EndMat::zero(set.rank)),
        }),
    }
}

/// `α^p` by enumerating ordered block partitions with cached block values;
/// terms containing a vanishing block are skipped.
fn eval_power(alpha: &FormExpr, p: usize, set: &Setting, args: &[Section]) -> Result<FormValue> {
    let d = alpha.degree()?;
    let n = d * p;
    if d == 0 {
        let v = eval_inner(alpha, set, &[])?;
        let mut acc = v.clone();
        for _ in 1..p {
            acc = acc.mul(&v);
        }
        return Ok(acc);
    }
    let mut cache: HashMap<Vec<usize>, FormValue> = HashMap::new();
    for block in combinations(n, d) {
        let v = eval_inner(alpha, set, &pick(args, &block))?;
        cache.insert(block, v);
    }
    let mut acc: Option<FormValue> = None;
    let remaining: Vec<usize> = (0..n).collect();
    power_rec(&remaining, p, d, 1, None, &cache, &mut acc)?;
    finish_sum(acc, &FormExpr::power(alpha.clone(), p), set)
}

fn power_rec(
    remaining: &[usize],
    left: usize,
    d: usize,
    sign: i32,
    prefix: Option<&FormValue>,
    cache: &HashMap<Vec<usize>, FormValue>,
    acc: &mut Option<FormValue>,
) -> Result<()> {
    if left == 0 {
        let v = prefix.expect("at least one block");
        let term = if sign < 0 { v.neg() } else { v.clone() };
        *acc = Some(match acc.take() {
            None => term,
            Some(x) => x.add(&term)?,
        });
        return Ok(());
    }
    for positions in combinations(remaining.len(), d) {
        let block: Vec<usize> = positions.iter().map(|&p| remaining[p]).collect();
        let v = &cache[&block];
        if v.is_zero() {
            if acc.is_none() {
                *acc = Some(v.zero_like());
            }
            continue;
        }
        let inv: usize = positions.iter().enumerate().map(|(idx, &p)| p - idx).sum();
        let s = if inv % 2 == 0 { sign } else { -sign };
        let rest: Vec<usize> = remaining
            .iter()
            .enumerate()
            .filter(|(i, _)| !positions.contains(i))
            .map(|(_, &v)| v)
            .collect();
        let next = match prefix {
            None => v.clone(),
            Some(pv) => pv.mul(v),
        };
        if next.is_zero() {
            if acc.is_none() {
                *acc = Some(next.zero_like());
            }
            continue;
        }
        power_rec(&rest, left - 1, d, s, Some(&next), cache, acc)?;
    }
    Ok(())
}

/// `Σ (−1)^i D_{a_i}(η(.. âᵢ ..)) + Σ_{i<j} (−1)^{i+j} η([aᵢ, aⱼ], .. âᵢ .. âⱼ ..)`.
fn exterior_derivative<F>(
    eta: &FormExpr,
    set: &Setting,
    args: &[Section],
    act: F,
) -> Result<FormValue>
where
    F: Fn(&Section, FormValue) -> Result<FormValue>,
{
    let n = args.len();
    let mut acc: Option<FormValue> = None;
    let mut push = |v: FormValue, negative: bool| -> Result<()> {
        let v = if negative { v.neg() } else { v };
        acc = Some(match acc.take() {
            None => v,
            Some(x) => x.add(&v)?,
        });
        Ok(())
    };
    for i in 0..n {
        let rest: Vec<Section> = args
            .iter()
            .enumerate()
            .filter(|(l, _)| *l != i)
            .map(|(_, a)| a.clone())
            .collect();
        let v = eval_inner(eta, set, &rest)?;
        push(act(&args[i], v)?, i % 2 == 1)?;
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let br = set.alg.bracket(&args[i], &args[j])?;
            if br.is_zero() {
                continue;
            }
            let mut rest = vec![br];
            rest.extend(
                args.iter()
                    .enumerate()
                    .filter(|(l, _)| *l != i && *l != j)
                    .map(|(_, a)| a.clone()),
            );
            let v = eval_inner(eta, set, &rest)?;
            push(v, (i + j) % 2 == 1)?;
        }
    }
    match acc {
        Some(v) => Ok(v),
        None => finish_sum(None, eta, set),
    }
}

/// Pushes a section of `Tℝ^{k−1} × A` forward along `σ_j^{k−1}`. Coefficients
/// are extended off the face by the affine retraction that forgets the
/// coordinate inserted by the face map.
fn push_forward(b: &Section, j: usize, k: usize, target: &Setting) -> Result<Section> {
    let m = k - 1;
    let retract = |v: Var| -> Option<MPoly> {
        match v {
            Var::T(z) if (z as usize) < m => {
                let z = z as usize;
                // t'_{z+1} ↦ t_{z+1} before the inserted slot, t_{z+2} after
                let target_idx = if j >= 1 && z + 1 < j { z } else { z + 1 };
                Some(MPoly::t(target_idx))
            }
            _ => None,
        }
    };
    let ext = |f: &RFrac| f.substitute(retract);
    let mut coeffs = vec![RFrac::zero(); target.alg.frame_len()];
    for z in 0..m {
        let c = ext(b.coeff(z))?;
        if c.is_zero() {
            continue;
        }
        if j == 0 {
            coeffs[0] = &coeffs[0] - &c;
            coeffs[z + 1] = &coeffs[z + 1] + &c;
        } else if z + 1 < j {
            coeffs[z] = &coeffs[z] + &c;
        } else {
            coeffs[z + 1] = &coeffs[z + 1] + &c;
        }
    }
    for i in 0..target.alg.rank() {
        coeffs[k + i] = ext(b.coeff(m + i))?;
    }
    Ok(Section::new(coeffs))
}

/// `t ↦ σ_j^{k−1}(t)` as a substitution on the variables of `Tℝᵏ × A`.
pub fn face_substitution(j: usize, k: usize) -> impl Fn(Var) -> Option<MPoly> {
    move |v: Var| match v {
        Var::T(s) if (s as usize) < k => {
            let s = s as usize; // coordinate s+1 of ℝᵏ
            if j == 0 {
                if s == 0 {
                    let mut w = MPoly::one();
                    for z in 0..k - 1 {
                        w = &w - &MPoly::t(z);
                    }
                    Some(w)
                } else {
                    Some(MPoly::t(s - 1))
                }
            } else if s + 1 < j {
                Some(MPoly::t(s))
            } else if s + 1 == j {
                Some(MPoly::zero())
            } else {
                Some(MPoly::t(s - 1))
            }
        }
        _ => None,
    }
}

fn eval_sigma(
    inner: &FormExpr,
    j: usize,
    k: usize,
    set: &Setting,
    args: &[Section],
) -> Result<FormValue> {
    if k == 0 || j > k {
        return Err(AcsError::InvalidArgument(format!(
            "face index {j} outside 0..={k} or k = 0"
        )));
    }
    if set.arity() != k - 1 {
        return Err(AcsError::InvalidArgument(format!(
            "pullback from Tℝ^{k} x A must be evaluated over Tℝ^{} x A",
            k - 1
        )));
    }
    let target = set.with_arity(k)?;
    let pushed = args
        .iter()
        .map(|b| push_forward(b, j, k, &target))
        .collect::<Result<Vec<_>>>()?;
    let v = eval_inner(inner, &target, &pushed)?;
    let sub = face_substitution(j, k);
    v.try_map(|f| f.substitute(&sub))
}

/// `∫_{Δᵏ}dω + (−1)^{k+1} d∫_{Δᵏ}ω − Σ_j (−1)^j ∫_{Δ^{k−1}} σ_j^*ω` for a
/// scalar form `ω` on `Tℝᵏ × A`, as a form on `A`.
pub fn stokes_residual_form(omega: &FormExpr, k: usize) -> FormExpr {
    let sign = |e: usize| Ratio::from_int(if e % 2 == 0 { 1 } else { -1 });
    let mut terms = vec![
        FormExpr::integral(FormExpr::d(omega.clone()), k),
        FormExpr::scale(
            sign(k + 1),
            FormExpr::d(FormExpr::integral(omega.clone(), k)),
        ),
    ];
    for j in 0..=k {
        terms.push(FormExpr::scale(
            -sign(j),
            FormExpr::integral(FormExpr::sigma(omega.clone(), j, k), k - 1),
        ));
    }
    FormExpr::sum(terms)
}

/// Exact Stokes residual on base sections (`deg ω − k + 1` of them).
pub fn stokes_check(omega: &FormExpr, k: usize, base: &Setting, args: &[Section]) -> Result<RFrac> {
    if k == 0 || k > 3 {
        return Err(AcsError::InvalidArgument(
            "Stokes checks support k ≤ 3".into(),
        ));
    }
    form_eval(&stokes_residual_form(omega, k), base, args)?.into_scalar("Stokes residual")
}

/// Dense coefficients of a scalar form on the frame `k`-tuples, in
/// lexicographic order.
pub fn dense_on_frame(form: &FormExpr, set: &Setting) -> Result<Vec<RFrac>> {
    let (deg, kind) = form.signature()?;
    if kind != Kind::Scalar {
        return Err(AcsError::KindMismatch(
            "dense coefficients need a scalar form".into(),
        ));
    }
    combinations(set.alg.frame_len(), deg)
        .into_iter()
        .map(|idx| {
            let args: Vec<Section> = idx.iter().map(|&i| set.alg.frame(i)).collect();
            form_eval(form, set, &args)?.into_scalar("dense")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::random::random_sections;

    fn perm_sign(p: &[usize]) -> i32 {
        let mut s = 1;
        for i in 0..p.len() {
            for j in (i + 1)..p.len() {
                if p[i] > p[j] {
                    s = -s;
                }
            }
        }
        s
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn shuffle_counts_and_signs() {
        assert_eq!(shuffles(4, &[2, 2]).len(), 6);
        assert_eq!(shuffles(6, &[2, 2, 2]).len(), 90);
        for (sign, blocks) in shuffles(5, &[2, 1, 2]) {
            let flat: Vec<usize> = blocks.concat();
            assert_eq!(sign, perm_sign(&flat));
        }
    }

    /// `1/2^p Σ_{τ ∈ S_{2p}} sgn τ R(a_τ1, a_τ2) ∘ ... ∘ R(a_τ(2p−1), a_τ2p)`.
    fn full_sum_power(conn: &ConnectionExpr, set: &Setting, args: &[Section], p: usize) -> EndMat {
        let n = 2 * p;
        let mut acc = EndMat::zero(set.rank);
        for perm in permutations(n) {
            let mut prod = EndMat::identity(set.rank);
            for b in 0..p {
                let r = curvature_matrix(conn, set, &args[perm[2 * b]], &args[perm[2 * b + 1]])
                    .unwrap();
                prod = prod.mul(&r);
            }
            acc = if perm_sign(&perm) > 0 {
                acc.add(&prod)
            } else {
                acc.sub(&prod)
            };
        }
        acc.scale_ratio(&Ratio::new(1, 1 << p))
    }

    #[test]
    fn power_matches_full_antisymmetrization() {
        for (name, set, conns) in fixtures::connection_zoo().into_iter().take(3) {
            let (_, conn) = conns
                .iter()
                .find(|(_, c)| c.native_arity().unwrap() == 0)
                .unwrap();
            for p in 1..=2 {
                let args = random_sections(&set.alg, 2 * p, 1, 21 + p as u64);
                let v = form_eval(
                    &FormExpr::power(FormExpr::curv(conn.clone()), p),
                    &set,
                    &args,
                )
                .unwrap();
                assert_eq!(
                    v,
                    FormValue::End(full_sum_power(conn, &set, &args, p)),
                    "{name} p={p}"
                );
            }
        }
    }

    #[test]
    fn swapping_arguments_flips_sign() {
        let set = Setting::new(fixtures::foliation(), 2);
        let conn = fixtures::connection_zoo_for("foliation")[0].1.clone();
        let f = FormExpr::trace(FormExpr::wedge(
            FormExpr::curv(conn.clone()),
            FormExpr::diff(ConnectionExpr::Adjoint, conn),
        ));
        let a = random_sections(&set.alg, 3, 1, 2);
        let v = form_eval(&f, &set, &a).unwrap();
        let w = form_eval(&f, &set, &[a[1].clone(), a[0].clone(), a[2].clone()]).unwrap();
        assert_eq!(v, w.neg());
    }

    #[test]
    fn diff_of_equal_connections_vanishes() {
        let set = Setting::new(fixtures::so3(), 3);
        let a = random_sections(&set.alg, 1, 1, 2);
        let v = form_eval(
            &FormExpr::diff(ConnectionExpr::Adjoint, ConnectionExpr::Adjoint),
            &set,
            &a,
        )
        .unwrap();
        assert!(v.is_zero());
    }

    #[test]
    fn trace_of_identity() {
        let set = Setting::new(fixtures::so3(), 3);
        let v = form_eval(
            &FormExpr::trace(FormExpr::ConstEnd(EndMat::identity(3))),
            &set,
            &[],
        )
        .unwrap();
        assert_eq!(v, FormValue::Scalar(RFrac::int(3)));
    }

    #[test]
    fn differential_of_zero_forms() {
        let set = Setting::new(fixtures::foliation(), 2);
        let a = random_sections(&set.alg, 1, 2, 9);
        let f = RFrac::from_poly(&MPoly::x(0) * &MPoly::x(1));
        let df = form_eval(&FormExpr::d(FormExpr::ConstFn(f.clone())), &set, &a).unwrap();
        assert_eq!(
            df,
            FormValue::Scalar(set.alg.anchor_apply(&a[0], &f).unwrap())
        );
        let phi = EndMat::from_fn(2, |i, j| RFrac::from_poly(MPoly::x(i).pow(j as u32 + 1)));
        let conn = ConnectionExpr::Adjoint;
        let dphi = form_eval(
            &FormExpr::cov_diff(conn.clone(), FormExpr::ConstEnd(phi.clone())),
            &set,
            &a,
        )
        .unwrap();
        let om = conn_matrix(&conn, &set, &a[0]).unwrap();
        assert_eq!(
            dphi,
            FormValue::End(
                phi.apply_field(&set.alg.anchor_field(&a[0]))
                    .add(&om.commutator(&phi))
            )
        );
    }

    #[test]
    fn arity_and_kind_errors() {
        let set = Setting::new(fixtures::so3(), 3);
        let a = random_sections(&set.alg, 3, 1, 2);
        let curv = FormExpr::curv(ConnectionExpr::Adjoint);
        assert_eq!(
            form_eval(&curv, &set, &a),
            Err(AcsError::Arity {
                expected: 2,
                got: 3
            })
        );
        assert!(matches!(
            FormExpr::d(curv.clone()).signature(),
            Err(AcsError::KindMismatch(_))
        ));
        assert!(matches!(
            FormExpr::trace(FormExpr::ConstFn(RFrac::one())).signature(),
            Err(AcsError::KindMismatch(_))
        ));
    }

    #[test]
    fn face_maps_at_k1() {
        // k = 1: j = 1 restricts to t = 0, j = 0 to t = 1
        let set = Setting::new(fixtures::so3(), 3);
        let omega = FormExpr::ConstFn(RFrac::from_poly(&MPoly::t(0) + &MPoly::int(5)));
        let v1 = form_eval(&FormExpr::sigma(omega.clone(), 1, 1), &set, &[]).unwrap();
        let v0 = form_eval(&FormExpr::sigma(omega, 0, 1), &set, &[]).unwrap();
        assert_eq!(v1, FormValue::Scalar(RFrac::int(5)));
        assert_eq!(v0, FormValue::Scalar(RFrac::int(6)));
    }

    #[test]
    fn face_zero_direction_at_k2() {
        // dσ_0(∂/∂t¹) = −∂/∂t¹ + ∂/∂t², and t ↦ (1 − t₁, t₁)
        let prod1 = Setting::new(fixtures::so3(), 3).with_arity(1).unwrap();
        let prod2 = prod1.with_arity(2).unwrap();
        let pushed = push_forward(&prod1.alg.dt(0), 0, 2, &prod2).unwrap();
        let mut expected = Section::zero(5);
        expected = expected.add(&prod2.alg.dt(1)).sub(&prod2.alg.dt(0));
        assert_eq!(pushed, expected);
        let sub = face_substitution(0, 2);
        let f = RFrac::from_poly(&MPoly::t(0) * &MPoly::t(1));
        let g = f.substitute(&sub).unwrap();
        assert_eq!(
            g,
            RFrac::from_poly(&(&MPoly::one() - &MPoly::t(0)) * &MPoly::t(0))
        );
        // j = 1, 2 at k = 2
        let g1 = f.substitute(face_substitution(1, 2)).unwrap();
        assert!(g1.is_zero());
        let h = RFrac::from_poly(&MPoly::t(0) + &MPoly::t(1).scale(&Ratio::from_int(3)));
        assert_eq!(
            h.substitute(face_substitution(1, 2)).unwrap(),
            RFrac::from_poly(MPoly::t(0).scale(&Ratio::from_int(3)))
        );
        assert_eq!(
            h.substitute(face_substitution(2, 2)).unwrap(),
            RFrac::from_poly(MPoly::t(0))
        );
    }

    #[test]
    fn stokes_on_a_pulled_back_closed_form() {
        let set = Setting::new(fixtures::tangent_chart(2), 2);
        let f = RFrac::from_poly(&MPoly::x(0).pow(2) * &MPoly::x(1));
        // d f is closed; as a form on Tℝ¹ × A it does not depend on t
        let omega = FormExpr::d(FormExpr::ConstFn(f));
        let args = random_sections(&set.alg, 1, 2, 4);
        assert!(stokes_check(&omega, 1, &set, &args).unwrap().is_zero());
    }

    #[test]
    fn dense_table_of_a_zero_form() {
        let set = Setting::new(fixtures::abelian(3), 3);
        let tr = FormExpr::trace(FormExpr::power(FormExpr::ConstEnd(EndMat::identity(3)), 1));
        assert_eq!(dense_on_frame(&tr, &set).unwrap(), vec![RFrac::int(3)]);
    }
}
