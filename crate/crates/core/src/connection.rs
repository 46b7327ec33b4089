//! ℝ-linear connections as a closed term algebra.
//!
//! Every constructor evaluates to an operator of the form
//! `∇_a s = ρ(a)(s) + Ω(a)·s` where `Ω(a)` is an `End(E)` matrix that is
//! ℝ-linear (not necessarily function-linear) in `a`. [`conn_matrix`]
//! computes `Ω(a)`; everything else is derived from it.
//!
//! A connection has a native simplex arity: 0 for connections of `A`, `k`
//! for affine combinations of `k + 1` connections and for liftings to
//! `Tℝᵏ × A`. A connection of arity 0 evaluated over a product algebroid
//! acts as its lifting.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebroid::{AlgebroidSpec, AxiomReport, Section};
use crate::arith::{MPoly, RFrac, Ratio, Var};
use crate::bundle::{ESection, EndMat, Metric};
use crate::error::{AcsError, Result};
use crate::forms::{form_eval, FormExpr};
use crate::random::{random_esection, random_frac, random_section};

/// An algebroid together with the rank of the bundle `E`.
#[derive(Clone, Debug, PartialEq)]
pub struct Setting {
    pub alg: AlgebroidSpec,
    pub rank: usize,
}

impl Setting {
    pub fn new(alg: AlgebroidSpec, rank: usize) -> Setting {
        Setting { alg, rank }
    }

    pub fn arity(&self) -> usize {
        self.alg.simplex_arity()
    }

    pub fn base(&self) -> Setting {
        Setting {
            alg: self.alg.base(),
            rank: self.rank,
        }
    }

    pub fn with_arity(&self, k: usize) -> Result<Setting> {
        Ok(Setting {
            alg: self.alg.with_arity(k)?,
            rank: self.rank,
        })
    }

    pub fn check_esection(&self, s: &ESection) -> Result<()> {
        if s.rank() != self.rank {
            return Err(AcsError::DimensionMismatch(format!(
                "bundle section has {} coefficients, bundle rank is {}",
                s.rank(),
                self.rank
            )));
        }
        Ok(())
    }

    fn check_end(&self, m: &EndMat, what: &str) -> Result<()> {
        if m.rank() != self.rank {
            return Err(AcsError::DimensionMismatch(format!(
                "{what} is {0}x{0}, bundle rank is {1}",
                m.rank(),
                self.rank
            )));
        }
        Ok(())
    }
}

/// A metric given inline or by name in a fixture file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetricArg {
    Named(String),
    Inline(Metric),
}

impl MetricArg {
    pub fn metric(&self) -> Result<&Metric> {
        match self {
            MetricArg::Inline(m) => Ok(m),
            MetricArg::Named(n) => Err(AcsError::UnresolvedRef(n.clone())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ConnectionExpr {
    /// `∇_{eᵢ} ε_α = Σ_β Γ^β_{iα} ε_β`; `gamma[i]` is the matrix `(β, α)`.
    Christoffel {
        gamma: Vec<EndMat>,
    },
    /// `E = A`, `∇_a b = [a, b]`.
    Adjoint,
    PlusForm {
        base: Box<ConnectionExpr>,
        theta: Box<FormExpr>,
    },
    MetricAdjoint {
        base: Box<ConnectionExpr>,
        metric: MetricArg,
    },
    AffineCombination {
        connections: Vec<ConnectionExpr>,
    },
    Lift {
        base: Box<ConnectionExpr>,
        k: usize,
    },
    /// Adds `λ(Σ fʲ e_j) = ∂fⁱ/∂x^μ · T` (1-based `frame_index = i`, `chart_var = μ`).
    JetCorrection {
        base: Box<ConnectionExpr>,
        frame_index: usize,
        chart_var: usize,
        t: EndMat,
    },
    /// Adds `λ(Σ fʲ e_j) = fⁱ(p) · T`.
    BasepointCorrection {
        base: Box<ConnectionExpr>,
        frame_index: usize,
        point: Vec<Ratio>,
        t: EndMat,
    },
    Ref(String),
}

impl ConnectionExpr {
    pub fn christoffel(gamma: Vec<EndMat>) -> ConnectionExpr {
        ConnectionExpr::Christoffel { gamma }
    }

    pub fn trivial(n: usize, r: usize) -> ConnectionExpr {
        ConnectionExpr::Christoffel {
            gamma: vec![EndMat::zero(r); n],
        }
    }

    pub fn plus_form(self, theta: FormExpr) -> ConnectionExpr {
        ConnectionExpr::PlusForm {
            base: Box::new(self),
            theta: Box::new(theta),
        }
    }

    pub fn lift(self, k: usize) -> ConnectionExpr {
        ConnectionExpr::Lift {
            base: Box::new(self),
            k,
        }
    }

    pub fn jet(self, frame_index: usize, chart_var: usize, t: EndMat) -> ConnectionExpr {
        ConnectionExpr::JetCorrection {
            base: Box::new(self),
            frame_index,
            chart_var,
            t,
        }
    }

    pub fn basepoint(self, frame_index: usize, point: Vec<Ratio>, t: EndMat) -> ConnectionExpr {
        ConnectionExpr::BasepointCorrection {
            base: Box::new(self),
            frame_index,
            point,
            t,
        }
    }

    pub fn constructor_name(&self) -> &'static str {
        match self {
            ConnectionExpr::Christoffel { .. } => "Christoffel",
            ConnectionExpr::Adjoint => "Adjoint",
            ConnectionExpr::PlusForm { .. } => "PlusForm",
            ConnectionExpr::MetricAdjoint { .. } => "MetricAdjoint",
            ConnectionExpr::AffineCombination { .. } => "AffineCombination",
            ConnectionExpr::Lift { .. } => "Lift",
            ConnectionExpr::JetCorrection { .. } => "JetCorrection",
            ConnectionExpr::BasepointCorrection { .. } => "BasepointCorrection",
            ConnectionExpr::Ref(_) => "Ref",
        }
    }

    /// True if the term contains a constructor that is not function-linear
    /// in its direction argument by construction.
    pub fn has_nontensorial_part(&self) -> bool {
        match self {
            ConnectionExpr::Adjoint
            | ConnectionExpr::JetCorrection { .. }
            | ConnectionExpr::BasepointCorrection { .. } => true,
            ConnectionExpr::Christoffel { .. } | ConnectionExpr::Ref(_) => false,
            ConnectionExpr::PlusForm { base, theta } => {
                base.has_nontensorial_part() || theta.has_nontensorial_part()
            }
            ConnectionExpr::MetricAdjoint { base, .. } | ConnectionExpr::Lift { base, .. } => {
                base.has_nontensorial_part()
            }
            ConnectionExpr::AffineCombination { connections } => {
                connections.iter().any(Self::has_nontensorial_part)
            }
        }
    }

    pub fn native_arity(&self) -> Result<usize> {
        match self {
            ConnectionExpr::Christoffel { .. } | ConnectionExpr::Adjoint => Ok(0),
            ConnectionExpr::PlusForm { base, .. }
            | ConnectionExpr::MetricAdjoint { base, .. }
            | ConnectionExpr::JetCorrection { base, .. }
            | ConnectionExpr::BasepointCorrection { base, .. } => base.native_arity(),
            ConnectionExpr::AffineCombination { connections } => {
                if connections.len() < 2 {
                    return Err(AcsError::InvalidArgument(
                        "affine combination needs at least two connections".into(),
                    ));
                }
                for c in connections {
                    if c.native_arity()? != 0 {
                        return Err(AcsError::InvalidArgument(
                            "affine combination constituents must be connections of the base algebroid".into(),
                        ));
                    }
                }
                Ok(connections.len() - 1)
            }
            ConnectionExpr::Lift { base, k } => {
                if base.native_arity()? != 0 {
                    return Err(AcsError::InvalidArgument(
                        "only connections of the base algebroid can be lifted".into(),
                    ));
                }
                if *k == 0 {
                    return Err(AcsError::InvalidArgument(
                        "lift arity must be positive".into(),
                    ));
                }
                Ok(*k)
            }
            ConnectionExpr::Ref(name) => Err(AcsError::UnresolvedRef(name.clone())),
        }
    }
}

/// `∇^h`. The metric adjoint of a metric adjoint with the same metric is
/// the original connection.
pub fn metric_adjoint(conn: &ConnectionExpr, h: &Metric) -> ConnectionExpr {
    if let ConnectionExpr::MetricAdjoint {
        base,
        metric: MetricArg::Inline(m),
    } = conn
    {
        if m == h {
            return (**base).clone();
        }
    }
    ConnectionExpr::MetricAdjoint {
        base: Box::new(conn.clone()),
        metric: MetricArg::Inline(h.clone()),
    }
}

/// `∇^{aff_k}` of `∇⁰..∇ᵏ`, a connection of `Tℝᵏ × A`.
pub fn affine_combination(conns: &[ConnectionExpr]) -> Result<ConnectionExpr> {
    let out = ConnectionExpr::AffineCombination {
        connections: conns.to_vec(),
    };
    out.native_arity()?;
    Ok(out)
}

/// `Ω(a)` for `a` a section of the setting's algebroid.
pub fn conn_matrix(conn: &ConnectionExpr, set: &Setting, a: &Section) -> Result<EndMat> {
    set.alg.check_section(a)?;
    let native = conn.native_arity()?;
    let k = set.arity();
    if native == k {
        native_matrix(conn, set, a)
    } else if native == 0 {
        native_matrix(conn, &set.base(), &a.a_part(k))
    } else {
        Err(AcsError::InvalidArgument(format!(
            "connection of Tℝ^{native} x A evaluated over Tℝ^{k} x A"
        )))
    }
}

fn frame_coeff<'a>(set: &Setting, a: &'a Section, frame_index: usize) -> Result<&'a RFrac> {
    if frame_index == 0 || frame_index > set.alg.rank() {
        return Err(AcsError::InvalidArgument(format!(
            "frame index {frame_index} outside 1..={}",
            set.alg.rank()
        )));
    }
    Ok(a.coeff(set.arity() + frame_index - 1))
}

fn native_matrix(conn: &ConnectionExpr, set: &Setting, a: &Section) -> Result<EndMat> {
    let k = set.arity();
    let r = set.rank;
    match conn {
        ConnectionExpr::Christoffel { gamma } => {
            if gamma.len() != set.alg.rank() {
                return Err(AcsError::DimensionMismatch(format!(
                    "Christoffel data has {} matrices, algebroid rank is {}",
                    gamma.len(),
                    set.alg.rank()
                )));
            }
            let mut out = EndMat::zero(r);
            for (i, g) in gamma.iter().enumerate() {
                set.check_end(g, "Christoffel matrix")?;
                let f = a.coeff(k + i);
                if !f.is_zero() {
                    out = out.add(&g.scale(f));
                }
            }
            Ok(out)
        }
        ConnectionExpr::Adjoint => {
            let n = set.alg.rank();
            if r != n {
                return Err(AcsError::DimensionMismatch(format!(
                    "adjoint connection needs E = A, but rank E = {r} and rank A = {n}"
                )));
            }
            // Ω(a)^l_j = Σ_i aⁱ c^l_{ij} − ρ(e_j)(a^l)
            let frame_fields: Vec<_> = (0..n)
                .map(|j| set.alg.anchor_field(&set.alg.frame(k + j)))
                .collect();
            let mut out = EndMat::zero(n);
            for l in 0..n {
                for j in 0..n {
                    let mut v = frame_fields[j].apply(a.coeff(k + l));
                    v = -v;
                    for i in 0..n {
                        let c = set.alg.structure(i, j, l);
                        let f = a.coeff(k + i);
                        if !c.is_zero() && !f.is_zero() {
                            v = &v + &(f * &RFrac::from_poly(c.clone()));
                        }
                    }
                    out.set(l, j, v);
                }
            }
            Ok(out)
        }
        ConnectionExpr::PlusForm { base, theta } => {
            let th = form_eval(theta, set, std::slice::from_ref(a))?.into_end("PlusForm form")?;
            set.check_end(&th, "PlusForm value")?;
            Ok(conn_matrix(base, set, a)?.add(&th))
        }
        ConnectionExpr::MetricAdjoint { base, metric } => {
            let h = metric.metric()?;
            set.check_end(h.matrix(), "metric")?;
            let om = conn_matrix(base, set, a)?;
            let rho_h = h.matrix().apply_field(&set.alg.anchor_field(a));
            Ok(h.inverse().mul(&rho_h.sub(&om.transpose().mul(h.matrix()))))
        }
        ConnectionExpr::AffineCombination { connections } => {
            let base_set = set.base();
            let ab = a.a_part(k);
            let mut w0 = MPoly::one();
            let mut out = EndMat::zero(r);
            for s in 1..connections.len() {
                let t = MPoly::t(s - 1);
                w0 = &w0 - &t;
                let om = conn_matrix(&connections[s], &base_set, &ab)?;
                out = out.add(&om.scale(&RFrac::from_poly(t)));
            }
            let om0 = conn_matrix(&connections[0], &base_set, &ab)?;
            Ok(out.add(&om0.scale(&RFrac::from_poly(w0))))
        }
        ConnectionExpr::Lift { base, .. } => conn_matrix(base, &set.base(), &a.a_part(k)),
        ConnectionExpr::JetCorrection {
            base,
            frame_index,
            chart_var,
            t,
        } => {
            set.check_end(t, "JetCorrection endomorphism")?;
            if *chart_var == 0 || *chart_var > set.alg.chart_dim() {
                return Err(AcsError::InvalidArgument(format!(
                    "chart variable {chart_var} outside 1..={}",
                    set.alg.chart_dim()
                )));
            }
            let f = frame_coeff(set, a, *frame_index)?;
            let df = f.derive(Var::X((*chart_var - 1) as u8));
            Ok(conn_matrix(base, set, a)?.add(&t.scale(&df)))
        }
        ConnectionExpr::BasepointCorrection {
            base,
            frame_index,
            point,
            t,
        } => {
            set.check_end(t, "BasepointCorrection endomorphism")?;
            if point.len() != set.alg.chart_dim() {
                return Err(AcsError::DimensionMismatch(format!(
                    "base point has {} coordinates, chart dimension is {}",
                    point.len(),
                    set.alg.chart_dim()
                )));
            }
            let f = frame_coeff(set, a, *frame_index)?;
            let values: Vec<(Var, Ratio)> = point
                .iter()
                .enumerate()
                .map(|(i, c)| (Var::X(i as u8), c.clone()))
                .collect();
            let fp = f.eval_vars(&values)?;
            Ok(conn_matrix(base, set, a)?.add(&t.scale(&fp)))
        }
        ConnectionExpr::Ref(name) => Err(AcsError::UnresolvedRef(name.clone())),
    }
}

/// `∇_a s`.
pub fn conn_eval(
    conn: &ConnectionExpr,
    set: &Setting,
    a: &Section,
    s: &ESection,
) -> Result<ESection> {
    set.check_esection(s)?;
    let om = conn_matrix(conn, set, a)?;
    Ok(s.apply_field(&set.alg.anchor_field(a)).add(&om.apply(s)))
}

/// `R(a, b) = ρ(a)Ω(b) − ρ(b)Ω(a) + [Ω(a), Ω(b)] − Ω([a, b])`.
pub fn curvature_matrix(
    conn: &ConnectionExpr,
    set: &Setting,
    a: &Section,
    b: &Section,
) -> Result<EndMat> {
    let oa = conn_matrix(conn, set, a)?;
    let ob = conn_matrix(conn, set, b)?;
    let ab = set.alg.bracket(a, b)?;
    let oab = conn_matrix(conn, set, &ab)?;
    let va = set.alg.anchor_field(a);
    let vb = set.alg.anchor_field(b);
    Ok(ob
        .apply_field(&va)
        .sub(&oa.apply_field(&vb))
        .add(&oa.commutator(&ob))
        .sub(&oab))
}

/// `∇_a ∇_b s − ∇_b ∇_a s − ∇_{[a,b]} s`, computed from the operator itself.
pub fn curvature_eval(
    conn: &ConnectionExpr,
    set: &Setting,
    a: &Section,
    b: &Section,
    s: &ESection,
) -> Result<ESection> {
    let ab = conn_eval(conn, set, a, &conn_eval(conn, set, b, s)?)?;
    let ba = conn_eval(conn, set, b, &conn_eval(conn, set, a, s)?)?;
    let br = conn_eval(conn, set, &set.alg.bracket(a, b)?, s)?;
    Ok(ab.sub(&ba).sub(&br))
}

/// Checks `∇_a(f s) = f ∇_a s + ρ(a)(f) s` on random triples for an
/// arbitrary operator `(a, s) ↦ ∇_a s`.
pub fn leibniz_check_op<F>(op: F, set: &Setting, samples: usize, seed: u64) -> AxiomReport
where
    F: Fn(&Section, &ESection) -> Result<ESection>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut witness = None;
    for sample in 0..samples {
        let a = random_section(&set.alg, &mut rng, 2);
        let s = random_esection(&set.alg, set.rank, &mut rng, 2);
        let f = random_frac(&set.alg, &mut rng, 2);
        let outcome = (|| -> Result<bool> {
            let lhs = op(&a, &s.scale(&f))?;
            let rhs = op(&a, &s)?
                .scale(&f)
                .add(&s.scale(&set.alg.anchor_apply(&a, &f)?));
            Ok(lhs == rhs)
        })();
        match outcome {
            Ok(true) => {}
            Ok(false) => {
                witness = Some(format!("sample {sample}: a = {a}, s = {s}, f = {f}"));
                break;
            }
            Err(e) => {
                witness = Some(format!("sample {sample}: {e}"));
                break;
            }
        }
    }
    let mut report = AxiomReport::default();
    report.push("leibniz", witness);
    report
}

pub fn leibniz_check(
    conn: &ConnectionExpr,
    set: &Setting,
    samples: usize,
    seed: u64,
) -> AxiomReport {
    leibniz_check_op(|a, s| conn_eval(conn, set, a, s), set, samples, seed)
}

/// Certifies flatness by probing the curvature on all frame pairs and on
/// `samples` random pairs; returns a description of the first non-zero probe.
pub fn flatness_probe(
    conn: &ConnectionExpr,
    set: &Setting,
    samples: usize,
    seed: u64,
) -> Result<Option<String>> {
    let len = set.alg.frame_len();
    for i in 0..len {
        for j in (i + 1)..len {
            let r = curvature_matrix(conn, set, &set.alg.frame(i), &set.alg.frame(j))?;
            if !r.is_zero() {
                return Ok(Some(format!("R(frame {}, frame {}) = {r}", i + 1, j + 1)));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for sample in 0..samples {
        let a = random_section(&set.alg, &mut rng, 2);
        let b = random_section(&set.alg, &mut rng, 2);
        let r = curvature_matrix(conn, set, &a, &b)?;
        if !r.is_zero() {
            return Ok(Some(format!("sample {sample}: R({a}, {b}) = {r}")));
        }
    }
    Ok(None)
}

pub fn require_flat(conn: &ConnectionExpr, set: &Setting, samples: usize, seed: u64) -> Result<()> {
    match flatness_probe(conn, set, samples, seed)? {
        None => Ok(()),
        Some(w) => Err(AcsError::NotFlat(w)),
    }
}

/// Checks `ρ(a) h(s, t) = h(∇_a s, t) + h(s, ∇_a t)` on random probes.
pub fn metric_probe(
    conn: &ConnectionExpr,
    h: &Metric,
    set: &Setting,
    samples: usize,
    seed: u64,
) -> Result<Option<String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for sample in 0..samples {
        let a = random_section(&set.alg, &mut rng, 2);
        let s = random_esection(&set.alg, set.rank, &mut rng, 2);
        let t = random_esection(&set.alg, set.rank, &mut rng, 2);
        let lhs = set.alg.anchor_apply(&a, &h.pair(&s, &t))?;
        let rhs = &h.pair(&conn_eval(conn, set, &a, &s)?, &t)
            + &h.pair(&s, &conn_eval(conn, set, &a, &t)?);
        if lhs != rhs {
            return Ok(Some(format!("sample {sample}: a = {a}, s = {s}, t = {t}")));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn x() -> RFrac {
        RFrac::from_poly(MPoly::x(0))
    }

    fn chart1() -> Setting {
        Setting::new(fixtures::tangent_chart(1), 1)
    }

    #[test]
    fn zero_christoffel_is_pure_leibniz() {
        let set = chart1();
        let conn = ConnectionExpr::trivial(1, 1);
        let s = ESection::new(vec![x()]);
        assert_eq!(
            conn_eval(&conn, &set, &set.alg.frame(0), &s).unwrap(),
            ESection::new(vec![RFrac::one()])
        );
    }

    #[test]
    fn adjoint_reads_the_bracket() {
        let set = Setting::new(fixtures::so3(), 3);
        let e2 = ESection::unit(3, 1);
        assert_eq!(
            conn_eval(&ConnectionExpr::Adjoint, &set, &set.alg.frame(0), &e2).unwrap(),
            ESection::unit(3, 2)
        );
    }

    #[test]
    fn adjoint_requires_e_equal_a() {
        let set = Setting::new(fixtures::so3(), 2);
        assert!(conn_matrix(&ConnectionExpr::Adjoint, &set, &set.alg.frame(0)).is_err());
    }

    #[test]
    fn basepoint_correction_hand_values() {
        let alg = fixtures::tangent_chart(1);
        let set = Setting::new(alg, 1);
        let conn =
            ConnectionExpr::trivial(1, 1).basepoint(1, vec![Ratio::zero()], EndMat::identity(1));
        let eps = ESection::unit(1, 0);
        let xe = set.alg.frame(0).scale(&x());
        assert!(conn_eval(&conn, &set, &xe, &eps).unwrap().is_zero());
        let x1e = set.alg.frame(0).scale(&(&x() + &RFrac::one()));
        assert_eq!(conn_eval(&conn, &set, &x1e, &eps).unwrap(), eps);
        // (x+1)·d(x)/dx + f¹(0)·x = 2x + 1
        let xeps = ESection::new(vec![x()]);
        assert_eq!(
            conn_eval(&conn, &set, &x1e, &xeps).unwrap(),
            ESection::new(vec![RFrac::from_poly(
                &MPoly::x(0).scale(&Ratio::from_int(2)) + &MPoly::one()
            )])
        );
    }

    #[test]
    fn constant_christoffel_curvature_is_commutator() {
        let set = Setting::new(fixtures::abelian(2), 2);
        let g1 = EndMat::from_ints(&[&[1, 2], &[0, -1]]);
        let g2 = EndMat::from_ints(&[&[0, 1], &[3, 1]]);
        let conn = ConnectionExpr::christoffel(vec![g1.clone(), g2.clone()]);
        let r = curvature_matrix(&conn, &set, &set.alg.frame(0), &set.alg.frame(1)).unwrap();
        assert_eq!(r, g1.mul(&g2).sub(&g2.mul(&g1)));
        let s = ESection::new(vec![RFrac::int(1), RFrac::int(-2)]);
        assert_eq!(
            curvature_eval(&conn, &set, &set.alg.frame(0), &set.alg.frame(1), &s).unwrap(),
            r.apply(&s)
        );
    }

    #[test]
    fn adjoint_on_so3_is_flat() {
        let set = Setting::new(fixtures::so3(), 3);
        assert_eq!(
            flatness_probe(&ConnectionExpr::Adjoint, &set, 3, 1).unwrap(),
            None
        );
        for i in 0..3 {
            for j in 0..3 {
                for l in 0..3 {
                    let s = ESection::unit(3, l);
                    let v = curvature_eval(
                        &ConnectionExpr::Adjoint,
                        &set,
                        &set.alg.frame(i),
                        &set.alg.frame(j),
                        &s,
                    );
                    assert!(v.unwrap().is_zero());
                }
            }
        }
    }

    #[test]
    fn matrix_and_operator_curvature_agree() {
        for (name, set, conns) in fixtures::connection_zoo() {
            let secs = crate::random::random_sections(&set.alg, 2, 2, 5);
            let mut rng = ChaCha8Rng::seed_from_u64(8);
            let s = random_esection(&set.alg, set.rank, &mut rng, 1);
            for (cname, conn) in &conns {
                let m = curvature_matrix(conn, &set, &secs[0], &secs[1]).unwrap();
                let op = curvature_eval(conn, &set, &secs[0], &secs[1], &s).unwrap();
                assert_eq!(m.apply(&s), op, "{name}/{cname}");
                assert!(curvature_matrix(conn, &set, &secs[0], &secs[0])
                    .unwrap()
                    .is_zero());
            }
        }
    }

    #[test]
    fn every_constructor_satisfies_leibniz() {
        for (name, set, conns) in fixtures::connection_zoo() {
            for (cname, conn) in &conns {
                let report = leibniz_check(conn, &set, 3, 17);
                assert!(
                    report.passed(),
                    "{name}/{cname}: {:?}",
                    report.first_failure()
                );
            }
        }
    }

    #[test]
    fn corrupted_operator_fails_leibniz() {
        let set = Setting::new(fixtures::tangent_chart(2), 2);
        let conn = ConnectionExpr::trivial(2, 2);
        let corrupted = |a: &Section, s: &ESection| -> Result<ESection> {
            let good = conn_eval(&conn, &set, a, s)?;
            Ok(good.add(&s.apply_field(&set.alg.anchor_field(a))))
        };
        let report = leibniz_check_op(corrupted, &set, 4, 3);
        assert!(!report.passed());
        assert!(report
            .first_failure()
            .unwrap()
            .witness
            .as_ref()
            .unwrap()
            .contains("a = "));
    }

    #[test]
    fn metric_adjoint_of_skew_christoffel_is_itself() {
        let set = Setting::new(fixtures::abelian(2), 2);
        let skew = EndMat::from_ints(&[&[0, 1], &[-1, 0]]);
        let conn =
            ConnectionExpr::christoffel(vec![skew.clone(), skew.scale_ratio(&Ratio::from_int(3))]);
        let h = Metric::identity(2);
        let adj = metric_adjoint(&conn, &h);
        for i in 0..2 {
            let a = set.alg.frame(i);
            assert_eq!(
                conn_matrix(&adj, &set, &a).unwrap(),
                conn_matrix(&conn, &set, &a).unwrap()
            );
        }
    }

    #[test]
    fn metric_adjoint_of_symmetric_christoffel_negates() {
        let set = Setting::new(fixtures::abelian(2), 2);
        let sym = EndMat::from_ints(&[&[1, 2], &[2, 5]]);
        let conn = ConnectionExpr::christoffel(vec![sym.clone(), EndMat::identity(2)]);
        let adj = metric_adjoint(&conn, &Metric::identity(2));
        assert_eq!(
            conn_matrix(&adj, &set, &set.alg.frame(0)).unwrap(),
            sym.neg()
        );
    }

    #[test]
    fn metric_adjoint_defining_identity_and_involution() {
        for (name, set, conns) in fixtures::connection_zoo() {
            let h = fixtures::sample_metric(&set);
            for (cname, conn) in &conns {
                if conn.native_arity().unwrap() != 0 {
                    continue;
                }
                let adj = metric_adjoint(conn, &h);
                let mut rng = ChaCha8Rng::seed_from_u64(4);
                let a = random_section(&set.alg, &mut rng, 2);
                let s = random_esection(&set.alg, set.rank, &mut rng, 2);
                let t = random_esection(&set.alg, set.rank, &mut rng, 2);
                let lhs = set.alg.anchor_apply(&a, &h.pair(&s, &t)).unwrap();
                let rhs = &h.pair(&conn_eval(conn, &set, &a, &s).unwrap(), &t)
                    + &h.pair(&s, &conn_eval(&adj, &set, &a, &t).unwrap());
                assert_eq!(lhs, rhs, "{name}/{cname}");
                // structural simplification, then the same fact by evaluation
                assert_eq!(&metric_adjoint(&adj, &h), conn);
                let twice = ConnectionExpr::MetricAdjoint {
                    base: Box::new(adj.clone()),
                    metric: MetricArg::Inline(h.clone()),
                };
                assert_eq!(
                    conn_matrix(&twice, &set, &a).unwrap(),
                    conn_matrix(conn, &set, &a).unwrap()
                );
            }
        }
    }

    #[test]
    fn affine_combination_endpoints() {
        let set = Setting::new(fixtures::foliation(), 2);
        let c0 = ConnectionExpr::trivial(2, 2);
        let c1 = ConnectionExpr::Adjoint;
        let aff = affine_combination(&[c0.clone(), c1.clone()]).unwrap();
        let prod = set.with_arity(1).unwrap();
        let a = crate::random::random_sections(&set.alg, 1, 2, 3).remove(0);
        let m = conn_matrix(&aff, &prod, &a.lift(1)).unwrap();
        let at = |v: i64| {
            m.try_map(|e| e.eval_vars(&[(Var::T(0), Ratio::from_int(v))]))
                .unwrap()
        };
        assert_eq!(at(0), conn_matrix(&c0, &set, &a).unwrap());
        assert_eq!(at(1), conn_matrix(&c1, &set, &a).unwrap());
        // aff(∇, ∇) is the lifting
        let same = affine_combination(&[c1.clone(), c1.clone()]).unwrap();
        assert_eq!(
            conn_matrix(&same, &prod, &a.lift(1)).unwrap(),
            conn_matrix(&c1.clone().lift(1), &prod, &a.lift(1)).unwrap()
        );
        assert!(affine_combination(&[c0]).is_err());
        assert!(affine_combination(&[aff.clone(), c1]).is_err());
        assert!(conn_matrix(&aff, &set, &a).is_err());
    }

    #[test]
    fn difference_of_connections_is_function_linear_in_e() {
        for (name, set, conns) in fixtures::connection_zoo() {
            let base: Vec<_> = conns
                .iter()
                .filter(|(_, c)| c.native_arity().unwrap() == 0)
                .collect();
            let mut rng = ChaCha8Rng::seed_from_u64(6);
            for w in base.windows(2) {
                let (c0, c1) = (&w[0].1, &w[1].1);
                let a = random_section(&set.alg, &mut rng, 2);
                let s = random_esection(&set.alg, set.rank, &mut rng, 2);
                let f = random_frac(&set.alg, &mut rng, 2);
                let diff = |s: &ESection| {
                    conn_eval(c1, &set, &a, s)
                        .unwrap()
                        .sub(&conn_eval(c0, &set, &a, s).unwrap())
                };
                assert_eq!(diff(&s.scale(&f)), diff(&s).scale(&f), "{name}");
            }
        }
    }
}
