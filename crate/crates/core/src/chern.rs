//! Chern character and Chern–Simons forms, their explicit low-degree
//! expressions, secondary class representatives, and the curvature
//! identities for pairs and affine combinations of connections.

use crate::algebroid::Section;
use crate::arith::{RFrac, Ratio};
use crate::bundle::{EndMat, Metric};
use crate::connection::{
    affine_combination, conn_matrix, curvature_matrix, metric_adjoint, metric_probe, require_flat,
    ConnectionExpr, Setting,
};
use crate::error::{AcsError, Result};
use crate::forms::{face_substitution, form_eval, FormExpr};

fn sign(e: usize) -> Ratio {
    Ratio::from_int(if e % 2 == 0 { 1 } else { -1 })
}

/// `ch_p(∇) = Tr_*(R^∇)^p`.
pub fn ch_form(conn: &ConnectionExpr, p: usize) -> FormExpr {
    FormExpr::trace(FormExpr::power(FormExpr::curv(conn.clone()), p))
}

/// `cs_p(∇⁰..∇ᵏ) = ∫_{Δᵏ} ch_p(∇^{aff_k})`, with `cs_p(∇⁰) = ch_p(∇⁰)`.
pub fn cs_form(conns: &[ConnectionExpr], p: usize) -> Result<FormExpr> {
    if p == 0 {
        return Err(AcsError::InvalidArgument("p must be positive".into()));
    }
    match conns.len() {
        0 => Err(AcsError::InvalidArgument(
            "at least one connection is required".into(),
        )),
        1 => Ok(ch_form(&conns[0], p)),
        n => {
            let k = n - 1;
            if k > 2 * p {
                return Err(AcsError::InvalidArgument(format!(
                    "k = {k} exceeds 2p = {}",
                    2 * p
                )));
            }
            Ok(FormExpr::integral(
                ch_form(&affine_combination(conns)?, p),
                k,
            ))
        }
    }
}

pub fn ch_eval(conn: &ConnectionExpr, p: usize, set: &Setting, args: &[Section]) -> Result<RFrac> {
    form_eval(&ch_form(conn, p), set, args)?.into_scalar("ch_p")
}

pub fn cs_eval(
    conns: &[ConnectionExpr],
    p: usize,
    set: &Setting,
    args: &[Section],
) -> Result<RFrac> {
    form_eval(&cs_form(conns, p)?, set, args)?.into_scalar("cs_p")
}

fn omit(conns: &[ConnectionExpr], j: usize) -> Vec<ConnectionExpr> {
    conns
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != j)
        .map(|(_, c)| c.clone())
        .collect()
}

/// `(−1)^{k+1} d cs_p(∇⁰..∇ᵏ) − Σ_j (−1)^j cs_p(..∇̂ʲ..)`; for a single
/// connection, `d ch_p(∇⁰)`.
pub fn transgression_residual_form(conns: &[ConnectionExpr], p: usize) -> Result<FormExpr> {
    let whole = cs_form(conns, p)?;
    if conns.len() == 1 {
        return Ok(FormExpr::d(whole));
    }
    let k = conns.len() - 1;
    let mut terms = vec![FormExpr::scale(sign(k + 1), FormExpr::d(whole))];
    for j in 0..=k {
        terms.push(FormExpr::scale(-sign(j), cs_form(&omit(conns, j), p)?));
    }
    Ok(FormExpr::sum(terms))
}

pub fn transgression_residual(
    conns: &[ConnectionExpr],
    p: usize,
    set: &Setting,
    args: &[Section],
) -> Result<RFrac> {
    form_eval(&transgression_residual_form(conns, p)?, set, args)?
        .into_scalar("transgression residual")
}

/// `ch_p(∇¹) − ch_p(∇⁰) − d cs_p(∇⁰, ∇¹)`.
pub fn independence_residual_form(
    c0: &ConnectionExpr,
    c1: &ConnectionExpr,
    p: usize,
) -> Result<FormExpr> {
    Ok(FormExpr::sum(vec![
        ch_form(c1, p),
        FormExpr::scale(sign(1), ch_form(c0, p)),
        FormExpr::scale(sign(1), FormExpr::d(cs_form(&[c0.clone(), c1.clone()], p)?)),
    ]))
}

/// `Tr(2θ∧R^∇ + θ∧d^∇̄θ + ⅔ θ∧θ∧θ)`.
pub fn cs2_explicit_form(conn: &ConnectionExpr, theta: &FormExpr) -> FormExpr {
    FormExpr::trace(FormExpr::sum(vec![
        FormExpr::scale(
            Ratio::from_int(2),
            FormExpr::wedge(theta.clone(), FormExpr::curv(conn.clone())),
        ),
        FormExpr::wedge(
            theta.clone(),
            FormExpr::cov_diff(conn.clone(), theta.clone()),
        ),
        FormExpr::scale(Ratio::new(2, 3), FormExpr::power(theta.clone(), 3)),
    ]))
}

/// `Tr(θ∧d^∇̄θ + ⅔ θ∧θ∧θ)`, equal to `cs₂(∇, ∇+θ)` for flat `∇`.
pub fn wz_form(conn: &ConnectionExpr, theta: &FormExpr) -> FormExpr {
    FormExpr::trace(FormExpr::sum(vec![
        FormExpr::wedge(
            theta.clone(),
            FormExpr::cov_diff(conn.clone(), theta.clone()),
        ),
        FormExpr::scale(Ratio::new(2, 3), FormExpr::power(theta.clone(), 3)),
    ]))
}

pub fn cs2_explicit_eval(
    conn: &ConnectionExpr,
    theta: &FormExpr,
    set: &Setting,
    args: &[Section],
) -> Result<RFrac> {
    form_eval(&cs2_explicit_form(conn, theta), set, args)?.into_scalar("cs_2")
}

/// `(−1)^{p+1} p!(p−1)!/(2p−1)!`.
pub fn flat_pair_coefficient(p: usize) -> Ratio {
    assert!(p >= 1, "p must be positive");
    let p32 = p as u32;
    let c = &(&Ratio::factorial(p32) * &Ratio::factorial(p32 - 1)) / &Ratio::factorial(2 * p32 - 1);
    if p % 2 == 1 {
        c
    } else {
        -&c
    }
}

/// `(−1)^{p+1} p!(p−1)!/(2p−1)! · Tr_*(λ^{2p−1})` with `λ = ∇¹ − ∇⁰`.
pub fn flat_pair_form(c0: &ConnectionExpr, c1: &ConnectionExpr, p: usize) -> FormExpr {
    let lambda = FormExpr::diff(c1.clone(), c0.clone());
    FormExpr::scale(
        flat_pair_coefficient(p),
        FormExpr::trace(FormExpr::power(lambda, 2 * p - 1)),
    )
}

/// The closed form for a pair of flat connections; flatness of both is
/// certified first.
pub fn cs_flat_pair_eval(
    c0: &ConnectionExpr,
    c1: &ConnectionExpr,
    p: usize,
    set: &Setting,
    args: &[Section],
    samples: usize,
    seed: u64,
) -> Result<RFrac> {
    if p == 0 {
        return Err(AcsError::InvalidArgument("p must be positive".into()));
    }
    require_flat(c0, set, samples, seed)?;
    require_flat(c1, set, samples, seed)?;
    form_eval(&flat_pair_form(c0, c1, p), set, args)?.into_scalar("flat pair")
}

/// A representative of `u_{2p−1}`, with a warning when `p` lies outside
/// `1..=rank E`.
#[derive(Clone, Debug, PartialEq)]
pub struct SecondaryClass {
    pub form: FormExpr,
    pub warning: Option<String>,
}

pub fn secondary_class_rep(conn: &ConnectionExpr, h: &Metric, p: usize) -> Result<SecondaryClass> {
    let form = cs_form(&[conn.clone(), metric_adjoint(conn, h)], p)?;
    let warning = (p > h.rank()).then(|| {
        format!(
            "p = {p} exceeds the bundle rank {}; the form is still defined",
            h.rank()
        )
    });
    Ok(SecondaryClass { form, warning })
}

/// `∇ + ½(∇^h − ∇)`, a metric connection for `h`.
pub fn metric_connection(conn: &ConnectionExpr, h: &Metric) -> ConnectionExpr {
    let half = FormExpr::scale(
        Ratio::new(1, 2),
        FormExpr::diff(metric_adjoint(conn, h), conn.clone()),
    );
    conn.clone().plus_form(half)
}

/// `cs_p(∇, ∇^h) − (1 + (−1)^{p+1}) cs_p(∇, ∇_m) + d cs_p(∇, ∇^h, ∇_m)`.
pub fn parity_chain_form(
    conn: &ConnectionExpr,
    conn_m: &ConnectionExpr,
    h: &Metric,
    p: usize,
) -> Result<FormExpr> {
    let adj = metric_adjoint(conn, h);
    let factor = &Ratio::one() + &sign(p + 1);
    Ok(FormExpr::sum(vec![
        cs_form(&[conn.clone(), adj.clone()], p)?,
        FormExpr::scale(-factor, cs_form(&[conn.clone(), conn_m.clone()], p)?),
        FormExpr::d(cs_form(&[conn.clone(), adj, conn_m.clone()], p)?),
    ]))
}

/// Evaluates the parity chain after checking that `∇_m` is metric.
pub fn parity_chain_residual(
    conn: &ConnectionExpr,
    conn_m: &ConnectionExpr,
    h: &Metric,
    p: usize,
    set: &Setting,
    args: &[Section],
    samples: usize,
    seed: u64,
) -> Result<RFrac> {
    if let Some(w) = metric_probe(conn_m, h, set, samples, seed)? {
        return Err(AcsError::NotMetric(w));
    }
    form_eval(&parity_chain_form(conn, conn_m, h, p)?, set, args)?.into_scalar("parity chain")
}

/// `cs_p(∇₀^h) − (−1)^p cs_p(∇₀)`.
pub fn adjoint_ch_parity_form(c0: &ConnectionExpr, h: &Metric, p: usize) -> FormExpr {
    FormExpr::sub(
        ch_form(&metric_adjoint(c0, h), p),
        FormExpr::scale(sign(p), ch_form(c0, p)),
    )
}

/// `cs_p(∇₀^h, ∇₁^h) − (−1)^p cs_p(∇₀, ∇₁)`.
pub fn adjoint_cs_parity_form(
    c0: &ConnectionExpr,
    c1: &ConnectionExpr,
    h: &Metric,
    p: usize,
) -> Result<FormExpr> {
    Ok(FormExpr::sub(
        cs_form(&[metric_adjoint(c0, h), metric_adjoint(c1, h)], p)?,
        FormExpr::scale(sign(p), cs_form(&[c0.clone(), c1.clone()], p)?),
    ))
}

/// `R^{∇¹} − R^{∇⁰} − d^{∇̄⁰}λ − [λ, λ]`, an End-valued 2-form.
pub fn pair_curvature_form(c0: &ConnectionExpr, c1: &ConnectionExpr) -> FormExpr {
    let lambda = FormExpr::diff(c1.clone(), c0.clone());
    FormExpr::sum(vec![
        FormExpr::curv(c1.clone()),
        FormExpr::scale(sign(1), FormExpr::curv(c0.clone())),
        FormExpr::scale(sign(1), FormExpr::cov_diff(c0.clone(), lambda.clone())),
        FormExpr::scale(sign(1), FormExpr::bracket(lambda)),
    ])
}

/// `R^{∇^h}(a, b) + (R^∇(a, b))*`, adjoint taken with respect to `h`.
pub fn curvature_adjoint_residual(
    conn: &ConnectionExpr,
    h: &Metric,
    set: &Setting,
    a: &Section,
    b: &Section,
) -> Result<EndMat> {
    let r = curvature_matrix(conn, set, a, b)?;
    let rh = curvature_matrix(&metric_adjoint(conn, h), set, a, b)?;
    Ok(rh.add(&h.adjoint_of(&r)))
}

/// `R^{aff₁}(∂/∂t, a) − λ(a)` over `Tℝ¹ × A`.
pub fn affine_time_curvature_residual(
    c0: &ConnectionExpr,
    c1: &ConnectionExpr,
    set: &Setting,
    a: &Section,
) -> Result<EndMat> {
    let prod = set.with_arity(1)?;
    let aff = affine_combination(&[c0.clone(), c1.clone()])?;
    let r = curvature_matrix(&aff, &prod, &prod.alg.dt(0), &a.lift(1))?;
    let lambda = conn_matrix(c1, set, a)?.sub(&conn_matrix(c0, set, a)?);
    Ok(r.sub(&lambda))
}

/// `R^{aff₁}(a, b) − [(1−t)R⁰ + tR¹ + (t²−t)[λ(a), λ(b)]]`, an identity of
/// polynomials in `t`.
pub fn affine_curvature_polynomial_residual(
    c0: &ConnectionExpr,
    c1: &ConnectionExpr,
    set: &Setting,
    a: &Section,
    b: &Section,
) -> Result<EndMat> {
    let prod = set.with_arity(1)?;
    let aff = affine_combination(&[c0.clone(), c1.clone()])?;
    let r = curvature_matrix(&aff, &prod, &a.lift(1), &b.lift(1))?;
    let t = RFrac::from_poly(crate::arith::MPoly::t(0));
    let one_minus_t = &RFrac::one() - &t;
    let t2_minus_t = &(&t * &t) - &t;
    let r0 = curvature_matrix(c0, set, a, b)?;
    let r1 = curvature_matrix(c1, set, a, b)?;
    let la = conn_matrix(c1, set, a)?.sub(&conn_matrix(c0, set, a)?);
    let lb = conn_matrix(c1, set, b)?.sub(&conn_matrix(c0, set, b)?);
    let expected = r0
        .scale(&one_minus_t)
        .add(&r1.scale(&t))
        .add(&la.commutator(&lb).scale(&t2_minus_t));
    Ok(r.sub(&expected))
}

fn aff_curvature(
    conns: &[ConnectionExpr],
    set: &Setting,
    a: &Section,
    b: &Section,
) -> Result<EndMat> {
    if conns.len() == 1 {
        let base = set.base();
        return curvature_matrix(
            &conns[0],
            &base,
            &a.a_part(set.arity()),
            &b.a_part(set.arity()),
        );
    }
    curvature_matrix(&affine_combination(conns)?, set, a, b)
}

fn restrict_to_face(m: &EndMat, j: usize, k: usize) -> Result<EndMat> {
    let sub = face_substitution(j, k);
    m.try_map(|f| f.substitute(&sub))
}

fn check_face(conns: &[ConnectionExpr], j: usize) -> Result<usize> {
    if conns.len() < 2 {
        return Err(AcsError::InvalidArgument(
            "faces need at least two connections".into(),
        ));
    }
    let k = conns.len() - 1;
    if j > k {
        return Err(AcsError::InvalidArgument(format!(
            "face index {j} outside 0..={k}"
        )));
    }
    Ok(k)
}

/// `R^{∇^{0..k}}(a, b)∘σ_j − R^{∇^{0..ĵ..k}}(a, b)` for base sections.
pub fn face_restriction_residual(
    conns: &[ConnectionExpr],
    j: usize,
    set: &Setting,
    a: &Section,
    b: &Section,
) -> Result<EndMat> {
    let k = check_face(conns, j)?;
    let prod = set.with_arity(k)?;
    let lhs = restrict_to_face(&aff_curvature(conns, &prod, &a.lift(k), &b.lift(k))?, j, k)?;
    let face = set.with_arity(k - 1)?;
    let rhs = aff_curvature(&omit(conns, j), &face, &a.lift(k - 1), &b.lift(k - 1))?;
    Ok(lhs.sub(&rhs))
}

/// `R^{∇^{0..k}}(∂/∂t̃ˢ, a)∘σ_j − R^{∇^{0..ĵ..k}}(∂/∂t^{s'}, a)` with `s' = s`
/// for `s < j` and `s' = s − 1` for `s > j`; `s` is 1-based and `j ≥ 1`.
pub fn face_slots_residual(
    conns: &[ConnectionExpr],
    j: usize,
    s: usize,
    set: &Setting,
    a: &Section,
) -> Result<EndMat> {
    let k = check_face(conns, j)?;
    if j == 0 || s == 0 || s > k || s == j {
        return Err(AcsError::InvalidArgument(format!(
            "slot shift needs 1 ≤ s ≤ {k}, j ≥ 1 and s ≠ j"
        )));
    }
    if k == 1 {
        return Err(AcsError::InvalidArgument(
            "no ∂/∂t slot survives on a 0-simplex".into(),
        ));
    }
    let prod = set.with_arity(k)?;
    let lhs = restrict_to_face(
        &aff_curvature(conns, &prod, &prod.alg.dt(s - 1), &a.lift(k))?,
        j,
        k,
    )?;
    let face = set.with_arity(k - 1)?;
    let s2 = if s < j { s } else { s - 1 };
    let rhs = aff_curvature(&omit(conns, j), &face, &face.alg.dt(s2 - 1), &a.lift(k - 1))?;
    Ok(lhs.sub(&rhs))
}

/// `R^{∇^{0..k}}(dσ_j(∂/∂t^z), a)∘σ_j − R^{∇^{0..ĵ..k}}(∂/∂t^z, a)`, `z` 1-based.
pub fn face_directions_residual(
    conns: &[ConnectionExpr],
    j: usize,
    z: usize,
    set: &Setting,
    a: &Section,
) -> Result<EndMat> {
    let k = check_face(conns, j)?;
    if z == 0 || z >= k {
        return Err(AcsError::InvalidArgument(format!(
            "direction index {z} outside 1..{k}"
        )));
    }
    let prod = set.with_arity(k)?;
    let pushed = if j == 0 {
        prod.alg.dt(z).sub(&prod.alg.dt(0))
    } else if z < j {
        prod.alg.dt(z - 1)
    } else {
        prod.alg.dt(z)
    };
    let lhs = restrict_to_face(&aff_curvature(conns, &prod, &pushed, &a.lift(k))?, j, k)?;
    let face = set.with_arity(k - 1)?;
    let rhs = aff_curvature(&omit(conns, j), &face, &face.alg.dt(z - 1), &a.lift(k - 1))?;
    Ok(lhs.sub(&rhs))
}
