//! Multivariate polynomial gcd over Q by recursive primitive pseudo-remainder
//! sequences. Used only to keep polynomial fractions in lowest terms, so it
//! favours simplicity over speed.

use std::collections::BTreeMap;

use super::mpoly::{MPoly, Mono, Var};
use super::ratio::Ratio;

/// Coefficients of `p` viewed as a univariate polynomial in `v`; entry `e` is
/// the coefficient of `v^e`.
fn coeffs_in(p: &MPoly, v: Var) -> Vec<MPoly> {
    let slot = v.slot();
    let deg = p.degree_in(v) as usize;
    let mut buckets: Vec<Vec<(Mono, Ratio)>> = vec![Vec::new(); deg + 1];
    for (m, c) in p.terms() {
        let e = m.0[slot] as usize;
        let mut rest = *m;
        rest.0[slot] = 0;
        buckets[e].push((rest, c.clone()));
    }
    buckets.into_iter().map(MPoly::from_terms).collect()
}

fn lead_coeff_in(p: &MPoly, v: Var) -> MPoly {
    coeffs_in(p, v).pop().unwrap_or_else(MPoly::zero)
}

/// Scales a non-zero polynomial so its lexicographically leading coefficient is 1.
pub fn make_monic(p: &MPoly) -> MPoly {
    match p.leading() {
        None => MPoly::zero(),
        Some((_, c)) => p.scale(&c.recip().expect("leading coefficient is non-zero")),
    }
}

fn content_in(p: &MPoly, v: Var) -> MPoly {
    let mut g = MPoly::zero();
    for c in coeffs_in(p, v).into_iter().filter(|c| !c.is_zero()) {
        g = poly_gcd(&g, &c);
        if g.is_one() {
            break;
        }
    }
    g
}

fn primitive_part_in(p: &MPoly, v: Var) -> MPoly {
    if p.is_zero() {
        return MPoly::zero();
    }
    let c = content_in(p, v);
    p.div_exact(&c)
        .expect("content is non-zero")
        .expect("content divides the polynomial")
}

/// Divides out the rational content so coefficients are coprime integers.
fn numeric_primitive(p: &MPoly) -> MPoly {
    let c = p.terms().iter().fold(Ratio::zero(), |g, (_, c)| g.gcd(c));
    if c.is_zero() || c.is_one() {
        return p.clone();
    }
    p.scale(&c.recip().expect("content is non-zero"))
}

/// Pseudo-remainder of `a` by `b` with respect to `v`.
fn prem(a: &MPoly, b: &MPoly, v: Var) -> MPoly {
    let db = b.degree_in(v);
    let lb = lead_coeff_in(b, v);
    let mut r = a.clone();
    while !r.is_zero() && r.degree_in(v) >= db {
        let dr = r.degree_in(v);
        let lr = lead_coeff_in(&r, v);
        let shift = MPoly::monomial(Mono::var(v, dr - db), Ratio::one());
        r = &(&lb * &r) - &(&(&lr * &shift) * b);
    }
    r
}

/// `gcd(small, big)` where `big` has variables outside `keep`: the gcd
/// divides every coefficient of `big` with respect to those variables.
fn gcd_with_coeffs(small: &MPoly, big: &MPoly, keep: &[Var]) -> MPoly {
    let kept: Vec<usize> = keep.iter().map(|v| v.slot()).collect();
    let mut buckets: BTreeMap<Mono, Vec<(Mono, Ratio)>> = BTreeMap::new();
    for (m, c) in big.terms() {
        let mut outer = *m;
        let mut inner = Mono::one();
        for &s in &kept {
            inner.0[s] = m.0[s];
            outer.0[s] = 0;
        }
        buckets.entry(outer).or_default().push((inner, c.clone()));
    }
    let mut coeffs: Vec<MPoly> = buckets.into_values().map(MPoly::from_terms).collect();
    coeffs.sort_by_key(|c| c.terms().len());
    let mut g = small.clone();
    for c in coeffs {
        g = poly_gcd(&g, &c);
        if g.is_one() {
            break;
        }
    }
    g
}

/// Monic greatest common divisor; `gcd(0, 0) = 0`.
pub fn poly_gcd(a: &MPoly, b: &MPoly) -> MPoly {
    if a.is_zero() {
        return make_monic(b);
    }
    if b.is_zero() {
        return make_monic(a);
    }
    if a.is_constant() || b.is_constant() {
        return MPoly::one();
    }
    let (va, vb) = (a.vars(), b.vars());
    if va.iter().any(|v| !vb.contains(v)) {
        return gcd_with_coeffs(b, a, &vb);
    }
    if vb.iter().any(|v| !va.contains(v)) {
        return gcd_with_coeffs(a, b, &va);
    }
    let v = va[0];
    let g_cont = poly_gcd(&content_in(a, v), &content_in(b, v));
    let (mut p, mut q) = (
        numeric_primitive(&primitive_part_in(a, v)),
        numeric_primitive(&primitive_part_in(b, v)),
    );
    if p.degree_in(v) < q.degree_in(v) {
        std::mem::swap(&mut p, &mut q);
    }
    while !q.is_zero() {
        if q.degree_in(v) == 0 {
            // Primitive parts are coprime in v.
            return make_monic(&g_cont);
        }
        let r = prem(&p, &q, v);
        p = q;
        q = numeric_primitive(&primitive_part_in(&r, v));
    }
    make_monic(&(&g_cont * &p))
}
