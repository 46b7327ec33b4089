//! Exact integration over the standard simplex
//! `Δᵏ = {t ∈ ℝᵏ : tᵢ ≥ 0, Σ tᵢ ≤ 1}`.
//!
//! A monomial `t₁^a₁ ··· t_k^a_k` integrates to `(∏ aᵢ!) / (k + Σ aᵢ)!`
//! (Dirichlet integral); chart variables are carried through untouched.

use super::mpoly::{MPoly, Mono, Var, MAX_CHART, MAX_SIMPLEX};
use super::ratio::Ratio;
use super::rfrac::RFrac;
use crate::error::{AcsError, Result};

/// Exact value of `∫_{Δᵏ} t^exps dt`.
pub fn simplex_monomial_integral(exps: &[u32]) -> Ratio {
    let k = exps.len() as u32;
    let num = exps
        .iter()
        .fold(Ratio::one(), |acc, &a| &acc * &Ratio::factorial(a));
    let den = Ratio::factorial(k + exps.iter().sum::<u32>());
    &num / &den
}

/// Integrates out `t1..tk` over `Δᵏ`.
pub fn simplex_integrate(f: &MPoly, k: usize) -> Result<MPoly> {
    if k == 0 {
        return Err(AcsError::InvalidArgument(
            "simplex dimension must be positive; use restrict_t0 for k = 0".into(),
        ));
    }
    if k > MAX_SIMPLEX {
        return Err(AcsError::InvalidArgument(format!(
            "simplex dimension {k} exceeds {MAX_SIMPLEX}"
        )));
    }
    let mut out = Vec::with_capacity(f.len());
    for (m, c) in f.terms() {
        if let Some(s) = (k..MAX_SIMPLEX).find(|&s| m.exp(Var::T(s as u8)) > 0) {
            return Err(AcsError::InvalidArgument(format!(
                "integrand depends on t{} outside the {k}-simplex",
                s + 1
            )));
        }
        let exps: Vec<u32> = (0..k).map(|s| m.exp(Var::T(s as u8)) as u32).collect();
        let mut rest = *m;
        for e in rest.0[MAX_CHART..].iter_mut() {
            *e = 0;
        }
        out.push((rest, c * &simplex_monomial_integral(&exps)));
    }
    Ok(MPoly::from_terms(out))
}

/// Integrates a fraction whose denominator does not depend on the simplex variables.
pub fn simplex_integrate_frac(f: &RFrac, k: usize) -> Result<RFrac> {
    if f.den().has_simplex_vars() {
        return Err(AcsError::InvalidArgument(
            "cannot integrate a fraction with a t-dependent denominator".into(),
        ));
    }
    RFrac::new(simplex_integrate(f.num(), k)?, f.den().clone())
}

/// Monomial `t1^a1 ... tk^ak`.
pub fn t_monomial(exps: &[u32]) -> MPoly {
    let mut m = Mono::one();
    for (s, &a) in exps.iter().enumerate() {
        m.0[Var::T(s as u8).slot()] = a as u16;
    }
    MPoly::monomial(m, Ratio::one())
}
