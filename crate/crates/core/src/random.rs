//! Seeded pseudo-random polynomials, sections and endomorphisms.
//!
//! Coefficients are integers in `[-3, 3]`; every monomial of total degree at
//! most the cap in the relevant variables gets one draw.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebroid::{AlgebroidSpec, Section};
use crate::arith::{MPoly, Mono, RFrac, Ratio, Var};
use crate::bundle::{ESection, EndMat};

pub const COEFF_BOUND: i64 = 3;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Chart variables of the algebroid followed by its simplex variables.
pub fn algebroid_vars(alg: &AlgebroidSpec) -> Vec<Var> {
    let mut vars: Vec<Var> = (0..alg.chart_dim()).map(|i| Var::X(i as u8)).collect();
    vars.extend((0..alg.simplex_arity()).map(|s| Var::T(s as u8)));
    vars
}

fn monomials(vars: &[Var], cap: u32) -> Vec<Mono> {
    let mut out = vec![Mono::one()];
    for &v in vars {
        let mut next = Vec::new();
        for m in &out {
            for e in 0..=cap.saturating_sub(m.total_degree()) {
                let mut m2 = *m;
                m2.0[v.slot()] = e as u16;
                next.push(m2);
            }
        }
        out = next;
    }
    out
}

pub fn random_poly<R: Rng>(rng: &mut R, vars: &[Var], degree_cap: u32) -> MPoly {
    MPoly::from_terms(
        monomials(vars, degree_cap)
            .into_iter()
            .map(|m| {
                (
                    m,
                    Ratio::from_int(rng.gen_range(-COEFF_BOUND..=COEFF_BOUND)),
                )
            })
            .collect::<Vec<_>>(),
    )
}

pub fn random_frac<R: Rng>(alg: &AlgebroidSpec, rng: &mut R, degree_cap: u32) -> RFrac {
    RFrac::from_poly(random_poly(rng, &algebroid_vars(alg), degree_cap))
}

pub fn random_section<R: Rng>(alg: &AlgebroidSpec, rng: &mut R, degree_cap: u32) -> Section {
    let vars = algebroid_vars(alg);
    Section::new(
        (0..alg.frame_len())
            .map(|_| RFrac::from_poly(random_poly(rng, &vars, degree_cap)))
            .collect(),
    )
}

pub fn random_sections(
    alg: &AlgebroidSpec,
    count: usize,
    degree_cap: u32,
    seed: u64,
) -> Vec<Section> {
    let mut rng = rng_from_seed(seed);
    (0..count)
        .map(|_| random_section(alg, &mut rng, degree_cap))
        .collect()
}

pub fn random_esection<R: Rng>(
    alg: &AlgebroidSpec,
    rank: usize,
    rng: &mut R,
    degree_cap: u32,
) -> ESection {
    let vars = algebroid_vars(alg);
    ESection::new(
        (0..rank)
            .map(|_| RFrac::from_poly(random_poly(rng, &vars, degree_cap)))
            .collect(),
    )
}

/// Random endomorphism whose entries depend on the chart variables only.
pub fn random_end<R: Rng>(chart_dim: usize, rank: usize, rng: &mut R, degree_cap: u32) -> EndMat {
    let vars: Vec<Var> = (0..chart_dim).map(|i| Var::X(i as u8)).collect();
    EndMat::from_fn(rank, |_, _| {
        RFrac::from_poly(random_poly(rng, &vars, degree_cap))
    })
}

/// A random rational chart point with small numerators and denominators.
pub fn random_point<R: Rng>(chart_dim: usize, rng: &mut R) -> Vec<Ratio> {
    (0..chart_dim)
        .map(|_| Ratio::new(rng.gen_range(-5..=5), rng.gen_range(1..=3)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn seeded_output_is_reproducible() {
        let alg = fixtures::foliation();
        assert_eq!(
            random_sections(&alg, 4, 2, 99),
            random_sections(&alg, 4, 2, 99)
        );
        assert_ne!(
            random_sections(&alg, 4, 2, 99),
            random_sections(&alg, 4, 2, 100)
        );
    }

    #[test]
    fn degree_zero_over_point_is_constant() {
        let g = fixtures::so3();
        for s in random_sections(&g, 5, 0, 3) {
            assert!(s.coeffs().iter().all(|c| c.constant_value().is_some()));
        }
        let chart = fixtures::tangent_chart(2);
        for s in random_sections(&chart, 5, 0, 3) {
            assert!(s.coeffs().iter().all(|c| c.constant_value().is_some()));
        }
    }

    #[test]
    fn count_zero_is_empty() {
        assert!(random_sections(&fixtures::so3(), 0, 2, 1).is_empty());
    }

    #[test]
    fn degree_and_coefficients_are_bounded() {
        let chart = fixtures::tangent_chart(2);
        for s in random_sections(&chart, 6, 2, 5) {
            for c in s.coeffs() {
                let p = c.as_poly().unwrap();
                assert!(p.total_degree() <= 2);
                assert!(p
                    .terms()
                    .iter()
                    .all(|(_, c)| c.is_integer() && c.abs() <= Ratio::from_int(COEFF_BOUND)));
            }
        }
    }

    #[test]
    fn monomial_count() {
        let vars = [Var::X(0), Var::X(1)];
        assert_eq!(monomials(&vars, 2).len(), 6);
        assert_eq!(monomials(&[], 3).len(), 1);
    }
}
