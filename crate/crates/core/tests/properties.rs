use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use acs_core::arith::{poly_gcd, simplex_integrate, MPoly, RFrac, Ratio, Var};
use acs_core::chern::{ch_form, cs_form};
use acs_core::cohomology::build_complex;
use acs_core::connection::leibniz_check;
use acs_core::fixtures;
use acs_core::forms::{form_eval, FormExpr};
use acs_core::random::{random_frac, random_poly, random_section, random_sections, rng_from_seed};

fn big(r: &Ratio) -> BigRational {
    BigRational::new(r.numer(), r.denom())
}

fn ratio() -> impl Strategy<Value = Ratio> {
    (any::<i64>(), 1..i64::MAX).prop_map(|(n, d)| Ratio::new(n, d))
}

fn small_ratio() -> impl Strategy<Value = Ratio> {
    (-20i64..=20, 1i64..=6).prop_map(|(n, d)| Ratio::new(n, d))
}

fn poly(seed: u64, cap: u32) -> MPoly {
    let vars = [Var::X(0), Var::X(1), Var::T(0)];
    random_poly(&mut rng_from_seed(seed), &vars, cap)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ratio_matches_big_rational(a in ratio(), b in ratio()) {
        prop_assert_eq!(big(&(&a + &b)), big(&a) + big(&b));
        prop_assert_eq!(big(&(&a - &b)), big(&a) - big(&b));
        prop_assert_eq!(big(&(&a * &b)), big(&a) * big(&b));
        if !b.is_zero() {
            prop_assert_eq!(big(&(&a / &b)), big(&a) / big(&b));
        }
    }

    #[test]
    fn ratio_field_laws(a in ratio(), b in ratio(), c in ratio()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        if !a.is_zero() {
            prop_assert!((&a * &a.recip().unwrap()).is_one());
        }
    }

    #[test]
    fn ratio_parses_its_display(a in ratio()) {
        prop_assert_eq!(a.to_string().parse::<Ratio>().unwrap(), a.clone());
        let n = BigInt::from(3) * a.numer();
        prop_assert_eq!(Ratio::from_bigs(n, a.denom()).unwrap(), &Ratio::from_int(3) * &a);
    }

    #[test]
    fn polynomial_ring_laws(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>()) {
        let (p, q, r) = (poly(s1, 2), poly(s2, 2), poly(s3, 1));
        prop_assert_eq!(&p * &q, &q * &p);
        prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
        prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
        prop_assert!((&p - &p).is_zero());
    }

    #[test]
    fn derivative_is_a_derivation(s1 in any::<u64>(), s2 in any::<u64>()) {
        let (p, q) = (poly(s1, 3), poly(s2, 2));
        for v in [Var::X(0), Var::X(1), Var::T(0)] {
            let lhs = (&p * &q).derive(v);
            let rhs = &(&p.derive(v) * &q) + &(&p * &q.derive(v));
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn gcd_divides_and_recovers_common_factor(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>()) {
        let (a, b, c) = (poly(s1, 2), poly(s2, 2), poly(s3, 1));
        prop_assume!(!a.is_zero() && !b.is_zero() && !c.is_zero());
        let (ac, bc) = (&a * &c, &b * &c);
        let g = poly_gcd(&ac, &bc);
        prop_assert!(ac.div_exact(&g).unwrap().is_some());
        prop_assert!(bc.div_exact(&g).unwrap().is_some());
        prop_assert!(g.div_exact(&c).unwrap().is_some() || c.is_constant());
    }

    #[test]
    fn fractions_add_and_multiply_like_fractions(s in any::<u64>()) {
        let (a, b, c, d) = (poly(s, 2), poly(s ^ 1, 1), poly(s ^ 2, 2), poly(s ^ 3, 1));
        prop_assume!(!b.is_zero() && !d.is_zero());
        let x = RFrac::new(a.clone(), b.clone()).unwrap();
        let y = RFrac::new(c.clone(), d.clone()).unwrap();
        let bd = &b * &d;
        prop_assert_eq!(&x + &y, RFrac::new(&(&a * &d) + &(&c * &b), bd.clone()).unwrap());
        prop_assert_eq!(&x * &y, RFrac::new(&a * &c, bd).unwrap());
        prop_assert!((&x - &x).is_zero());
    }

    #[test]
    fn simplex_integration_is_linear(s1 in any::<u64>(), s2 in any::<u64>(), a in small_ratio(), b in small_ratio(), k in 1usize..=3) {
        let vars: Vec<Var> = (0..k).map(|i| Var::T(i as u8)).chain([Var::X(0)]).collect();
        let f = random_poly(&mut rng_from_seed(s1), &vars, 3);
        let g = random_poly(&mut rng_from_seed(s2), &vars, 3);
        let lhs = simplex_integrate(&(&f.scale(&a) + &g.scale(&b)), k).unwrap();
        let rhs = &simplex_integrate(&f, k).unwrap().scale(&a) + &simplex_integrate(&g, k).unwrap().scale(&b);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn bracket_axioms_on_random_sections(seed in any::<u64>(), which in 0usize..5) {
        let alg = [fixtures::so3(), fixtures::nonabelian2(), fixtures::tangent_chart(2), fixtures::foliation(), fixtures::abelian(3)][which].clone();
        let mut rng = rng_from_seed(seed);
        let (a, b, c) = (random_section(&alg, &mut rng, 2), random_section(&alg, &mut rng, 2), random_section(&alg, &mut rng, 2));
        let f = random_frac(&alg, &mut rng, 2);
        let ab = alg.bracket(&a, &b).unwrap();
        prop_assert!(ab.add(&alg.bracket(&b, &a).unwrap()).is_zero());
        let jac = alg.bracket(&a, &alg.bracket(&b, &c).unwrap()).unwrap()
            .add(&alg.bracket(&b, &alg.bracket(&c, &a).unwrap()).unwrap())
            .add(&alg.bracket(&c, &ab).unwrap());
        prop_assert!(jac.is_zero());
        let lhs = alg.bracket(&a, &b.scale(&f)).unwrap();
        let rhs = ab.scale(&f).add(&b.scale(&alg.anchor_apply(&a, &f).unwrap()));
        prop_assert_eq!(lhs, rhs);
        let g = random_frac(&alg, &mut rng, 2);
        let (va, vb) = (alg.anchor_field(&a), alg.anchor_field(&b));
        prop_assert_eq!(alg.anchor_field(&ab).apply(&g), &va.apply(&vb.apply(&g)) - &vb.apply(&va.apply(&g)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn connections_satisfy_leibniz(seed in any::<u64>()) {
        for (name, set, conns) in fixtures::connection_zoo() {
            for (cname, c) in conns {
                let rep = leibniz_check(&c, &set, 1, seed);
                prop_assert!(rep.passed(), "{}/{}: {:?}", name, cname, rep.first_failure());
            }
        }
    }

    #[test]
    fn wedge_is_graded_commutative(seed in any::<u64>()) {
        let fx = fixtures::by_name("chart2").unwrap();
        let set = fx.setting();
        let mut rng = rng_from_seed(seed);
        let f = FormExpr::d(FormExpr::ConstFn(random_frac(&set.alg, &mut rng, 2)));
        let g = FormExpr::d(FormExpr::ConstFn(random_frac(&set.alg, &mut rng, 2)));
        let w = ch_form(fx.connection("gamma").unwrap(), 1);
        let args = random_sections(&set.alg, 3, 1, seed);
        let fg = form_eval(&FormExpr::sum(vec![FormExpr::wedge(f.clone(), g.clone()), FormExpr::wedge(g, f.clone())]), &set, &args[..2]).unwrap();
        prop_assert!(fg.is_zero());
        let fw = form_eval(&FormExpr::sub(FormExpr::wedge(f.clone(), w.clone()), FormExpr::wedge(w, f)), &set, &args).unwrap();
        prop_assert!(fw.is_zero());
    }

    #[test]
    fn cs_of_a_single_connection_is_ch(seed in any::<u64>()) {
        let fx = fixtures::by_name("foliation").unwrap();
        let set = fx.setting();
        let args = random_sections(&set.alg, 2, 2, seed);
        for c in fx.connections.values() {
            prop_assert_eq!(
                form_eval(&cs_form(&[c.clone()], 1).unwrap(), &set, &args).unwrap(),
                form_eval(&ch_form(c, 1), &set, &args).unwrap()
            );
        }
    }

    #[test]
    fn coboundaries_are_exact(seed in any::<u64>(), which in 0usize..3) {
        let alg = [fixtures::so3(), fixtures::nonabelian2(), fixtures::abelian(3)][which].clone();
        let cx = build_complex(&alg, None).unwrap();
        let mut rng = rng_from_seed(seed);
        for k in 0..cx.dimension() {
            let x: Vec<Ratio> = (0..cx.dim(k)).map(|_| random_poly(&mut rng, &[], 0).constant_term()).collect();
            let dx = cx.apply_d(k, &x).unwrap();
            prop_assert!(cx.is_exact(k + 1, &dx).unwrap().is_exact());
        }
    }
}
