//! Randomized invariants of the exact pipeline, each checked against an
//! oracle that does not share code with the implementation.

mod props;

use num_complex::Complex64;
use num_traits::Signed;
use oscindex_core::nondegeneracy::{nondegeneracy_check, NondegeneracyOptions, NondegeneracyStatus};
use oscindex_core::pair;
use oscindex_core::poles;
use oscindex_core::rational::{self, int, Rational};
use oscindex_core::sign::{sign_certificate, SignStatus};
use oscindex_core::{fan, parse_polynomial, ExponentVector, NewtonPolyhedron};
use proptest::prelude::*;
use props::{dim, draw_support, phase, poly_of};

const CASES: u32 = 256;

fn config() -> ProptestConfig {
    ProptestConfig { cases: CASES, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn hull_matches_brute_force(n in dim(), seed in any::<u64>()) {
        props::hull_matches_brute_force(n, seed)?;
    }

    #[test]
    fn distance_matches_bisection(n in dim(), s1 in any::<u64>(), s2 in any::<u64>()) {
        props::distance_matches_bisection(n, s1, s2)?;
    }

    #[test]
    fn monomial_identities(f in dim().prop_flat_map(|n| phase(n, 5)), s in any::<u64>()) {
        props::monomial_identities(f, s)?;
    }

    #[test]
    fn distance_product_is_at_least_one(n in 1usize..=3, s1 in any::<u64>(), s2 in any::<u64>(), t in 1i64..=3) {
        props::distance_product_is_at_least_one(n, s1, s2, t)?;
    }

    #[test]
    fn unimodular_fans(f in dim().prop_flat_map(|n| phase(n, 4))) {
        props::unimodular_fans(f)?;
    }

    #[test]
    fn pullbacks_divide_exactly(f in dim().prop_flat_map(|n| phase(n, 4))) {
        props::pullbacks_divide_exactly(f)?;
    }

    #[test]
    fn leading_candidate_is_minus_inverse_distance(n in 1usize..=3, s1 in any::<u64>(), s2 in any::<u64>()) {
        let f_pts = draw_support(n, 4, s1);
        let mut phi_pts = draw_support(n, 3, s2);
        if s2.is_multiple_of(2) {
            phi_pts.push(vec![0; n]);
        }
        let (pf, pphi) = (poly_of(&f_pts), poly_of(&phi_pts));
        let fan = fan::pair_resolution_fan(&pf, &pphi).unwrap();
        let g = poles::candidate_poles_general(&pf, &pphi, &fan, 3).unwrap();
        let d = pair::newton_distance(&pf, &pphi).unwrap();
        prop_assert_eq!(&g.leading, &-d.recip());
        // The negative integers can sit above −1/d when d < 1; the largest
        // ray-generated candidate is always −1/d.
        let top_ray = g
            .candidates
            .iter()
            .find(|c| c.provenance.iter().any(|p| matches!(p, poles::Provenance::Ray { .. })))
            .unwrap();
        prop_assert_eq!(&top_ray.location, &g.leading);
        let m = pair::newton_multiplicity(&pf, &pphi, &d).unwrap();
        prop_assert!(g.leading_order >= 1 && g.leading_order <= pair::order_bound(&d, m, n));
        for c in &g.candidates {
            prop_assert!(c.location.is_negative());
            prop_assert!(c.max_order <= n);
        }
        prop_assert!(g.candidates.windows(2).all(|w| w[0].location > w[1].location));
    }

    #[test]
    fn printing_round_trips(f in dim().prop_flat_map(|n| phase(n, 6))) {
        let text = f.to_string();
        prop_assert_eq!(parse_polynomial(&text, f.dim()).unwrap(), f);
    }

    #[test]
    fn support_values_are_minima(f in dim().prop_flat_map(|n| phase(n, 6)), s in any::<u64>()) {
        let n = f.dim();
        let a: Vec<i64> = (0..n).map(|i| ((s >> (8 * i)) % 7) as i64).collect();
        let pf = NewtonPolyhedron::from_polynomial(&f).unwrap();
        let direct = f.terms().map(|(e, _)| e.dot(&a)).min().unwrap();
        prop_assert_eq!(pf.support_value(&a).unwrap(), int(direct));
        for (e, _) in f.terms() {
            let x: Vec<Rational> = e.as_slice().iter().map(|&v| int(v)).collect();
            prop_assert!(pf.contains(&x));
            let rho = pf.rho(&x).unwrap();
            prop_assert!(rho <= n);
            let is_vertex = pf.vertices().contains(e);
            prop_assert_eq!(rho == n, is_vertex);
        }
    }

    #[test]
    fn sign_certificates_are_sound(f in (1usize..=3).prop_flat_map(|n| phase(n, 5)), s in any::<u64>()) {
        let c = sign_certificate(&f, true);
        match c.status {
            SignStatus::Indefinite => {
                prop_assert!(f.eval(c.witness.as_ref().unwrap()).unwrap().is_negative());
                prop_assert!(f.eval(c.positive_witness.as_ref().unwrap()).unwrap().is_positive());
            }
            SignStatus::Nonnegative | SignStatus::Nonpositive => {
                // Small points: the certificate is local.
                let want_nonneg = c.status == SignStatus::Nonnegative;
                for k in 0..32u64 {
                    let x: Vec<Rational> = (0..f.dim())
                        .map(|i| {
                            let bits = (s.rotate_left((k * 7 + i as u64 * 13) as u32) % 201) as i64 - 100;
                            rational::ratio(bits, 100_000)
                        })
                        .collect();
                    let v = f.eval(&x).unwrap();
                    prop_assert!(if want_nonneg { !v.is_negative() } else { !v.is_positive() }, "f = {} at {:?}", f, x);
                }
            }
            SignStatus::Unknown => {}
        }
    }

    #[test]
    fn monomial_factor_keeps_nondegeneracy(f in (1usize..=2).prop_flat_map(|n| phase(n, 4)), s in any::<u64>()) {
        let n = f.dim();
        let p: Vec<i64> = (0..n).map(|i| ((s >> (4 * i)) % 3) as i64).collect();
        let g = f.shift(&ExponentVector::new(p).unwrap());
        let opts = NondegeneracyOptions::default();
        let pf = NewtonPolyhedron::from_polynomial(&f).unwrap();
        let pg = NewtonPolyhedron::from_polynomial(&g).unwrap();
        let a = nondegeneracy_check(&f, &pf, &opts).status;
        let b = nondegeneracy_check(&g, &pg, &opts).status;
        prop_assert!(a != NondegeneracyStatus::Unknown);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn order_bound_rule(num in 1i64..=12, den in 1i64..=12, n in 1usize..=4) {
        let d = rational::ratio(num, den);
        let integer_inverse = rational::is_integer(&d.recip());
        for m in 1..=n {
            let a = pair::order_bound(&d, m, n);
            prop_assert!(a <= n && a >= m);
            prop_assert_eq!(a, if integer_inverse { (m + 1).min(n) } else { m });
            if m > 1 {
                prop_assert!(pair::order_bound(&d, m - 1, n) <= a);
            }
        }
    }

    #[test]
    fn mellin_is_linear_and_conjugate_symmetric(
        num in 1i64..=20, den in 1i64..=10, rho in 1usize..=3,
        a in -5.0f64..5.0, b in -5.0f64..5.0, c in -5.0f64..5.0, e in -5.0f64..5.0,
    ) {
        let lambda = rational::ratio(num, den);
        let t = |bp: Complex64, bm: Complex64| poles::mellin_transfer(&lambda, rho, bp, bm).unwrap().b;
        let (x, y) = (Complex64::new(a, 0.0), Complex64::new(b, 0.0));
        let (u, v) = (Complex64::new(c, 0.0), Complex64::new(e, 0.0));
        let sum = t(x + u, y + v);
        let parts = t(x, y) + t(u, v);
        prop_assert!((sum - parts).norm() <= 1e-9 * (1.0 + sum.norm()));
        prop_assert!((t(y, x) - t(x, y).conj()).norm() <= 1e-9 * (1.0 + sum.norm()));
    }
}
