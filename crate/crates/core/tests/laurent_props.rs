//! Ring laws, bar involution and text round-trips for Laurent polynomials.

use hecke_cells::laurent::LaurentPoly;
use proptest::prelude::*;

fn poly() -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec((-6i32..=6, -5i64..=5), 0..6).prop_map(LaurentPoly::from_terms)
}

/// Value at q = 2 as an exact fraction num / 2^shift, for small polynomials.
fn eval2(p: &LaurentPoly) -> (i128, u32) {
    let shift = 12u32;
    let mut num = 0i128;
    for &(e, c) in p.terms() {
        num += c as i128 * (1i128 << (e + shift as i32));
    }
    (num, shift)
}

proptest! {
    #[test]
    fn ring_laws(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn bar_is_a_ring_involution(a in poly(), b in poly()) {
        prop_assert_eq!(a.bar().bar(), a.clone());
        prop_assert_eq!((&a * &b).bar(), &a.bar() * &b.bar());
        prop_assert_eq!((&a + &b).bar(), &a.bar() + &b.bar());
    }

    #[test]
    fn split_recombines(a in poly()) {
        let s = &(&a.negative_part() + &LaurentPoly::constant(a.coeff(0))) + &a.positive_part();
        prop_assert_eq!(s, a.clone());
        prop_assert!(a.negative_part().in_negative_part());
    }

    #[test]
    fn text_round_trip(a in poly()) {
        let text = a.to_string();
        prop_assert_eq!(text.parse::<LaurentPoly>().unwrap(), a);
    }

    #[test]
    fn product_matches_evaluation(a in poly(), b in poly()) {
        let (na, sa) = eval2(&a);
        let (nb, sb) = eval2(&b);
        let (np, sp) = eval2(&(&a * &b));
        prop_assert_eq!(na * nb, np << (sa + sb - sp));
    }
}

#[test]
fn xi_and_eta() {
    assert_eq!(LaurentPoly::xi(2).to_string(), "q^2 - q^-2");
    assert_eq!(
        LaurentPoly::eta(1),
        LaurentPoly::from_terms([(1, 1), (-1, 1)])
    );
    assert_eq!(LaurentPoly::xi(3).degree().finite(), Some(3));
    assert!(LaurentPoly::zero().degree().finite().is_none());
}
