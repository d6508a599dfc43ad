use proptest::prelude::*;

use lgn_core::coeff_ring::{quantum_integer, specialize, Ring};
use lgn_core::LaurentScalar;

fn laurent() -> impl Strategy<Value = LaurentScalar> {
    prop::collection::vec((-8i32..=8, -4i64..=4), 0..5).prop_map(LaurentScalar::from_terms)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn laurent_ring_axioms(a in laurent(), b in laurent(), c in laurent()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &LaurentScalar::one(), a.clone());
    }

    #[test]
    fn bar_is_a_ring_automorphism(a in laurent(), b in laurent()) {
        prop_assert_eq!((&a * &b).bar(), &a.bar() * &b.bar());
        prop_assert_eq!(a.bar().bar(), a.clone());
    }

    #[test]
    fn exact_division_inverts_multiplication(a in laurent(), b in laurent()) {
        prop_assume!(!b.is_zero());
        prop_assert_eq!((&a * &b).div_exact(&b), Some(a));
    }

    #[test]
    fn rendering_round_trips(a in laurent()) {
        prop_assert_eq!(LaurentScalar::parse(&a.to_string()).unwrap(), a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn specialization_is_a_ring_homomorphism(p in 2u32..=4, a in laurent(), b in laurent()) {
        let (sa, sb) = (specialize(&a, p), specialize(&b, p));
        prop_assert_eq!(specialize(&(&a * &b), p), &sa * &sb);
        prop_assert_eq!(specialize(&(&a + &b), p), &sa + &sb);
        prop_assert!(specialize(&LaurentScalar::one(), p).is_one());
    }
}

#[test]
fn quantum_integer_vanishes_at_its_root_of_unity() {
    for p in 2..=6 {
        assert!(quantum_integer(p, Ring::Cyclo(p)).is_zero(), "[{p}] at p = {p}");
        assert!(!quantum_integer(p - 1, Ring::Cyclo(p)).is_zero());
    }
}
