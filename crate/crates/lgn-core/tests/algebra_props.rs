use std::collections::BTreeMap;
use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lgn_core::coeff_ring::Scalar;
use lgn_core::corpus::{random_element, random_word};
use lgn_core::lgn::{coaction, normal_form, Coaction, Mono};
use lgn_core::oq2::{oq_algebra, oq_coproduct, oq_mul, OqElement};
use lgn_core::pbw::HMono;
use lgn_core::{GeneratorId, LaurentScalar, LgnAlgebra, LgnElement, Mode, State, Surface};

const SURFACES: [(u32, u32); 5] = [(0, 1), (1, 0), (1, 1), (0, 2), (2, 0)];

fn algebra(g: u32, n: u32, mode: Mode) -> Arc<LgnAlgebra> {
    LgnAlgebra::get(Surface::new(g, n).unwrap(), mode).unwrap()
}

fn random_oq(rng: &mut ChaCha8Rng) -> OqElement {
    let mut x = OqElement::zero();
    for _ in 0..rng.gen_range(1..=2) {
        let word: Vec<u8> = (0..rng.gen_range(0..=3)).map(|_| rng.gen_range(0..4)).collect();
        let c = LaurentScalar::monomial(if rng.gen_bool(0.5) { 1 } else { -1 }, 2 * rng.gen_range(-2..=2));
        x = x.add(&OqElement::from_word(&word).unwrap().scale(&c));
    }
    x
}

/// The single PBW monomial `m` as an element, built from its normal-order word.
fn oq_monomial(m: &HMono) -> OqElement {
    // PBW positions hold the generator codes 1 (−+), 0 (−−), 3 (++), 2 (+−)
    let codes = [1u8, 0, 3, 2];
    let word: Vec<u8> = (0..4)
        .flat_map(|i| std::iter::repeat_n(codes[i], m[i] as usize))
        .collect();
    let x = OqElement::from_word(&word).unwrap();
    assert_eq!(x.terms().len(), 1);
    assert!(x.terms()[m].is_one());
    x
}

fn acc<K: Ord>(map: &mut BTreeMap<K, LaurentScalar>, k: K, c: LaurentScalar) {
    let v = map.remove(&k).map_or(c.clone(), |old| &old + &c);
    if !v.is_zero() {
        map.insert(k, v);
    }
}

type Pair = BTreeMap<(HMono, HMono), LaurentScalar>;

fn pair_product(x: &Pair, y: &Pair) -> Pair {
    let oq = oq_algebra();
    let mut out = BTreeMap::new();
    for ((a1, a2), c) in x {
        for ((b1, b2), d) in y {
            for (l, cl) in oq.mul_mono(a1, b1).unwrap() {
                for (r, cr) in oq.mul_mono(a2, b2).unwrap() {
                    let k = &(&(c * d) * cl.as_laurent().unwrap()) * cr.as_laurent().unwrap();
                    acc(&mut out, (l, r), k);
                }
            }
        }
    }
    out
}

fn coaction_product(alg: &Arc<LgnAlgebra>, x: &Coaction, y: &Coaction) -> Coaction {
    let oq = oq_algebra();
    let mono = |m: &Mono| {
        LgnElement::from_terms(
            alg,
            BTreeMap::from([(m.clone(), Scalar::Laurent(LaurentScalar::one()))]),
        )
    };
    let mut out = BTreeMap::new();
    for ((o1, l1), c) in x {
        for ((o2, l2), d) in y {
            let l = mono(l1).mul(&mono(l2)).unwrap();
            for (o, co) in oq.mul_mono(o1, o2).unwrap() {
                for (lm, cl) in l.terms() {
                    let k = &(&(c * d) * co.as_laurent().unwrap()) * cl.as_laurent().unwrap();
                    acc(&mut out, (o, lm.clone()), k);
                }
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn oq_multiplication_is_associative(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y, z) = (random_oq(&mut rng), random_oq(&mut rng), random_oq(&mut rng));
        prop_assert_eq!(oq_mul(&oq_mul(&x, &y), &z), oq_mul(&x, &oq_mul(&y, &z)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn oq_counit_and_coproduct_are_multiplicative(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y) = (random_oq(&mut rng), random_oq(&mut rng));
        let xy = oq_mul(&x, &y);
        prop_assert_eq!(xy.counit(), &x.counit() * &y.counit());
        prop_assert_eq!(oq_coproduct(&xy), pair_product(&oq_coproduct(&x), &oq_coproduct(&y)));
    }

    #[test]
    fn lgn_multiplication_is_associative_and_unital(seed in any::<u64>(), k in 0usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g, n) = SURFACES[k];
        let alg = algebra(g, n, Mode::Generic);
        let x = random_element(&mut rng, &alg, 2, 3).unwrap();
        let y = random_element(&mut rng, &alg, 2, 3).unwrap();
        let z = random_element(&mut rng, &alg, 2, 3).unwrap();
        let one = LgnElement::one(&alg);
        prop_assert_eq!(x.mul(&y).unwrap().mul(&z).unwrap(), x.mul(&y.mul(&z).unwrap()).unwrap());
        prop_assert_eq!(&one.mul(&x).unwrap(), &x);
        prop_assert_eq!(&x.mul(&one).unwrap(), &x);
    }

    #[test]
    fn restricted_normal_forms_respect_exponent_bounds(seed in any::<u64>(), k in 0usize..5, p in 2u32..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g, n) = SURFACES[k];
        let alg = algebra(g, n, Mode::Restricted(p));
        let w = random_word(&mut rng, alg.surface(), 8);
        let p = p as u16;
        for m in normal_form(&alg, &w).unwrap().terms().keys() {
            for h in m {
                // positions: (−+), (−−), (++), (+−)
                prop_assert!(h[0] < p && h[1] == 0 && h[2] < 2 * p && h[3] < p, "{:?}", h);
            }
        }
    }

    #[test]
    fn restricted_mode_is_associative(seed in any::<u64>(), k in 0usize..3, p in 2u32..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g, n) = SURFACES[k];
        let alg = algebra(g, n, Mode::Restricted(p));
        let x = random_element(&mut rng, &alg, 2, 3).unwrap();
        let y = random_element(&mut rng, &alg, 2, 3).unwrap();
        let z = random_element(&mut rng, &alg, 2, 3).unwrap();
        prop_assert_eq!(x.mul(&y).unwrap().mul(&z).unwrap(), x.mul(&y.mul(&z).unwrap()).unwrap());
    }

    #[test]
    fn coaction_is_multiplicative(seed in any::<u64>(), k in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g, n) = SURFACES[k];
        let alg = algebra(g, n, Mode::Generic);
        let x = random_element(&mut rng, &alg, 2, 2).unwrap();
        let y = random_element(&mut rng, &alg, 2, 2).unwrap();
        let lhs = coaction(&x.mul(&y).unwrap()).unwrap();
        prop_assert_eq!(lhs, coaction_product(&alg, &coaction(&x).unwrap(), &coaction(&y).unwrap()));
    }
}

#[test]
fn coaction_is_coassociative_on_generators() {
    for (g, n) in SURFACES {
        let alg = algebra(g, n, Mode::Generic);
        for slot in 0..alg.n_slots() {
            let (f, h) = alg.surface().family_of_slot(slot);
            for s in [State::Minus, State::Plus] {
                for t in [State::Minus, State::Plus] {
                    let x = LgnElement::generator(&alg, GeneratorId::new(f, h, s, t)).unwrap();
                    let om = coaction(&x).unwrap();
                    let mut lhs: BTreeMap<(HMono, HMono, Mono), LaurentScalar> = BTreeMap::new();
                    let mut rhs = BTreeMap::new();
                    for ((o, l), c) in &om {
                        for ((o1, o2), d) in oq_coproduct(&oq_monomial(o)) {
                            acc(&mut lhs, (o1, o2, l.clone()), c * &d);
                        }
                        let inner = LgnElement::from_terms(
                            &alg,
                            BTreeMap::from([(l.clone(), Scalar::Laurent(LaurentScalar::one()))]),
                        );
                        for ((o2, l2), d) in coaction(&inner).unwrap() {
                            acc(&mut rhs, (*o, o2, l2), c * &d);
                        }
                    }
                    assert!(!lhs.is_empty());
                    assert_eq!(lhs, rhs, "{f:?}{h}[{s:?},{t:?}]");
                }
            }
        }
    }
}
